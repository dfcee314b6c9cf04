"""Command-line front end.

Exit codes: 0 success, 1 refuted or infeasible, 2 malformed input,
3 budget exhausted.  JSON output is canonical (sorted keys, compact), so
repeated runs with the same arguments give identical bytes.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import automata, formats, solver
from .core import FAMILIES, FamilySpec, ShapeError, first_counterexample, make_family
from .f2poly import PolyError, run_protocol

OK, REFUTED, MALFORMED, EXHAUSTED = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    out: Path | None
    fmt: str
    budget: solver.SearchBudget

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        budget = solver.SearchBudget(
            max_m=getattr(args, "max_m", None),
            max_nodes=getattr(args, "budget_nodes", None),
            max_seconds=getattr(args, "budget_seconds", None),
        )
        command = args.command if args.command != "ca" else f"ca {args.ca_command}"
        return cls(command, args.out, args.format, budget)


def _emit(cfg: RunConfig, payload: dict, text: str | None = None) -> None:
    body = formats.dumps(payload) if cfg.fmt == "json" or text is None else text.rstrip("\n") + "\n"
    if cfg.out is None:
        sys.stdout.write(body)
    else:
        cfg.out.write_text(body)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc


def _positive_int(text: str) -> int:
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _positive_float(text: str) -> float:
    val = float(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _add_shape(p: argparse.ArgumentParser) -> None:
    p.add_argument("-p", type=int)
    p.add_argument("-q", type=int)
    p.add_argument("-r", type=int)
    p.add_argument("-k", type=int)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a predicate family as a function file")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    _add_shape(gen)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--value", type=int, default=0)
    _add_common(gen)

    solve = sub.add_parser("solve", help="exact decomposition complexity")
    solve.add_argument("function", type=Path)
    solve.add_argument("--budget-nodes", type=_positive_int)
    solve.add_argument("--budget-seconds", type=_positive_float)
    solve.add_argument("--max-m", type=int)
    _add_common(solve)

    verify = sub.add_parser("verify", help="check a certificate against a function")
    verify.add_argument("function", type=Path)
    verify.add_argument("certificate", type=Path)
    _add_common(verify)

    bounds = sub.add_parser("bounds", help="counting and indexing lower bounds")
    bounds.add_argument("kind", choices=("counting", "indexing"))
    _add_shape(bounds)
    _add_common(bounds)

    approx = sub.add_parser("approx", help="counting bound for eps-approximations")
    _add_shape(approx)
    approx.add_argument("--epsilon", type=_fraction, required=True, help="rational, e.g. 1/4")
    _add_common(approx)

    proto = sub.add_parser("protocol", help="run the xor-indexing protocol once")
    proto.add_argument("-k", type=int, required=True)
    proto.add_argument("--y", help="2^k-bit string for y")
    proto.add_argument("--y-file", type=Path, help="JSON file with a 'y' bit string")
    proto.add_argument("--seed", type=int, default=0, help="random y when none is given")
    proto.add_argument("--x", type=int, default=0)
    proto.add_argument("--z", type=int, default=0)
    _add_common(proto)

    ca = sub.add_parser("ca", help="cellular automata and triangle circuits")
    casub = ca.add_subparsers(dest="ca_command", required=True)

    run = casub.add_parser("run", help="simulate a rule file")
    run.add_argument("rule", type=Path)
    run.add_argument("--input", default="", help="input bits, mapped to zero/one states")
    run.add_argument("--states", help="comma-separated initial states instead of bits")
    run.add_argument("--steps", type=int, required=True)
    _add_common(run)

    ext = casub.add_parser("extract", help="read a certificate off a triangle circuit")
    ext.add_argument("circuit", type=Path)
    ext.add_argument("-k", type=int, required=True)
    ext.add_argument("-f", type=int, required=True)
    ext.add_argument("--delay", type=int, default=0)
    _add_common(ext)

    idx = casub.add_parser("indexing", help="check the linear-time indexing automaton")
    idx.add_argument("-k", type=int, required=True)
    idx.add_argument("--exhaustive", action="store_true", help="all inputs, even when slow")
    idx.add_argument("--samples", type=_positive_int, default=1000)
    idx.add_argument("--seed", type=int, default=0)
    idx.add_argument("--rule-out", type=Path, help="also write the rule file here")
    _add_common(idx)
    return parser


def cmd_gen(args, cfg: RunConfig) -> int:
    spec = FamilySpec(args.family, k=args.k, p=args.p, q=args.q, r=args.r, seed=args.seed, value=args.value)
    T = make_family(spec)
    _emit(cfg, formats.function_to_json(T), f"{spec.name} p={T.p} q={T.q} r={T.r}\n{T.bitstring()}")
    return OK


def cmd_solve(args, cfg: RunConfig) -> int:
    T = formats.load_function(args.function)
    res = solver.exact_dc(T, cfg.budget)
    text = f"status {res.status}\nbracket [{res.lower}, {res.upper}]\nsplit {res.split}"
    _emit(cfg, res.to_json(), text)
    return OK if res.status == solver.EXACT else EXHAUSTED


def cmd_verify(args, cfg: RunConfig) -> int:
    T = formats.load_function(args.function)
    D = formats.load_certificate(args.certificate)
    D.check_shape(T)
    bad = first_counterexample(T, D)
    payload = {"verified": bad is None, "counterexample": None if bad is None else list(bad)}
    text = "verified" if bad is None else "refuted at x={} y={} z={}".format(*bad)
    _emit(cfg, payload, text)
    return OK if bad is None else REFUTED


def _shape(args) -> tuple[int, int, int]:
    if None in (args.p, args.q, args.r):
        raise ShapeError("need -p, -q and -r")
    return args.p, args.q, args.r


def _bound_text(rep: solver.BoundReport) -> str:
    lines = [f"{rep.kind} m={rep.m}"]
    for m, terms in sorted(rep.evaluations.items()):
        lines.append(f"  m={m}: " + " ".join(f"{k}={v}" for k, v in terms.items()))
    if rep.threshold is not None:
        lines.append(f"  threshold={rep.threshold}")
    return "\n".join(lines)


def cmd_bounds(args, cfg: RunConfig) -> int:
    if args.kind == "indexing":
        if args.k is None:
            raise ShapeError("indexing bound needs -k")
        rep = solver.indexing_lower_bound(args.k)
    else:
        rep = solver.counting_lower_bound(*_shape(args))
    _emit(cfg, rep.to_json(), _bound_text(rep))
    return OK


def cmd_approx(args, cfg: RunConfig) -> int:
    rep = solver.counting_lower_bound_approx(*_shape(args), args.epsilon)
    _emit(cfg, rep.to_json(), _bound_text(rep))
    return OK


def cmd_protocol(args, cfg: RunConfig) -> int:
    k = args.k
    if k < 1:
        raise ShapeError("k must be >= 1")
    if args.y is not None:
        y = args.y
    elif args.y_file is not None:
        y = formats.read_json(args.y_file).get("y")
        if not isinstance(y, str):
            raise formats.FormatError("y file needs a 'y' bit string")
    else:
        y = np.random.default_rng(args.seed).integers(0, 2, size=1 << k).tolist()
    out = run_protocol(k, y, args.x, args.z)
    text = (f"A ({out['size_a']} bits): {out['message_a']}\nB ({out['size_b']} bits): {out['message_b']}\n"
            f"referee {out['output']} expected {out['expected']}")
    _emit(cfg, out, text)
    return OK if out["output"] == out["expected"] else REFUTED


def cmd_ca_run(args, cfg: RunConfig) -> int:
    rule = automata.CARule.from_json(formats.read_json(args.rule))
    if args.states is not None:
        init = [int(s) for s in args.states.split(",") if s.strip()]
        trace = automata.ca_run(rule, init, args.steps)
    else:
        if set(args.input) - {"0", "1"}:
            raise ShapeError("--input must be a bit string")
        trace = automata.ca_run(rule, [int(b) for b in args.input], args.steps, bits=True)
    payload = {"neutral": rule.neutral,
               "trace": [{"offset": c.offset, "cells": list(c.cells)} for c in trace]}
    _emit(cfg, payload, automata.format_trace(trace, rule.neutral))
    return OK


def cmd_ca_extract(args, cfg: RunConfig) -> int:
    circuit = automata.TriangleCircuit.from_json(formats.read_json(args.circuit))
    D = automata.extract_decomposition(circuit, args.k, args.f, args.delay)
    T = automata.circuit_function(circuit, args.k, args.f)
    ok = first_counterexample(T, D) is None
    payload = {"certificate": formats.certificate_to_json(D), "verified": ok,
               "size": D.size, "state_width": automata.state_width(circuit.sigma)}
    _emit(cfg, payload, f"u={D.u} v={D.v} verified={ok}")
    return OK if ok else REFUTED


def cmd_ca_indexing(args, cfg: RunConfig) -> int:
    ca = automata.indexing_ca_build(args.k)
    if args.rule_out is not None:
        formats.save(args.rule_out, ca.rule.to_json())
    exhaustive = args.exhaustive or ca.n <= 12
    rep = automata.check_indexing_ca(args.k, None if exhaustive else args.samples, seed=args.seed)
    payload = dict(rep.to_json(), exhaustive=exhaustive, c_lin=ca.c_lin, n=ca.n, output_cell=ca.output_cell)
    text = (f"k={rep.k} n={ca.n} inputs={rep.inputs} correct={rep.correct} "
            f"max_steps={rep.max_steps} bound={rep.bound} states={rep.states}")
    _emit(cfg, payload, text)
    return OK if rep.ok else REFUTED


COMMANDS = {
    "gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify, "bounds": cmd_bounds,
    "approx": cmd_approx, "protocol": cmd_protocol,
    "ca run": cmd_ca_run, "ca extract": cmd_ca_extract, "ca indexing": cmd_ca_indexing,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[cfg.command](args, cfg)
    except solver.BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXHAUSTED
    except (ShapeError, formats.FormatError, PolyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MALFORMED


if __name__ == "__main__":
    sys.exit(main())
