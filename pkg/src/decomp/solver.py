"""Exact and approximate decomposition search, constructions and counting bounds.

The feasibility kernel colours the a-domain with ``2^u`` colours and the
b-domain with ``2^v`` colours, keeping a partial t-table and backtracking on
the first cell forced to two different values.  Variables are visited one
y-slice at a time (all ``a(., y)`` and ``b(y, .)`` interleaved), because a and
b only interact through pairs sharing the same ``y``.  Colours are canonical:
a variable may take any colour already used on its side or the next fresh
one.  At slice boundaries the rest of the search depends only on the partial
t-table and the colour counts, so refuted boundary states are cached.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import DecompositionCertificate, ShapeError, TernaryFunction, agreement, verify_certificate

FEASIBLE, INFEASIBLE, UNKNOWN = "feasible", "infeasible", "unknown"
EXACT, BOUNDS_ONLY = "exact", "bounds-only"

MAX_T_BITS = 26


class BudgetExhausted(RuntimeError):
    """Search hit its node or time limit and ``allow_unknown`` is off."""


@dataclass(frozen=True)
class SearchBudget:
    max_m: int | None = None
    max_nodes: int | None = None
    max_seconds: float | None = None
    allow_unknown: bool = True

    def __post_init__(self):
        for name in ("max_nodes", "max_seconds"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_m is not None and self.max_m < 0:
            raise ValueError("max_m must be non-negative")


@dataclass(frozen=True)
class Feasibility:
    status: str
    u: int
    v: int
    certificate: DecompositionCertificate | None = None
    nodes: int = 0


@dataclass
class SolveResult:
    status: str
    lower: int
    upper: int
    certificate: DecompositionCertificate | None
    split: tuple[int, int] | None
    nodes: int = 0
    seconds: float = 0.0
    log: list = field(default_factory=list)

    @property
    def dc(self) -> int | None:
        return self.upper if self.status == EXACT else None

    def to_json(self) -> dict:
        from .formats import certificate_to_json
        return {
            "status": self.status,
            "dc": self.dc,
            "lower": self.lower,
            "upper": self.upper,
            "split": list(self.split) if self.split else None,
            "certificate": certificate_to_json(self.certificate) if self.certificate else None,
            "nodes": self.nodes,
            "log": self.log,
        }


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("DECOMP_THREADS", "1")))
    except ValueError:
        return 1


def _slice_order(P: int, Q: int, R: int):
    order = []
    for y in range(Q):
        for i in range(max(P, R)):
            if i < P:
                order.append((0, i * Q + y, i, y))
            if i < R:
                order.append((1, y * R + i, i, y))
    return order


def _color_search(T: TernaryFunction, u: int, v: int, max_nodes, deadline):
    P, Q, R = 1 << T.p, 1 << T.q, 1 << T.r
    na = min(1 << u, P * Q)
    nb = min(1 << v, Q * R)
    vals = T.values.tolist()

    order = _slice_order(P, Q, R)
    L = len(order)
    partners = []
    for side, _, i, y in order:
        if side == 0:
            partners.append([(y * R + z, vals[(i * Q + y) * R + z]) for z in range(R)])
        else:
            partners.append([(x * Q + y, vals[(x * Q + y) * R + i]) for x in range(P)])
    boundary = [False] * (L + 1)
    for pos in range(0, L, P + R):
        boundary[pos] = True

    assign = ([-1] * (P * Q), [-1] * (Q * R))
    t = [-1] * (na * nb)
    color = [-1] * L
    used = [(0, 0)] * (L + 1)
    writes_at = [None] * L
    failed = set()
    nodes = 0

    pos, entering = 0, True
    while True:
        if entering:
            if pos == L:
                break
            if boundary[pos] and (pos, tuple(t), used[pos]) in failed:
                pos, entering = pos - 1, False
                if pos < 0:
                    return INFEASIBLE, None, nodes
                continue
            color[pos] = -1
        side, var, _, _ = order[pos]
        mine, other = assign[side], assign[1 - side]
        if color[pos] >= 0:
            for ti in writes_at[pos]:
                t[ti] = -1
            mine[var] = -1
        limit = min(used[pos][side] + 1, na if side == 0 else nb)
        c = color[pos] + 1
        found = None
        while c < limit:
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                return UNKNOWN, None, nodes
            if deadline is not None and (nodes & 1023) == 0 and time.monotonic() > deadline:
                return UNKNOWN, None, nodes
            writes = []
            for pidx, val in partners[pos]:
                pc = other[pidx]
                if pc < 0:
                    continue
                ti = c * nb + pc if side == 0 else pc * nb + c
                cur = t[ti]
                if cur < 0:
                    t[ti] = val
                    writes.append(ti)
                elif cur != val:
                    break
            else:
                found = writes
                break
            for ti in writes:
                t[ti] = -1
            c += 1
        if found is not None:
            mine[var] = c
            color[pos] = c
            writes_at[pos] = found
            ua, ub = used[pos]
            used[pos + 1] = (max(ua, c + 1), ub) if side == 0 else (ua, max(ub, c + 1))
            pos, entering = pos + 1, True
        else:
            color[pos] = -1
            if boundary[pos]:
                failed.add((pos, tuple(t), used[pos]))
            pos, entering = pos - 1, False
            if pos < 0:
                return INFEASIBLE, None, nodes

    full_t = np.zeros(1 << (u + v), dtype=np.int64)
    for alpha in range(na):
        for beta in range(nb):
            val = t[alpha * nb + beta]
            if val >= 0:
                full_t[(alpha << v) | beta] = val
    cert = DecompositionCertificate(u, v, np.array(assign[0]), np.array(assign[1]), full_t)
    return FEASIBLE, cert, nodes


def feasible(T: TernaryFunction, u: int, v: int, budget: SearchBudget = SearchBudget(),
             deadline: float | None = None) -> Feasibility:
    """Decide whether ``T`` decomposes with a ``u``-bit a-message and a ``v``-bit b-message.

    Raises :class:`BudgetExhausted` if the budget runs out and unknown results
    are not allowed.
    """
    if u < 0 or v < 0:
        raise ValueError("u and v must be non-negative")
    if u + v > MAX_T_BITS:
        raise ShapeError(f"t-table of 2^{u + v} entries is above the limit 2^{MAX_T_BITS}")
    if deadline is None and budget.max_seconds is not None:
        deadline = time.monotonic() + budget.max_seconds
    status, cert, nodes = _color_search(T, u, v, budget.max_nodes, deadline)
    if status == UNKNOWN and not budget.allow_unknown:
        raise BudgetExhausted(f"search for (u, v) = ({u}, {v}) stopped after {nodes} nodes")
    return Feasibility(status, u, v, cert, nodes)


def _feasible_job(args):
    T, u, v, budget, deadline = args
    return feasible(T, u, v, budget, deadline)


def constructive_upper_bound(T: TernaryFunction) -> DecompositionCertificate:
    """Smallest of the three generic constructions: split, right slice, left slice."""
    options = [upper_bound_split(T, T.q)]
    if T.s * (1 << T.r) + T.r <= MAX_T_BITS:
        options.append(upper_bound_slice(T, "right"))
    if T.s * (1 << T.p) + T.p <= MAX_T_BITS:
        options.append(upper_bound_slice(T, "left"))
    return min(options, key=lambda d: d.size)


def exact_dc(T: TernaryFunction, budget: SearchBudget = SearchBudget(), workers: int | None = None) -> SolveResult:
    """Least ``m`` such that some split ``u + v = m`` is feasible.

    Tries ``m = 0, 1, 2, ...`` below the best constructive bound.  Results are
    independent of ``workers``: splits of one ``m`` may run in parallel but are
    read back in order of increasing ``u``.
    """
    workers = _thread_count() if workers is None else max(1, workers)
    start = time.monotonic()
    deadline = start + budget.max_seconds if budget.max_seconds is not None else None
    best = constructive_upper_bound(T)
    lower, upper, cert = 0, best.size, best
    split = (best.u, best.v)
    nodes = 0
    log = []
    cache: dict[tuple[int, int], Feasibility] = {}
    stop = upper if budget.max_m is None else min(upper, budget.max_m + 1)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for m in range(stop):
            splits = [(u, m - u) for u in range(m + 1)]
            todo = [s for s in splits if (min(s[0], T.p + T.q), min(s[1], T.q + T.r)) not in cache]
            jobs = [(T, min(u, T.p + T.q), min(v, T.q + T.r), budget, deadline) for u, v in todo]
            if pool is not None and len(jobs) > 1:
                outcomes = list(pool.map(_feasible_job, jobs))
            else:
                outcomes = []
                for job in jobs:
                    outcomes.append(_feasible_job(job))
                    if outcomes[-1].status == FEASIBLE:
                        break
            for job, res in zip(jobs, outcomes):
                cache[(job[1], job[2])] = res
                nodes += res.nodes
            statuses = []
            hit = None
            for u, v in splits:
                key = (min(u, T.p + T.q), min(v, T.q + T.r))
                if key not in cache:
                    break
                res = cache[key]
                statuses.append(res.status)
                if res.status == FEASIBLE:
                    hit = (u, v, res.certificate)
                    break
            log.append({"m": m, "splits": [list(s) for s in splits[:len(statuses)]], "status": statuses})
            if hit is not None:
                u, v, c = hit
                upper, split = m, (u, v)
                cert = _pad_certificate(c, u, v)
                break
            if all(s == INFEASIBLE for s in statuses) and lower == m:
                lower = m + 1
    finally:
        if pool is not None:
            pool.shutdown()
    status = EXACT if lower == upper else BOUNDS_ONLY
    return SolveResult(status, lower, upper, cert, split, nodes, time.monotonic() - start, log)


def _pad_certificate(c: DecompositionCertificate, u: int, v: int) -> DecompositionCertificate:
    """Widen a certificate found with clamped widths to ``(u, v)``."""
    if (c.u, c.v) == (u, v):
        return c
    t = np.zeros(1 << (u + v), dtype=np.int64)
    for alpha in range(1 << c.u):
        for beta in range(1 << c.v):
            t[(alpha << v) | beta] = c.t[(alpha << c.v) | beta]
    return DecompositionCertificate(u, v, c.a, c.b, t)


# -- constructions -----------------------------------------------------------

def upper_bound_split(T: TernaryFunction, j: int) -> DecompositionCertificate:
    """``a = <x, first j bits of y>``, ``b = <rest of y, z>``; size ``p + q + r``."""
    if not 0 <= j <= T.q:
        raise ValueError(f"j must lie in [0, {T.q}]")
    p, q, r = T.shape
    xy = np.arange(1 << (p + q), dtype=np.int64)
    yz = np.arange(1 << (q + r), dtype=np.int64)
    a = xy >> (q - j)
    b = yz & ((1 << (q - j + r)) - 1)
    # re-concatenating the two messages rebuilds the table index
    return DecompositionCertificate(p + j, q - j + r, a, b, np.asarray(T.values, dtype=np.int64))


def upper_bound_slice(T: TernaryFunction, side: str = "right") -> DecompositionCertificate:
    """Ship a whole slice of ``T`` in one message and the short argument in the other.

    ``side="right"``: ``a(x, y)`` is the table of ``z -> T(x, y, z)`` and
    ``b = z``; size ``s * 2^r + r``.  ``side="left"`` is the mirror image.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if side == "left":
        mirrored = upper_bound_slice(T.mirror(), "right")
        # mirror back: a <-> b with x <-> z and alpha <-> beta
        p, q, r = T.shape
        xy = np.arange(1 << (p + q), dtype=np.int64)
        yz = np.arange(1 << (q + r), dtype=np.int64)
        a = mirrored.b[((xy & ((1 << q) - 1)) << p) | (xy >> q)]
        b = mirrored.a[((yz & ((1 << r) - 1)) << q) | (yz >> r)]
        u, v = mirrored.v, mirrored.u
        alpha = np.arange(1 << u, dtype=np.int64)[:, None]
        beta = np.arange(1 << v, dtype=np.int64)[None, :]
        t = mirrored.t[(beta << u) | alpha].reshape(-1)
        return DecompositionCertificate(u, v, a, b, t)

    p, q, r, s = T.p, T.q, T.r, T.s
    R = 1 << r
    u = s * R
    if u + r > MAX_T_BITS:
        raise ShapeError(f"slice construction needs a 2^{u + r}-entry t-table")
    rows = np.asarray(T.values, dtype=np.int64).reshape(1 << (p + q), R)
    a = np.zeros(1 << (p + q), dtype=np.int64)
    for z in range(R):
        a = (a << s) | rows[:, z]
    b = np.arange(1 << (q + r), dtype=np.int64) & (R - 1)
    alpha = np.arange(1 << u, dtype=np.int64)[:, None]
    z = np.arange(R, dtype=np.int64)[None, :]
    t = (alpha >> (s * (R - 1 - z))) & ((1 << s) - 1)
    return DecompositionCertificate(u, r, a, b, t.reshape(-1))


# -- counting bounds ----------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """A bound together with the exact integers that justify it.

    ``evaluations`` maps each tested ``m`` to its terms; ``threshold`` is the
    right-hand side they are compared to.  For counting reports the inequality
    ``total < threshold`` must hold at ``m`` and fail at ``m + 1``; for the
    indexing report ``pairs >= ys`` must fail at ``m - 1`` and hold at ``m``.
    """
    kind: str
    params: dict
    m: int | None
    evaluations: dict
    threshold: int | Fraction | None = None

    def holds(self, m: int) -> bool:
        terms = self.evaluations[m]
        if self.kind == "indexing-formula":
            return terms["pair_exponent"] >= terms["y_exponent"]
        return sum(v for k, v in terms.items() if k != "total") < self.threshold

    def check(self) -> bool:
        """Re-sum the stored terms and confirm they reproduce ``m``."""
        if self.kind == "indexing-formula":
            return self.holds(self.m) and (self.m == 0 or not self.holds(self.m - 1))
        for m, terms in self.evaluations.items():
            if terms["total"] != sum(v for k, v in terms.items() if k != "total"):
                return False
        if self.m is None:
            return not self.holds(0)
        return self.holds(self.m) and not self.holds(self.m + 1)

    def to_json(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return {"numerator": str(x.numerator), "denominator": str(x.denominator)}
            if isinstance(x, int):
                return str(x)
            return x

        return {
            "kind": self.kind,
            "params": {k: num(v) for k, v in self.params.items()},
            "m": self.m,
            "vacuous": self.m is None,
            "evaluations": {str(m): {k: str(v) for k, v in terms.items()}
                            for m, terms in sorted(self.evaluations.items())},
            "threshold": num(self.threshold),
        }


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def _counting_terms(p: int, q: int, r: int, m: int) -> dict:
    # u ranges over 0..m, so there are m + 1 splits to account for
    terms = {
        "log_splits": _ceil_log2(m + 1),
        "a_tables": m << (p + q),
        "b_tables": m << (q + r),
        "t_tables": 1 << m,
    }
    terms["total"] = sum(terms.values())
    return terms


def _largest_m(p: int, q: int, r: int, threshold) -> int | None:
    if _counting_terms(p, q, r, 0)["total"] >= threshold:
        return None
    lo, hi = 0, 1
    while _counting_terms(p, q, r, hi)["total"] < threshold:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _counting_terms(p, q, r, mid)["total"] < threshold:
            lo = mid
        else:
            hi = mid
    return lo


def counting_lower_bound(p: int, q: int, r: int) -> BoundReport:
    """Largest ``m`` for which counting shows some predicate needs more than ``m`` bits."""
    if min(p, q, r) < 0:
        raise ValueError("widths must be non-negative")
    threshold = 1 << (p + q + r)
    m = _largest_m(p, q, r, threshold)
    probe = [0] if m is None else [m, m + 1]
    return BoundReport("counting", {"p": p, "q": q, "r": r}, m,
                       {k: _counting_terms(p, q, r, k) for k in probe}, threshold)


def entropy_upper_bound(eps: Fraction, prec: int = 256) -> Fraction:
    """Rational number guaranteed to be >= the binary entropy ``H(eps)``."""
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    if eps in (0, 1):
        return Fraction(0)
    from mpmath import iv
    from mpmath.libmp import to_rational

    old = iv.prec
    iv.prec = prec
    try:
        e = iv.mpf(eps.numerator) / eps.denominator
        f = iv.mpf(eps.denominator - eps.numerator) / eps.denominator
        h = -(e * iv.log(e) + f * iv.log(f)) / iv.log(2)
        num, den = to_rational(h._mpi_[1])
    finally:
        iv.prec = old
    return Fraction(int(num), int(den))


def counting_lower_bound_approx(p: int, q: int, r: int, eps) -> BoundReport:
    """Counting bound for every ``eps``-approximation, ``0 <= eps < 1/2``.

    Compares against a certified rational lower bound on ``(1 - H(eps)) 2^n``.
    """
    eps = Fraction(eps)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError("eps must satisfy 0 <= eps < 1/2")
    if min(p, q, r) < 0:
        raise ValueError("widths must be non-negative")
    h_hi = entropy_upper_bound(eps)
    threshold = (1 - h_hi) * (1 << (p + q + r))
    m = _largest_m(p, q, r, threshold)
    probe = [0] if m is None else [m, m + 1]
    return BoundReport("counting-approx", {"p": p, "q": q, "r": r, "epsilon": eps, "entropy_upper": h_hi}, m,
                       {k: _counting_terms(p, q, r, k) for k in probe}, threshold)


def indexing_lower_bound(k: int) -> BoundReport:
    """``u + v >= 2^k`` from counting pairs ``(a_y, b_y)`` against all ``y``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = 1 << k
    evals = {mm: {"pair_exponent": mm << k, "y_exponent": 1 << (2 * k)} for mm in (m - 1, m)}
    return BoundReport("indexing-formula", {"k": k}, m, evals)


# -- distributional search ----------------------------------------------------

@dataclass(frozen=True)
class AgreementResult:
    value: Fraction
    certificate: DecompositionCertificate
    optimal: bool
    nodes: int = 0

    def __iter__(self):
        yield self.value
        yield self.certificate


def best_agreement(T: TernaryFunction, u: int, v: int, budget: SearchBudget = SearchBudget(),
                   override_guard: bool = False) -> AgreementResult:
    """Maximum agreement with ``T`` over all ``(u, v)`` certificates, by branch and bound.

    For fixed ``a`` and ``b`` the best ``t`` takes the majority value in each
    cell; the bound adds one for every triple whose cell is still undecided.
    """
    P, Q, R = 1 << T.p, 1 << T.q, 1 << T.r
    if not override_guard and (P * Q > 32 or Q * R > 32 or u + v > 4):
        raise ShapeError("instance above the distributional guard (domains <= 32, u+v <= 4)")
    if u + v > MAX_T_BITS:
        raise ShapeError("t-table too large")
    na = min(1 << u, P * Q)
    nb = min(1 << v, Q * R)
    nvals = 1 << T.s
    vals = T.values.tolist()
    total = 1 << T.n
    deadline = time.monotonic() + budget.max_seconds if budget.max_seconds is not None else None

    order = _slice_order(P, Q, R)
    L = len(order)
    partners = []
    for side, _, i, y in order:
        if side == 0:
            partners.append([(y * R + z, vals[(i * Q + y) * R + z]) for z in range(R)])
        else:
            partners.append([(x * Q + y, vals[(x * Q + y) * R + i]) for x in range(P)])

    counts = [[0] * nvals for _ in range(na * nb)]
    cellmax = [0] * (na * nb)
    assign = ([-1] * (P * Q), [-1] * (Q * R))

    # constant certificate as the incumbent
    majority = max(range(nvals), key=lambda val: (vals.count(val), -val))
    best_hits = vals.count(majority)
    best = (np.zeros(P * Q, dtype=np.int64), np.zeros(Q * R, dtype=np.int64), None)
    state = {"score": 0, "decided": 0, "nodes": 0, "best": best_hits, "sol": best, "aborted": False}

    def place(pos, c):
        side = order[pos][0]
        other = assign[1 - side]
        trail = []
        for pidx, val in partners[pos]:
            pc = other[pidx]
            if pc < 0:
                continue
            cell = c * nb + pc if side == 0 else pc * nb + c
            cnt = counts[cell]
            cnt[val] += 1
            gain = 1 if cnt[val] > cellmax[cell] else 0
            if gain:
                cellmax[cell] += 1
            state["score"] += gain
            state["decided"] += 1
            trail.append((cell, val, gain))
        return trail

    def unplace(trail):
        for cell, val, gain in reversed(trail):
            counts[cell][val] -= 1
            cellmax[cell] -= gain
            state["score"] -= gain
            state["decided"] -= 1

    def dfs(pos, ua, ub):
        if state["aborted"]:
            return
        if state["score"] + (total - state["decided"]) <= state["best"]:
            return
        if pos == L:
            state["best"] = state["score"]
            state["sol"] = (np.array(assign[0]), np.array(assign[1]), None)
            return
        side, var, _, _ = order[pos]
        used = ua if side == 0 else ub
        for c in range(min(used + 1, na if side == 0 else nb)):
            state["nodes"] += 1
            if budget.max_nodes is not None and state["nodes"] > budget.max_nodes:
                state["aborted"] = True
                return
            if deadline is not None and (state["nodes"] & 1023) == 0 and time.monotonic() > deadline:
                state["aborted"] = True
                return
            assign[side][var] = c
            trail = place(pos, c)
            if side == 0:
                dfs(pos + 1, max(ua, c + 1), ub)
            else:
                dfs(pos + 1, ua, max(ub, c + 1))
            unplace(trail)
            assign[side][var] = -1
            if state["aborted"]:
                return

    dfs(0, 0, 0)
    if state["aborted"] and not budget.allow_unknown:
        raise BudgetExhausted("best_agreement stopped before proving optimality")

    a, b, _ = state["sol"]
    t = np.zeros(1 << (u + v), dtype=np.int64)
    cell_counts = np.zeros((na, nb, nvals), dtype=np.int64)
    for idx, val in enumerate(vals):
        x, y, z = T.split_index(idx)
        cell_counts[a[x * Q + y], b[y * R + z], val] += 1
    for alpha in range(na):
        for beta in range(nb):
            t[(alpha << v) | beta] = int(np.argmax(cell_counts[alpha, beta]))
    cert = DecompositionCertificate(u, v, a, b, t)
    value = agreement(T, cert)
    assert value == Fraction(state["best"], total)
    return AgreementResult(value, cert, not state["aborted"], state["nodes"])


def check_result(T: TernaryFunction, result: SolveResult) -> bool:
    """Sanity check used by the CLI and tests: bracket order and certificate validity."""
    if result.lower > result.upper:
        return False
    return result.certificate is None or verify_certificate(T, result.certificate)
