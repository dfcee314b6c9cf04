"""One-dimensional cellular automata and non-uniform triangle circuits.

Cells are numbered so that an ``n``-bit input occupies cells ``0 .. n-1`` at
time 0; every other cell starts neutral.  The state of cell ``c`` at time
``tau`` depends only on input cells ``c - tau .. c + tau``.  Outputs are read
"as soon as possible": at cell ``floor((n-1)/2)`` and time ``ceil((n-1)/2)``,
optionally ``delay`` steps later.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DecompositionCertificate, ShapeError, TernaryFunction


def asap_schedule(n: int) -> tuple[int, int]:
    """Earliest space-time point whose light cone covers all ``n`` inputs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1) // 2, n // 2


def state_width(sigma: int) -> int:
    """Bits needed to write one state."""
    return max(1, (sigma - 1).bit_length())


@dataclass(frozen=True, eq=False)
class CARule:
    states: int
    neutral: int
    zero: int
    one: int
    delta: np.ndarray = field(repr=False)
    names: tuple = field(default=(), repr=False)

    def __post_init__(self):
        s = self.states
        if s < 1:
            raise ShapeError("need at least one state")
        if any(not 0 <= q < s for q in (self.neutral, self.zero, self.one)):
            raise ShapeError("distinguished states must be < states")
        delta = np.asarray(self.delta)
        if delta.shape != (s ** 3,):
            raise ShapeError(f"delta must have {s ** 3} entries")
        if delta.size and (delta.min() < 0 or delta.max() >= s):
            raise ShapeError("delta has entries outside the state set")
        delta = np.array(delta, dtype=np.uint8 if s <= 256 else np.uint16)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        n = self.neutral
        if int(delta[(n * s + n) * s + n]) != n:
            raise ShapeError("neutral state must be stable")

    def __call__(self, left: int, center: int, right: int) -> int:
        return int(self.delta[(left * self.states + center) * self.states + right])

    def encode_bits(self, bits: Sequence[int]) -> list[int]:
        return [self.one if b else self.zero for b in bits]

    def to_json(self) -> dict:
        return {"states": self.states, "neutral": self.neutral, "zero": self.zero,
                "one": self.one, "delta": self.delta.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "CARule":
        try:
            return cls(int(data["states"]), int(data["neutral"]), int(data["zero"]),
                       int(data["one"]), np.asarray(data["delta"], dtype=np.int64))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed rule: {exc}") from exc

    @classmethod
    def from_function(cls, states: int, neutral: int, zero: int, one: int, fn) -> "CARule":
        delta = [fn(a, b, c) for a in range(states) for b in range(states) for c in range(states)]
        return cls(states, neutral, zero, one, np.asarray(delta))


def identity_rule(states: int = 3) -> CARule:
    """Every cell keeps its state; states 0, 1 are the bits and 2 is neutral."""
    return CARule.from_function(states, states - 1, 0, 1, lambda l, c, r: c)


@dataclass(frozen=True)
class Configuration:
    """Finite window of a biinfinite configuration; cells outside are neutral."""
    offset: int
    cells: tuple[int, ...]

    def state(self, c: int, neutral: int) -> int:
        i = c - self.offset
        return self.cells[i] if 0 <= i < len(self.cells) else neutral


def ca_run(rule: CARule, initial: Sequence[int], steps: int, *, bits: bool = False) -> list[Configuration]:
    """Synchronous run; returns the configuration at times ``0 .. steps``.

    ``initial`` is a list of states for cells ``0 ..``; with ``bits=True`` it
    is a bit string mapped through ``rule.zero`` / ``rule.one``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    init = rule.encode_bits(initial) if bits else [int(s) for s in initial]
    if any(not 0 <= s < rule.states for s in init):
        raise ShapeError("initial configuration has invalid states")
    neutral = rule.neutral
    cur = np.asarray(init, dtype=np.int64)
    offset = 0
    trace = [Configuration(0, tuple(init))]
    delta = rule.delta.astype(np.int64)
    s = rule.states
    for _ in range(steps):
        padded = np.concatenate(([neutral, neutral], cur, [neutral, neutral]))
        nxt = delta[(padded[:-2] * s + padded[1:-1]) * s + padded[2:]]
        offset -= 1
        # trim neutral margins so the window only grows where something happens
        nz = np.flatnonzero(nxt != neutral)
        if nz.size:
            nxt = nxt[nz[0]:nz[-1] + 1]
            offset += int(nz[0])
        else:
            nxt = nxt[:0]
        cur = nxt
        trace.append(Configuration(offset, tuple(int(v) for v in cur)))
    return trace


def format_trace(trace: Sequence[Configuration], neutral: int) -> str:
    """Text dump: a header with the common window, then one row per time step."""
    lo = min((c.offset for c in trace if c.cells), default=0)
    hi = max((c.offset + len(c.cells) for c in trace if c.cells), default=0)
    lines = [f"# offset {lo} width {hi - lo}"]
    for conf in trace:
        lines.append(" ".join(str(conf.state(c, neutral)) for c in range(lo, hi)))
    return "\n".join(lines) + "\n"


# -- triangle circuits ---------------------------------------------------------

_SEED_CELL_SHIFT = 1 << 20


@dataclass(frozen=True, eq=False)
class TriangleCircuit:
    """Per-vertex transition tables on the cone below the output point.

    Exactly one source of vertex tables is used: ``uniform`` (a rule used
    everywhere), ``vertices`` (explicit ``{(cell, time): table}``), or
    ``seed`` (table of vertex ``(c, tau)`` drawn from
    ``numpy.random.default_rng([seed, tau, c + 2**20])``).
    ``input_states`` optionally gives, per input cell, the states for bit 0
    and bit 1; by default every cell uses ``(zero, one)``.
    """
    n: int
    height: int
    sigma: int
    neutral: int = 0
    zero: int = 0
    one: int = 1
    seed: int | None = None
    vertices: dict | None = field(default=None, repr=False)
    uniform: CARule | None = field(default=None, repr=False)
    input_states: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.height < 0 or self.sigma < 1:
            raise ShapeError("bad circuit dimensions")
        if sum(x is not None for x in (self.seed, self.vertices, self.uniform)) != 1:
            raise ShapeError("give exactly one of seed, vertices, uniform")
        if self.uniform is not None and self.uniform.states != self.sigma:
            raise ShapeError("uniform rule has a different state count")
        if self.vertices is not None:
            size = self.sigma ** 3
            for key, table in self.vertices.items():
                if len(table) != size:
                    raise ShapeError(f"vertex {key} table must have {size} entries")
        if self.input_states is not None and len(self.input_states) != self.n:
            raise ShapeError("input_states needs one pair per input cell")
        object.__setattr__(self, "_cache", {})

    @classmethod
    def random(cls, n: int, height: int, sigma: int, seed: int) -> "TriangleCircuit":
        neutral = sigma - 1 if sigma >= 3 else 0
        return cls(n, height, sigma, neutral=neutral, zero=0, one=1 % sigma, seed=seed)

    @classmethod
    def from_rule(cls, rule: CARule, n: int, height: int, input_states=None) -> "TriangleCircuit":
        return cls(n, height, rule.states, rule.neutral, rule.zero, rule.one,
                   uniform=rule, input_states=input_states)

    @property
    def output_cell(self) -> int:
        return asap_schedule(self.n)[0]

    def cone(self, tau: int) -> range:
        """Cells at time ``tau`` that feed the output vertex."""
        c = self.output_cell
        return range(c - self.height + tau, c + self.height - tau + 1)

    def vertex_table(self, cell: int, tau: int) -> np.ndarray:
        key = (cell, tau)
        cache = self._cache
        if key in cache:
            return cache[key]
        if self.uniform is not None:
            table = self.uniform.delta.astype(np.int64)
        elif self.vertices is not None:
            if key not in self.vertices:
                raise ShapeError(f"no transition table for vertex {key}")
            table = np.asarray(self.vertices[key], dtype=np.int64)
        else:
            rng = np.random.default_rng([self.seed, tau, cell + _SEED_CELL_SHIFT])
            table = rng.integers(0, self.sigma, size=self.sigma ** 3, dtype=np.int64)
        cache[key] = table
        return table

    def encode(self, bits: np.ndarray) -> np.ndarray:
        """Input rows (batch x cone width at time 0) for a batch of bit vectors."""
        bits = np.atleast_2d(np.asarray(bits, dtype=np.int64))
        if bits.shape[1] != self.n:
            raise ShapeError(f"circuit expects {self.n} input bits")
        cells = self.cone(0)
        row = np.full((bits.shape[0], len(cells)), self.neutral, dtype=np.int64)
        for j, c in enumerate(cells):
            if 0 <= c < self.n:
                if self.input_states is None:
                    s0, s1 = self.zero, self.one
                else:
                    s0, s1 = self.input_states[c]
                row[:, j] = np.where(bits[:, c] == 1, s1, s0)
        return row

    def step_rows(self, row: np.ndarray, tau_from: int, tau_to: int, first_cell: int) -> np.ndarray:
        """Advance a batch of rows; ``row[:, 0]`` sits at ``first_cell`` at ``tau_from``."""
        s = self.sigma
        for tau in range(tau_from + 1, tau_to + 1):
            first_cell += 1
            width = row.shape[1] - 2
            nxt = np.empty((row.shape[0], width), dtype=np.int64)
            idx = (row[:, :-2] * s + row[:, 1:-1]) * s + row[:, 2:]
            for j in range(width):
                nxt[:, j] = self.vertex_table(first_cell + j, tau)[idx[:, j]]
            row = nxt
        return row

    def to_json(self) -> dict:
        base = {"n": self.n, "t": self.height, "sigma": self.sigma,
                "neutral": self.neutral, "zero": self.zero, "one": self.one}
        if self.seed is not None:
            base["seed"] = self.seed
        elif self.vertices is not None:
            base["vertices"] = [{"cell": c, "time": t, "delta": list(map(int, tab))}
                                for (c, t), tab in sorted(self.vertices.items())]
        else:
            base["vertices"] = [{"cell": c, "time": t, "delta": self.uniform.delta.tolist()}
                                for t in range(1, self.height + 1) for c in self.cone(t)]
        return base

    @classmethod
    def from_json(cls, data: dict) -> "TriangleCircuit":
        try:
            n, height, sigma = int(data["n"]), int(data["t"]), int(data["sigma"])
            neutral = int(data.get("neutral", sigma - 1 if sigma >= 3 else 0))
            zero, one = int(data.get("zero", 0)), int(data.get("one", 1 % sigma))
            if "seed" in data:
                return cls(n, height, sigma, neutral, zero, one, seed=int(data["seed"]))
            verts = {(int(v["cell"]), int(v["time"])): list(v["delta"]) for v in data["vertices"]}
            return cls(n, height, sigma, neutral, zero, one, vertices=verts)
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed circuit: {exc}") from exc


def all_inputs(n: int) -> np.ndarray:
    """Every ``n``-bit input, row ``i`` being ``i`` in big-endian bits."""
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    return (idx >> np.arange(n - 1, -1, -1, dtype=np.int64)) & 1


def triangle_rows(circuit: TriangleCircuit, bits) -> list[np.ndarray]:
    """Rows of the cone at every time, batched over inputs."""
    row = circuit.encode(bits)
    rows = [row]
    first = circuit.cone(0).start
    for tau in range(1, circuit.height + 1):
        row = circuit.step_rows(row, tau - 1, tau, first + tau - 1)
        rows.append(row)
    return rows


def triangle_run(circuit: TriangleCircuit, bits) -> int | np.ndarray:
    """Output state at ``(output_cell, height)``; batched if ``bits`` is 2-D."""
    arr = np.asarray(bits)
    out = triangle_rows(circuit, arr)[-1][:, 0]
    return int(out[0]) if arr.ndim == 1 else out


def circuit_function(circuit: TriangleCircuit, k: int, f: int) -> TernaryFunction:
    """The circuit's outputs as a ternary function on ``B^k x B^f x B^k``."""
    n = 2 * k + f
    if circuit.n != n:
        raise ShapeError(f"circuit has {circuit.n} inputs, expected {n}")
    outs = triangle_run(circuit, all_inputs(n))
    return TernaryFunction(k, f, k, state_width(circuit.sigma), outs)


def extract_decomposition(circuit: TriangleCircuit, k: int, f: int, delay: int = 0) -> DecompositionCertificate:
    """Read a certificate off the row ``k + delay`` steps below the output.

    That row spans ``2(k + delay) + 1`` cells: the left ``k + delay + 1``
    (middle cell included) form ``a(x, y)``, the right ``k + delay`` form
    ``b(y, z)``, and ``t`` is the sub-triangle above them.  Each state is
    packed into ``state_width(sigma)`` bits, leftmost cell most significant.
    """
    if f < 1:
        raise ShapeError("the middle block must be non-empty (f >= 1)")
    if k < 1 or delay < 0:
        raise ShapeError("need k >= 1 and delay >= 0")
    n = 2 * k + f
    if circuit.n != n:
        raise ShapeError(f"circuit has {circuit.n} inputs, expected {n}")
    c_out, t_out = asap_schedule(n)
    H = t_out + delay
    if circuit.height != H:
        raise ShapeError(f"circuit height must be {H} for delay {delay}")
    tau0 = t_out - k
    half = k + delay
    # light cones: the rightmost a-cell sees inputs up to n-1-k, the leftmost b-cell from k on
    assert c_out + tau0 < n - k and c_out + 1 - tau0 >= k

    inputs = all_inputs(n)
    row = triangle_rows(circuit, inputs)[tau0]
    first = circuit.cone(tau0).start
    assert first == c_out - half and row.shape[1] == 2 * half + 1
    w = state_width(circuit.sigma)
    a_cells, b_cells = row[:, :half + 1], row[:, half + 1:]

    def pack(states):
        code = np.zeros(states.shape[0], dtype=np.int64)
        for j in range(states.shape[1]):
            code = (code << w) | states[:, j]
        return code

    a_code = pack(a_cells).reshape(1 << (k + f), 1 << k)  # [x*2^f + y, z]
    b_code = pack(b_cells).reshape(1 << k, 1 << (f + k))  # [x, y*2^k + z]
    if not (a_code == a_code[:, :1]).all() or not (b_code == b_code[:1, :]).all():
        raise AssertionError("extracted messages depend on the far argument")
    u, v = (half + 1) * w, half * w

    width = 2 * half + 1
    sigma = circuit.sigma
    combos = np.array(list(itertools.product(range(sigma), repeat=width)), dtype=np.int64)
    outs = circuit.step_rows(combos, tau0, H, first)[:, 0]
    t = np.zeros(1 << (u + v), dtype=np.int64)
    t[pack(combos)] = outs
    return DecompositionCertificate(u, v, a_code[:, 0], b_code[0, :], t)


@dataclass(frozen=True)
class StateBound:
    k: int
    delay: int
    width: int
    dc_lower: int
    sigma: int

    def to_json(self) -> dict:
        return {"k": self.k, "delay": self.delay, "row_width": self.width,
                "dc_lower": self.dc_lower, "min_states": self.sigma}


def min_state_bound(k: int, delay: int = 0) -> StateBound:
    """Fewest states an ASAP(+delay) circuit for indexing at ``k`` could use.

    The extracted row has ``W = 2k + 2 delay + 1`` cells, so the pairs
    ``(a_y, b_y)`` take at most ``sigma^(W 2^k)`` values, while there are
    ``2^(2^(2k))`` matrices ``y``: ``sigma^W >= 2^(2^k)``.
    """
    if k < 1 or delay < 0:
        raise ValueError("need k >= 1 and delay >= 0")
    W = 2 * k + 2 * delay + 1
    target = 1 << (1 << k)
    lo, hi = 1, 2
    while hi ** W < target:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** W >= target:
            hi = mid
        else:
            lo = mid
    sigma = hi if lo ** W < target else lo
    return StateBound(k, delay, W, 1 << k, sigma)


# -- linear-time automaton for indexing ----------------------------------------
#
# Input: typed cells  X(x_1..x_k) Y(y_0 .. y_{N-1}) Z(z_1..z_k),  N = 4^k, with y
# in row-major order so that y(x, z) sits at Y-position j = x*2^k + z.
#
# The x and z bits become right-moving items (x_1 carries a tail mark).  The
# last Z cell is a wall that turns each arriving item around, so the left-moving
# stream is z_k .. z_1 x_k .. x_1: the number j, least significant bit first.
# Y cells stay closed until the x tail has passed, which keeps the two streams
# from crossing inside Y.  Each open Y cell adds one to the passing number with a
# serial carry; cell i has then seen j - i, so the carry overflows past the last
# bit exactly at i = j.  That cell emits its y bit, which walks right to the wall
# and settles there as ANS0 / ANS1.  Everything moves one cell per step, so the
# answer appears at cell n-1 within a constant times n steps.

INDEXING_C_LIN = 4

_EMPTY = 0


def _item(bit: int, tail: int) -> int:
    return 1 + bit + 2 * tail


def _item_bit(item: int) -> int:
    return (item - 1) & 1


def _item_tail(item: int) -> int:
    return (item - 1) >> 1


def _indexing_states() -> list[tuple]:
    items = range(5)
    states = [("N",)]
    states += [("IX", b) for b in (0, 1)] + [("IY", b) for b in (0, 1)] + [("IZ", b) for b in (0, 1)]
    states += [("X", i) for i in items]
    states += [("Yc", b, i) for b in (0, 1) for i in items]
    states += [("Yi", b, i) for b in (0, 1) for i in items]
    states += [("Ya", b, i) for b in (0, 1) for i in items]
    states += [("Yd", i) for i in items]
    states += [("RES", b) for b in (0, 1)]
    states += [("Z", i, j) for i in items for j in items]
    states += [("ANS", b) for b in (0, 1)]
    return states


_R_KINDS = ("X", "Yc", "Z")
_L_KINDS = ("Yi", "Ya", "Yd", "Z")


def _r_slot(s: tuple) -> int:
    return s[-1] if s[0] in ("X", "Yc") else (s[1] if s[0] == "Z" else _EMPTY)


def _l_slot(s: tuple) -> int:
    return s[-1] if s[0] in ("Yi", "Ya", "Yd") or s[0] == "Z" else _EMPTY


def _accepts_r(s: tuple) -> bool:
    return s[0] in _R_KINDS and _r_slot(s) == _EMPTY


def _accepts_l(s: tuple) -> bool:
    return s[0] == "X" or (s[0] in _L_KINDS and _l_slot(s) == _EMPTY)


def _is_wall(s: tuple, right: tuple) -> bool:
    return s[0] == "Z" and right[0] == "N"


def _r_leaves(s: tuple, right: tuple) -> bool:
    return _r_slot(s) != _EMPTY and not _is_wall(s, right) and _accepts_r(right)


def _incoming_r(left: tuple, s: tuple) -> int:
    if left[0] in _R_KINDS and _r_slot(left) != _EMPTY and _accepts_r(s):
        return _r_slot(left)
    return _EMPTY


def _carry_in(s: tuple) -> int:
    return 0 if s[0] == "Yd" else 1


def _processed(s: tuple, item: int) -> int:
    """Item as it leaves cell ``s`` to the left, after the cell's increment."""
    if s[0] == "Z":
        return item
    return _item(_item_bit(item) ^ _carry_in(s), _item_tail(item))


def _incoming_l(s: tuple, right: tuple) -> int:
    item = _l_slot(right)
    if item != _EMPTY and right[0] in _L_KINDS and _accepts_l(s):
        return _processed(right, item)
    return _EMPTY


def _indexing_delta(left: tuple, s: tuple, right: tuple) -> tuple:
    kind = s[0]
    if kind in ("N", "ANS"):
        return s
    if kind == "IX":
        return ("X", _item(s[1], int(left[0] == "N")))
    if kind == "IY":
        return ("Yc", s[1], _EMPTY)
    if kind == "IZ":
        return ("Z", _item(s[1], 0), _EMPTY)
    if kind == "RES":
        return ("Yd", _EMPTY)

    if left[0] == "RES" and (kind == "Yd" or kind == "Z") and _l_slot(s) == _EMPTY and _r_slot(s) == _EMPTY:
        return ("ANS", left[1]) if _is_wall(s, right) else ("RES", left[1])

    if kind in ("X", "Yc"):
        own = _r_slot(s)
        new = _incoming_r(left, s) if own == _EMPTY else (_EMPTY if _r_leaves(s, right) else own)
        if kind == "X":
            return ("X", new)
        if own != _EMPTY and _item_tail(own) and new == _EMPTY:
            return ("Yi", s[1], _EMPTY)
        return ("Yc", s[1], new)

    if kind == "Z":
        own_r, own_l = s[1], s[2]
        l_new = own_l
        if own_l != _EMPTY and _accepts_l(left):
            l_new = _EMPTY
        r_new = own_r
        if own_r == _EMPTY:
            r_new = _incoming_r(left, s)
        elif _is_wall(s, right):
            if own_l == _EMPTY:
                r_new, l_new = _EMPTY, own_r
        elif _r_leaves(s, right):
            r_new = _EMPTY
        if own_l == _EMPTY and not _is_wall(s, right):
            l_new = _incoming_l(s, right)
        return ("Z", r_new, l_new)

    # open Y cells: Yi (no item seen yet), Ya (carry 1), Yd (carry 0)
    own = _l_slot(s)
    if own != _EMPTY:
        if not _accepts_l(left):
            return s
        c = _carry_in(s)
        c_out = _item_bit(own) & c
        if _item_tail(own):
            return ("RES", s[1]) if c_out else ("Yd", _EMPTY)
        if kind == "Yd" or not c_out:
            return ("Yd", _EMPTY)
        return ("Ya", s[1], _EMPTY)
    incoming = _incoming_l(s, right)
    if kind == "Yd":
        return ("Yd", incoming)
    return (kind, s[1], incoming)


@dataclass(frozen=True, eq=False)
class IndexingCA:
    """The uniform rule plus its input encoding and read-off point."""
    k: int
    rule: CARule
    names: tuple = field(repr=False)
    c_lin: int = INDEXING_C_LIN

    @property
    def n(self) -> int:
        return 2 * self.k + (1 << (2 * self.k))

    @property
    def output_cell(self) -> int:
        return self.n - 1

    @property
    def steps(self) -> int:
        return self.c_lin * self.n

    def state_id(self, name: tuple) -> int:
        return self.names.index(name)

    def input_states(self) -> tuple:
        """Per input cell, the states encoding bit 0 and bit 1."""
        ids = {name: i for i, name in enumerate(self.names)}
        k, N = self.k, 1 << (2 * self.k)
        kinds = ["IX"] * k + ["IY"] * N + ["IZ"] * k
        return tuple((ids[(kind, 0)], ids[(kind, 1)]) for kind in kinds)

    def encode(self, x: int, y: Sequence[int], z: int) -> list[int]:
        k, N = self.k, 1 << (2 * self.k)
        if isinstance(y, str):
            y = [int(ch) for ch in y]
        if len(y) != N or not (0 <= x < (1 << k) and 0 <= z < (1 << k)):
            raise ShapeError(f"indexing at k={k} takes x, z < {1 << k} and {N} y bits")
        bits = [(x >> (k - 1 - i)) & 1 for i in range(k)] + [int(b) & 1 for b in y]
        bits += [(z >> (k - 1 - i)) & 1 for i in range(k)]
        return self.encode_bits(bits)

    def encode_bits(self, bits: Sequence[int]) -> list[int]:
        pairs = self.input_states()
        return [pairs[i][int(b)] for i, b in enumerate(bits)]

    def answer(self, state: int) -> int | None:
        if state == self.rule.zero:
            return 0
        if state == self.rule.one:
            return 1
        return None


def indexing_ca_build(k: int) -> IndexingCA:
    """Linear-time automaton for ``y(x, z)``; the rule itself does not depend on ``k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return IndexingCA(k, _indexing_rule(), tuple(_indexing_states()))


_RULE_CACHE: list = []


def _indexing_rule() -> CARule:
    if not _RULE_CACHE:
        names = _indexing_states()
        ids = {name: i for i, name in enumerate(names)}

        def fn(a, b, c):
            return ids[_indexing_delta(names[a], names[b], names[c])]

        _RULE_CACHE.append(CARule.from_function(
            len(names), ids[("N",)], ids[("ANS", 0)], ids[("ANS", 1)], fn))
    return _RULE_CACHE[0]


def simulate_batch(rule: CARule, initial: np.ndarray, steps: int, cell: int) -> np.ndarray:
    """Run many equal-length configurations at once; returns (batch, steps+1) states of ``cell``.

    Configurations are padded with one neutral cell per side per step so the
    window never clips.
    """
    initial = np.atleast_2d(np.asarray(initial, dtype=np.int64))
    s = rule.states
    pad = steps + 1
    row = np.full((initial.shape[0], initial.shape[1] + 2 * pad), rule.neutral, dtype=np.int64)
    row[:, pad:pad + initial.shape[1]] = initial
    delta = rule.delta.astype(np.int64)
    hist = np.empty((initial.shape[0], steps + 1), dtype=np.int64)
    hist[:, 0] = row[:, pad + cell]
    for t in range(1, steps + 1):
        row[:, 1:-1] = delta[(row[:, :-2] * s + row[:, 1:-1]) * s + row[:, 2:]]
        hist[:, t] = row[:, pad + cell]
    return hist


@dataclass(frozen=True)
class IndexingReport:
    k: int
    inputs: int
    correct: int
    max_steps: int
    bound: int
    states: int

    @property
    def ok(self) -> bool:
        return self.correct == self.inputs and self.max_steps <= self.bound

    def to_json(self) -> dict:
        return {"k": self.k, "inputs": self.inputs, "correct": self.correct,
                "max_steps": self.max_steps, "step_bound": self.bound,
                "states": self.states, "ok": self.ok}


def check_indexing_ca(k: int, samples: int | None = None, seed: int = 0, chunk: int = 1 << 14) -> IndexingReport:
    """Simulate the indexing automaton on all inputs, or on ``samples`` random ones.

    An input counts as correct when cell ``n-1`` reaches an answer state
    within ``c_lin * n`` steps, that state equals ``y(x, z)``, and it never
    changes afterwards.
    """
    ca = indexing_ca_build(k)
    n = ca.n
    total = 1 << n if n < 63 else None
    count = total if samples is None else samples
    if count is None:
        raise ValueError(f"exhaustive check impossible at n={n}")
    rng = np.random.default_rng(seed)
    pairs = np.asarray(ca.input_states(), dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    correct, worst = 0, 0
    for start in range(0, count, chunk):
        size = min(chunk, count - start)
        if samples is None:
            block = np.arange(start, start + size, dtype=np.int64)
            bits = (block[:, None] >> shifts) & 1
        else:
            bits = rng.integers(0, 2, size=(size, n), dtype=np.int64)
        init = pairs[np.arange(n), bits]
        hist = simulate_batch(ca.rule, init, ca.steps, ca.output_cell)
        x = bits[:, :k] @ weights
        z = bits[:, n - k:] @ weights
        want = bits[np.arange(size), k + ((x << k) | z)]
        want_state = np.where(want == 1, ca.rule.one, ca.rule.zero)
        is_answer = (hist == ca.rule.zero) | (hist == ca.rule.one)
        first = np.where(is_answer.any(axis=1), is_answer.argmax(axis=1), ca.steps + 1)
        stable = (hist == want_state[:, None]) | ~np.cumsum(is_answer, axis=1).astype(bool)
        ok = (first <= ca.steps) & (hist[:, -1] == want_state) & stable.all(axis=1)
        correct += int(ok.sum())
        worst = max(worst, int(first.max()))
    return IndexingReport(k, count, correct, worst, ca.steps, ca.rule.states)
