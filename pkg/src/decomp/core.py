"""Truth tables of ternary functions and decomposition certificates.

A ternary function ``T: B^p x B^q x B^r -> B^s`` is stored as a flat array of
``2^(p+q+r)`` output values.  Bit strings are big-endian throughout: the string
``s_0 ... s_{k-1}`` has integer value ``sum s_i * 2^(k-1-i)``.  The input triple
``(x, y, z)`` lives at index ``(x * 2^q + y) * 2^r + z``.

A certificate ``(u, v, a, b, t)`` claims ``T(x, y, z) = t(a(x, y), b(y, z))``
with ``a`` indexed by ``x * 2^q + y``, ``b`` by ``y * 2^r + z`` and ``t`` by
``alpha * 2^v + beta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

MAX_INPUT_BITS = 30

FAMILIES = ("xor", "equality", "indexing", "xor-indexing", "add-indexing", "constant", "random")


class ShapeError(ValueError):
    """Widths of a function, input or certificate do not fit together."""


def _frozen(values, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _value_dtype(s: int):
    if s <= 8:
        return np.uint8
    if s <= 16:
        return np.uint16
    if s <= 32:
        return np.uint32
    return np.uint64


@dataclass(frozen=True, eq=False)
class TernaryFunction:
    p: int
    q: int
    r: int
    s: int
    values: np.ndarray = field(repr=False)
    max_bits: int = field(default=MAX_INPUT_BITS, repr=False)

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0 or self.s < 1:
            raise ShapeError(f"bad widths p={self.p} q={self.q} r={self.r} s={self.s}")
        if self.n > self.max_bits:
            raise ShapeError(f"p+q+r = {self.n} exceeds the ceiling {self.max_bits}")
        if self.s > 64:
            raise ShapeError("output width above 64 bits is not supported")
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.n,):
            raise ShapeError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if vals.size and (vals.min() < 0 or int(vals.max()) >= (1 << self.s)):
            raise ShapeError(f"values outside [0, 2^{self.s})")
        object.__setattr__(self, "values", _frozen(vals, _value_dtype(self.s)))

    @property
    def n(self) -> int:
        return self.p + self.q + self.r

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.p, self.q, self.r

    def index(self, x: int, y: int, z: int) -> int:
        return (x << (self.q + self.r)) | (y << self.r) | z

    def split_index(self, idx: int) -> tuple[int, int, int]:
        return idx >> (self.q + self.r), (idx >> self.r) & ((1 << self.q) - 1), idx & ((1 << self.r) - 1)

    def __call__(self, x, y, z) -> int:
        return evaluate(self, x, y, z)

    def __eq__(self, other):
        if not isinstance(other, TernaryFunction):
            return NotImplemented
        return (self.shape, self.s) == (other.shape, other.s) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.shape, self.s, self.values.tobytes()))

    def mirror(self) -> "TernaryFunction":
        """Swap the roles of x and z (p <-> r)."""
        cube = self.values.reshape(1 << self.p, 1 << self.q, 1 << self.r)
        return TernaryFunction(self.r, self.q, self.p, self.s, cube.transpose(2, 1, 0).reshape(-1))

    def bitstring(self) -> str:
        fmt = f"0{self.s}b"
        return "".join(format(int(v), fmt) for v in self.values)

    @classmethod
    def from_bitstring(cls, p: int, q: int, r: int, s: int, bits: str) -> "TernaryFunction":
        size = 1 << (p + q + r)
        if len(bits) != size * s or set(bits) - {"0", "1"}:
            raise ShapeError(f"table must be a 0/1 string of length {size * s}")
        vals = [int(bits[i * s:(i + 1) * s], 2) for i in range(size)]
        return cls(p, q, r, s, np.array(vals, dtype=np.uint64))


def _as_int(value, width: int, name: str) -> int:
    if isinstance(value, str):
        if len(value) != width or set(value) - {"0", "1"}:
            raise ShapeError(f"{name} must be a {width}-bit string, got {value!r}")
        return int(value, 2) if width else 0
    if isinstance(value, (tuple, list)):
        if len(value) != width:
            raise ShapeError(f"{name} must have {width} bits")
        out = 0
        for bit in value:
            out = (out << 1) | (int(bit) & 1)
        return out
    value = int(value)
    if not 0 <= value < (1 << width):
        raise ShapeError(f"{name}={value} does not fit in {width} bits")
    return value


def evaluate(T: TernaryFunction, x, y, z) -> int:
    """Look up ``T(x, y, z)``; arguments are ints, bit strings or bit tuples."""
    xi = _as_int(x, T.p, "x")
    yi = _as_int(y, T.q, "y")
    zi = _as_int(z, T.r, "z")
    return int(T.values[T.index(xi, yi, zi)])


@dataclass(frozen=True, eq=False)
class DecompositionCertificate:
    u: int
    v: int
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.u < 0 or self.v < 0:
            raise ShapeError("message widths must be non-negative")
        if self.u + self.v > 40:
            raise ShapeError("u+v above 40 would need an impossible t-table")
        for name, width in (("a", self.u), ("b", self.v)):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.ndim != 1:
                raise ShapeError(f"{name} must be one-dimensional")
            if arr.size and (arr.min() < 0 or arr.max() >= (1 << width)):
                raise ShapeError(f"{name} has entries outside [0, 2^{width})")
            object.__setattr__(self, name, _frozen(arr))
        t = np.asarray(self.t, dtype=np.int64)
        if t.shape != (1 << (self.u + self.v),):
            raise ShapeError(f"t must have {1 << (self.u + self.v)} entries")
        if t.size and t.min() < 0:
            raise ShapeError("t has negative entries")
        object.__setattr__(self, "t", _frozen(t))

    @property
    def size(self) -> int:
        return self.u + self.v

    def check_shape(self, T: TernaryFunction) -> None:
        if self.a.size != 1 << (T.p + T.q):
            raise ShapeError(f"a has {self.a.size} entries, expected {1 << (T.p + T.q)}")
        if self.b.size != 1 << (T.q + T.r):
            raise ShapeError(f"b has {self.b.size} entries, expected {1 << (T.q + T.r)}")
        if self.t.size and self.t.max() >= (1 << T.s):
            raise ShapeError(f"t has values outside [0, 2^{T.s})")

    def __eq__(self, other):
        if not isinstance(other, DecompositionCertificate):
            return NotImplemented
        return (self.u, self.v) == (other.u, other.v) and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in "abt")

    def __hash__(self):
        return hash((self.u, self.v, self.a.tobytes(), self.b.tobytes(), self.t.tobytes()))


def _index_grid(T: TernaryFunction):
    idx = np.arange(1 << T.n, dtype=np.int64)
    return idx >> T.r, idx & ((1 << (T.q + T.r)) - 1)


def predictions(T: TernaryFunction, D: DecompositionCertificate) -> np.ndarray:
    """Values ``t(a(x,y), b(y,z))`` over all inputs, in table order."""
    D.check_shape(T)
    a_idx, b_idx = _index_grid(T)
    return D.t[(D.a[a_idx] << D.v) | D.b[b_idx]]


def verify_certificate(T: TernaryFunction, D: DecompositionCertificate) -> bool:
    return bool(np.array_equal(predictions(T, D), T.values))


def first_counterexample(T: TernaryFunction, D: DecompositionCertificate):
    """Smallest ``(x, y, z)`` where the certificate disagrees with ``T``, or None."""
    bad = np.flatnonzero(predictions(T, D) != T.values)
    if bad.size == 0:
        return None
    return T.split_index(int(bad[0]))


def agreement(T: TernaryFunction, D: DecompositionCertificate) -> Fraction:
    hits = int(np.count_nonzero(predictions(T, D) == T.values))
    return Fraction(hits, 1 << T.n)


def trivial_certificate(T: TernaryFunction) -> DecompositionCertificate:
    """``a = <x, y>``, ``b = z``, ``t`` is ``T`` itself."""
    return DecompositionCertificate(
        T.p + T.q, T.r,
        np.arange(1 << (T.p + T.q)),
        np.arange(1 << (T.q + T.r)) & ((1 << T.r) - 1),
        np.asarray(T.values, dtype=np.int64),
    )


@dataclass(frozen=True)
class FamilySpec:
    name: str
    k: int | None = None
    p: int | None = None
    q: int | None = None
    r: int | None = None
    seed: int = 0
    value: int = 0

    def shape(self) -> tuple[int, int, int]:
        if self.name in ("indexing", "xor-indexing", "add-indexing"):
            if self.k is None or self.k < 1:
                raise ShapeError(f"family {self.name} needs k >= 1")
            k = self.k
            return (k, 1 << (2 * k), k) if self.name == "indexing" else (k, 1 << k, k)
        if self.k is not None and self.p is None and self.r is None:
            p, q, r = self.k, 0, self.k
        else:
            p, q, r = self.p, self.q, self.r
        p, q, r = (0 if w is None else w for w in (p, q, r))
        if self.name == "equality" and p != r:
            raise ShapeError("equality needs p == r")
        return p, q, r


def _parity(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    shift = 32
    while shift:
        a ^= a >> shift
        shift >>= 1
    return a & 1


def make_family(spec: FamilySpec, max_bits: int = MAX_INPUT_BITS) -> TernaryFunction:
    """Build one of the named predicate families as a full truth table."""
    if spec.name not in FAMILIES:
        raise ShapeError(f"unknown family {spec.name!r}; choose from {', '.join(FAMILIES)}")
    p, q, r = spec.shape()
    if min(p, q, r) < 0:
        raise ShapeError("widths must be non-negative")
    n = p + q + r
    if n > max_bits:
        raise ShapeError(f"family needs {n} input bits, ceiling is {max_bits}")
    if spec.name == "random":
        return random_predicate(p, q, r, spec.seed, max_bits=max_bits)
    if spec.name == "constant":
        if spec.value not in (0, 1):
            raise ShapeError("constant value must be 0 or 1")
        return TernaryFunction(p, q, r, 1, np.full(1 << n, spec.value, dtype=np.uint8), max_bits)

    idx = np.arange(1 << n, dtype=np.uint64)
    x = idx >> np.uint64(q + r)
    y = (idx >> np.uint64(r)) & np.uint64((1 << q) - 1)
    z = idx & np.uint64((1 << r) - 1)
    if spec.name == "xor":
        vals = _parity(idx)
    elif spec.name == "equality":
        vals = (x == z).astype(np.uint8)
    else:
        k = spec.k
        if spec.name == "indexing":
            pos = (x << np.uint64(k)) | z
        elif spec.name == "xor-indexing":
            pos = x ^ z
        else:
            pos = (x + z) & np.uint64((1 << k) - 1)
        # bit at string position pos of the q-bit string y
        vals = (y >> (np.uint64(q - 1) - pos)) & np.uint64(1)
    return TernaryFunction(p, q, r, 1, vals.astype(np.uint8), max_bits)


def random_predicate(p: int, q: int, r: int, seed: int, max_bits: int = MAX_INPUT_BITS) -> TernaryFunction:
    """Uniform random predicate from ``numpy.random.default_rng(seed)`` (PCG64)."""
    n = p + q + r
    if n > max_bits:
        raise ShapeError(f"p+q+r = {n} exceeds the ceiling {max_bits}")
    rng = np.random.default_rng(seed)
    return TernaryFunction(p, q, r, 1, rng.integers(0, 2, size=1 << n, dtype=np.uint8), max_bits)


def from_callable(p: int, q: int, r: int, s: int, fn) -> TernaryFunction:
    """Tabulate ``fn(x, y, z)`` (ints in, int out) over every input."""
    vals = [fn(x, y, z) for x in range(1 << p) for y in range(1 << q) for z in range(1 << r)]
    return TernaryFunction(p, q, r, s, np.array(vals, dtype=np.uint64))


def certificate_from_lists(u: int, v: int, a: Sequence[int], b: Sequence[int], t: Sequence[int]):
    return DecompositionCertificate(u, v, np.asarray(a), np.asarray(b), np.asarray(t))
