"""Multilinear polynomials over GF(2) and the three-message xor-indexing protocol.

Monomials are bitmasks over the same bit positions as the evaluation point:
the variable ``u_1`` is the most significant bit of a ``k``-bit point, ``u_k``
the least significant, so monomial ``m`` is 1 at point ``w`` iff
``w & m == m``.  Polynomials in ``2k`` variables ``X_1..X_k, Z_1..Z_k`` store
each monomial as a pair ``(xmask, zmask)``.

Protocol for ``y(x xor z)`` with ``d = floor(2k/3)`` and ``f = floor(k/3)``:

* A sends ``x``, the coefficients of the degree ``> d`` part of ``y``, and the
  coefficients of ``Z -> y_zlow(x, Z)`` (degree ``<= f``);
* B sends ``z`` and the coefficients of ``X -> y_xlow(X, z)`` (degree ``<= f``);
* the referee adds up the three evaluations.

Coefficient lists are in ascending mask order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np


class PolyError(ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class AnfPolynomial:
    k: int
    monomials: frozenset

    def __post_init__(self):
        mons = frozenset(int(m) for m in self.monomials)
        if any(m < 0 or m >= (1 << self.k) for m in mons):
            raise PolyError(f"monomial mask out of range for k={self.k}")
        object.__setattr__(self, "monomials", mons)

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.monomials), default=-1)

    def __call__(self, point: int) -> int:
        return eval_anf(self, point)

    def truth_table(self) -> np.ndarray:
        coeffs = np.zeros(1 << self.k, dtype=np.uint8)
        coeffs[sorted(self.monomials)] = 1
        return _mobius(coeffs)

    def to_json(self) -> dict:
        return {"k": self.k, "monomials": sorted(self.monomials)}

    @classmethod
    def from_json(cls, data: dict) -> "AnfPolynomial":
        mons = list(data["monomials"])
        if len(set(mons)) != len(mons):
            raise PolyError("duplicate monomials")
        return cls(int(data["k"]), frozenset(mons))


@dataclass(frozen=True)
class Anf2kPolynomial:
    k: int
    monomials: frozenset

    def __post_init__(self):
        lim = 1 << self.k
        mons = frozenset((int(xm), int(zm)) for xm, zm in self.monomials)
        if any(not (0 <= xm < lim and 0 <= zm < lim) for xm, zm in mons):
            raise PolyError(f"monomial mask out of range for k={self.k}")
        object.__setattr__(self, "monomials", mons)

    def __call__(self, x: int, z: int) -> int:
        return eval_anf2k(self, x, z)


def _mobius(arr: np.ndarray) -> np.ndarray:
    """Subset-sum transform over GF(2); it is its own inverse."""
    out = np.array(arr, dtype=np.uint8) & 1
    size = out.size
    step = 1
    while step < size:
        view = out.reshape(-1, 2, step)
        view[:, 1, :] ^= view[:, 0, :]
        step <<= 1
    return out


def anf_from_tt(table: Sequence[int]) -> AnfPolynomial:
    arr = np.asarray(table)
    size = arr.size
    if size == 0 or size & (size - 1):
        raise PolyError(f"truth table length {size} is not a power of two")
    coeffs = _mobius(arr)
    return AnfPolynomial(size.bit_length() - 1, frozenset(np.flatnonzero(coeffs).tolist()))


def eval_anf(P: AnfPolynomial, point: int) -> int:
    if not 0 <= point < (1 << P.k):
        raise PolyError(f"point {point} has more than {P.k} bits")
    acc = 0
    for m in P.monomials:
        if point & m == m:
            acc ^= 1
    return acc


def eval_anf2k(Q: Anf2kPolynomial, x: int, z: int) -> int:
    acc = 0
    for xm, zm in Q.monomials:
        if x & xm == xm and z & zm == zm:
            acc ^= 1
    return acc


def degree_split(P: AnfPolynomial, d: int) -> tuple[AnfPolynomial, AnfPolynomial]:
    if not 0 <= d <= P.k:
        raise PolyError(f"threshold {d} outside [0, {P.k}]")
    low = frozenset(m for m in P.monomials if popcount(m) <= d)
    return AnfPolynomial(P.k, low), AnfPolynomial(P.k, P.monomials - low)


def _submasks(mask: int) -> Iterable[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def xor_substitute(P: AnfPolynomial) -> Anf2kPolynomial:
    """Expand ``P(X xor Z)`` as a polynomial in ``X`` and ``Z``."""
    acc: set = set()
    for s in P.monomials:
        for xm in _submasks(s):
            acc ^= {(xm, s ^ xm)}
    return Anf2kPolynomial(P.k, frozenset(acc))


def xz_degree_split(Q: Anf2kPolynomial, f: int) -> tuple[Anf2kPolynomial, Anf2kPolynomial]:
    """Monomials of X-degree ``<= f`` go left, the rest need Z-degree ``<= f``."""
    xlow, zlow = set(), set()
    for xm, zm in Q.monomials:
        if popcount(xm) <= f:
            xlow.add((xm, zm))
        elif popcount(zm) <= f:
            zlow.add((xm, zm))
        else:
            raise PolyError(f"monomial ({xm:#b}, {zm:#b}) has X- and Z-degree above {f}")
    return Anf2kPolynomial(Q.k, frozenset(xlow)), Anf2kPolynomial(Q.k, frozenset(zlow))


# -- protocol -----------------------------------------------------------------

def thresholds(k: int) -> tuple[int, int]:
    return (2 * k) // 3, k // 3


@lru_cache(maxsize=None)
def _masks_upto(k: int, deg: int) -> tuple[int, ...]:
    return tuple(m for m in range(1 << k) if popcount(m) <= deg)


@lru_cache(maxsize=None)
def _masks_above(k: int, deg: int) -> tuple[int, ...]:
    return tuple(m for m in range(1 << k) if popcount(m) > deg)


@lru_cache(maxsize=256)
def _prepare(k: int, y: tuple[int, ...]):
    d, f = thresholds(k)
    P = anf_from_tt(y)
    low, high = degree_split(P, d)
    xlow, zlow = xz_degree_split(xor_substitute(low), f)
    return high, xlow, zlow


def _check_y(y, k: int) -> tuple[int, ...]:
    if isinstance(y, str):
        y = [int(ch) for ch in y]
    y = tuple(int(b) & 1 for b in y)
    if len(y) != 1 << k:
        raise PolyError(f"y must have 2^{k} = {1 << k} entries, got {len(y)}")
    return y


def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def _restrict(poly: Anf2kPolynomial, fixed: int, fix_x: bool) -> set:
    """Substitute a constant for one block of variables; returns the surviving masks."""
    out: set = set()
    for xm, zm in poly.monomials:
        keep, free = (xm, zm) if fix_x else (zm, xm)
        if fixed & keep == keep:
            out ^= {free}
    return out


@dataclass(frozen=True)
class ProtocolMessageA:
    k: int
    x: int
    y_high: str
    z_poly: str

    @property
    def bits(self) -> str:
        return _bits(self.x, self.k) + self.y_high + self.z_poly

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class ProtocolMessageB:
    k: int
    z: int
    x_poly: str

    @property
    def bits(self) -> str:
        return _bits(self.z, self.k) + self.x_poly

    def __len__(self):
        return len(self.bits)


def protocol_alice(x: int, y, k: int) -> ProtocolMessageA:
    y = _check_y(y, k)
    if not 0 <= x < (1 << k):
        raise PolyError("x out of range")
    d, f = thresholds(k)
    high, _, zlow = _prepare(k, y)
    zpoly = _restrict(zlow, x, fix_x=True)
    return ProtocolMessageA(
        k, x,
        "".join("1" if m in high.monomials else "0" for m in _masks_above(k, d)),
        "".join("1" if m in zpoly else "0" for m in _masks_upto(k, f)),
    )


def protocol_bob(z: int, y, k: int) -> ProtocolMessageB:
    y = _check_y(y, k)
    if not 0 <= z < (1 << k):
        raise PolyError("z out of range")
    _, f = thresholds(k)
    _, xlow, _ = _prepare(k, y)
    xpoly = _restrict(xlow, z, fix_x=False)
    return ProtocolMessageB(k, z, "".join("1" if m in xpoly else "0" for m in _masks_upto(k, f)))


def protocol_referee(A, B, k: int) -> int:
    """Recover ``y(x xor z)`` from the two messages (objects or raw bit strings)."""
    a_bits = A.bits if isinstance(A, ProtocolMessageA) else str(A)
    b_bits = B.bits if isinstance(B, ProtocolMessageB) else str(B)
    len_a, len_b = message_size(k)
    if len(a_bits) != len_a or len(b_bits) != len_b or set(a_bits + b_bits) - {"0", "1"}:
        raise PolyError(f"expected messages of {len_a} and {len_b} bits")
    d, f = thresholds(k)
    above = _masks_above(k, d)
    small = _masks_upto(k, f)
    x = int(a_bits[:k], 2) if k else 0
    z = int(b_bits[:k], 2) if k else 0
    w = x ^ z
    acc = 0
    for m, bit in zip(above, a_bits[k:k + len(above)]):
        if bit == "1" and w & m == m:
            acc ^= 1
    for m, bit in zip(small, a_bits[k + len(above):]):
        if bit == "1" and z & m == m:
            acc ^= 1
    for m, bit in zip(small, b_bits[k:]):
        if bit == "1" and x & m == m:
            acc ^= 1
    return acc


def message_size(k: int) -> tuple[int, int]:
    if k < 1:
        raise PolyError("k must be >= 1")
    d, f = thresholds(k)
    high = sum(comb(k, j) for j in range(d + 1, k + 1))
    low = sum(comb(k, j) for j in range(f + 1))
    return k + high + low, k + low


def run_protocol(k: int, y, x: int, z: int) -> dict:
    """Full transcript: both messages, the referee's bit and the declared sizes."""
    y = _check_y(y, k)
    A = protocol_alice(x, y, k)
    B = protocol_bob(z, y, k)
    d, f = thresholds(k)
    out = protocol_referee(A, B, k)
    size_a, size_b = message_size(k)
    return {
        "k": k, "d": d, "f": f, "x": x, "z": z,
        "y": "".join(map(str, y)),
        "message_a": A.bits, "message_b": B.bits,
        "size_a": size_a, "size_b": size_b,
        "output": out, "expected": y[x ^ z],
    }


def embed_indexing(k: int, x: int, y_matrix, z: int) -> tuple[int, tuple[int, ...], int]:
    """Map an indexing instance at ``k`` to a xor-indexing instance at ``2k``.

    ``x' = 0^k x`` and ``z' = z 0^k``, so ``x' xor z'`` is the string ``z x``;
    ``y'`` stores ``y(x, z)`` at that position and zero elsewhere.
    """
    K = 1 << k
    if isinstance(y_matrix, str):
        y_matrix = [int(ch) for ch in y_matrix]
    flat = np.asarray(y_matrix, dtype=np.uint8).reshape(-1)
    if flat.size != K * K:
        raise PolyError(f"y must be a 2^{k} x 2^{k} matrix")
    if not (0 <= x < K and 0 <= z < K):
        raise PolyError("x or z out of range")
    yp = np.zeros(K * K, dtype=np.uint8)
    xs = np.arange(K)[:, None]
    zs = np.arange(K)[None, :]
    yp[(zs << k) | xs] = flat.reshape(K, K)
    return x, tuple(yp.tolist()), z << k
