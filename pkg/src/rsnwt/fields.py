"""Prime-field arithmetic and exact linear algebra mod p.

Heavy loops elsewhere in the package work on plain ``int`` residues for speed;
``FieldElement`` is the typed public face used at module boundaries.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import FieldTooSmall, InputError, ZeroInverse

# Deterministic Miller-Rabin witnesses for n < 3.3e24 (covers every 64-bit modulus).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

# Escalating primes used when re-testing singular-looking matrices.
P31 = 2**31 - 1
P40 = 1099511627791  # smallest prime above 2**40
P61 = 2**61 - 1

SeedLike = Union[int, random.Random, None]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def as_rng(seed: SeedLike) -> random.Random:
    """Caller-owned RNG: pass a ``Random`` through, otherwise seed a fresh one."""
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


@dataclass(frozen=True)
class FieldSpec:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not is_prime(self.p):
            raise InputError(f"modulus {self.p!r} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.p))

    def random_element(self, rng: random.Random) -> "FieldElement":
        return FieldElement(rng.randrange(self.p), self)


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.p:
            raise InputError(f"{self.value} is not a canonical residue mod {self.spec.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise InputError("operands live in different fields")
            return other.value
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value + b) % self.spec.p, self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value - b) % self.spec.p, self.spec)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement((b - self.value) % self.spec.p, self.spec)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b % self.spec.p, self.spec)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.spec.p, self.spec)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return FieldElement(pow(self.value, e, self.spec.p), self.spec)

    def inv(self) -> "FieldElement":
        return FieldElement(inv_mod(self.value, self.spec.p), self.spec)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self * FieldElement(inv_mod(b, self.spec.p), self.spec)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.spec.p})"


def inv_mod(a: int, p: int) -> int:
    # Fermat: p is prime.
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def sample_distinct_vector(spec: FieldSpec, n: int, seed: SeedLike = None) -> list[FieldElement]:
    """``n`` pairwise-distinct field elements, reproducible for a given seed."""
    if n > spec.p:
        raise FieldTooSmall(f"cannot pick {n} distinct elements from F_{spec.p}")
    rng = as_rng(seed)
    return [FieldElement(v, spec) for v in rng.sample(range(spec.p), n)]


def sample_vector(spec: FieldSpec, n: int, seed: SeedLike = None) -> list[FieldElement]:
    rng = as_rng(seed)
    return [FieldElement(rng.randrange(spec.p), spec) for _ in range(n)]


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Row rank over F_p by Gaussian elimination (first-nonzero pivoting)."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        inv = pow(prow[col], p - 2, p)
        for r in range(rank + 1, len(m)):
            row = m[r]
            f = row[col]
            if f:
                f = f * inv % p
                for c in range(col, ncols):
                    if prow[c]:
                        row[c] = (row[c] - f * prow[c]) % p
        rank += 1
        if rank == len(m):
            break
    return rank


def det_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise InputError("determinant of a non-square matrix")
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        prow = m[col]
        det = det * prow[col] % p
        inv = pow(prow[col], p - 2, p)
        for r in range(col + 1, n):
            row = m[r]
            f = row[col]
            if f:
                f = f * inv % p
                for c in range(col, n):
                    if prow[c]:
                        row[c] = (row[c] - f * prow[c]) % p
    return det % p


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss fraction-free elimination)."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise InputError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank over the rationals (fraction-free elimination on integers)."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        a = prow[col]
        for r in range(rank + 1, len(m)):
            b = m[r][col]
            if b:
                row = [a * x - b * y for x, y in zip(m[r], prow)]
                g = math.gcd(*row)
                m[r] = [x // g for x in row] if g > 1 else row
        rank += 1
    return rank
