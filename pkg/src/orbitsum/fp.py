"""Exact linear algebra over the prime field F_p.

Scalars are canonical residues in ``[0, p)``.  Single objects
(:class:`FpVector`, :class:`FpMatrix`, :class:`Subspace`) are immutable and
hashable; bulk work goes through integer numpy arrays and the ``*_batch``
helpers, with vectors, matrices and point sets addressed by a base-``p``
"code" (row-major digits, most significant first).
"""
from __future__ import annotations

import functools
import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "CapExceeded",
    "ModulusMismatch",
    "SingularMatrix",
    "cap",
    "PrimeModulus",
    "FpVector",
    "FpMatrix",
    "Subspace",
    "AffineHyperplane",
    "PointSet",
    "span",
    "perp",
    "coset_reps",
    "all_subspaces",
    "hyperplane_enumerate",
    "normal_classes",
]

_DEFAULT_CAPS = {
    "points": 2**26,  # p^d grids (DFT, hyperplane scans)
    "group": 2_000_000,  # matrix group closure
    "affine": 5_000_000,  # affine set products
    "pairs": 4_000_000,  # exhaustive pair enumeration
}


class CapExceeded(RuntimeError):
    """A resource cap was hit; ``partial`` carries the size reached."""

    def __init__(self, what: str, limit: int, partial: int | None = None):
        self.what = what
        self.limit = limit
        self.partial = partial
        msg = f"{what} exceeds cap {limit}"
        if partial is not None:
            msg += f" (reached {partial})"
        super().__init__(msg)


class ModulusMismatch(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


def cap(name: str) -> int:
    """Resource cap ``name``; ``ORBITSUM_CAP_<NAME>`` overrides the default."""
    env = os.environ.get(f"ORBITSUM_CAP_{name.upper()}")
    if env:
        return int(float(env))
    return _DEFAULT_CAPS[name]


# ---------------------------------------------------------------------------
# scalars


@functools.lru_cache(maxsize=None)
def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    return all(n % q for q in range(17, math.isqrt(n) + 1, 2))


@dataclass(frozen=True)
class PrimeModulus:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)):
            raise TypeError("modulus must be an integer")
        object.__setattr__(self, "p", int(self.p))
        if self.p <= 2 or self.p >= 2**31 or not _is_prime(self.p):
            raise ValueError(f"{self.p} is not an odd word-sized prime")

    def __int__(self):
        return self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return pow(a, -1, self.p)

    @functools.cached_property
    def primitive_root(self) -> int:
        p = self.p
        factors = _prime_factors(p - 1)
        for g in range(2, p):
            if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
                return g
        raise AssertionError("unreachable")  # pragma: no cover


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _as_modulus(m) -> PrimeModulus:
    return m if isinstance(m, PrimeModulus) else PrimeModulus(int(m))


def _same(a, b) -> int:
    if a.p != b.p:
        raise ModulusMismatch(f"moduli differ: {a.p} vs {b.p}")
    return a.p


# ---------------------------------------------------------------------------
# batch helpers (integer numpy arrays, entries in [0, p))


def inv_table(p: int) -> np.ndarray:
    """Inverses of 0..p-1 (entry 0 is 0)."""
    return _inv_table(p)


@functools.lru_cache(maxsize=16)
def _inv_table(p: int) -> np.ndarray:
    if p > 1 << 22:
        raise CapExceeded("inverse table", 1 << 22, p)
    a = np.arange(p, dtype=np.int64)
    out = np.ones(p, dtype=np.int64)
    e, base = p - 2, a.copy()
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    out[0] = 0
    out.setflags(write=False)
    return out


def inv_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse mod p of a nonzero integer array."""
    a = np.asarray(a, dtype=np.int64) % p
    if p <= 1 << 22:
        return inv_table(p)[a]
    return np.vectorize(lambda x: pow(int(x), -1, p), otypes=[np.int64])(a)


def matmul_batch(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Batched product ``a @ b`` mod p; shapes broadcast like numpy matmul."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = a.shape[-1]
    if n * (p - 1) ** 2 < 2**63:
        return np.matmul(a, b) % p
    out = 0
    for k in range(n):
        out = (out + a[..., :, k, None] * b[..., None, k, :] % p) % p
    return out


def matvec_batch(m: np.ndarray, x: np.ndarray, p: int) -> np.ndarray:
    """``m @ x`` mod p for stacks of matrices (..., d, d) and vectors (..., d)."""
    return matmul_batch(m, np.asarray(x)[..., :, None], p)[..., 0]


def inverse_batch(m: np.ndarray, p: int) -> np.ndarray:
    """Gauss-Jordan inverse of a stack of invertible matrices mod p."""
    m = np.array(m, dtype=np.int64) % p
    n, d = m.shape[0], m.shape[-1]
    aug = np.concatenate([m, np.broadcast_to(np.eye(d, dtype=np.int64), m.shape)], axis=2)
    rows = np.arange(n)
    for col in range(d):
        nz = aug[:, col:, col] != 0
        if not nz.any(axis=1).all():
            raise SingularMatrix("singular matrix in batch")
        piv = col + np.argmax(nz, axis=1)
        top = aug[rows, piv].copy()
        aug[rows, piv] = aug[:, col]
        aug[:, col] = top * inv_mod(top[:, col], p)[:, None] % p
        for r in range(d):
            if r != col:
                f = aug[:, r, col][:, None]
                aug[:, r] = (aug[:, r] - f * aug[:, col]) % p
    return aug[:, :, d:]


def det_batch(m: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of square matrices."""
    m = np.array(m, dtype=np.int64) % p
    n, d = m.shape[0], m.shape[-1]
    det = np.ones(n, dtype=np.int64)
    rows = np.arange(n)
    for col in range(d):
        nz = m[:, col:, col] != 0
        has = nz.any(axis=1)
        det[~has] = 0
        piv = col + np.argmax(nz, axis=1)
        swapped = piv != col
        top = m[rows, piv].copy()
        m[rows, piv] = m[:, col]
        m[:, col] = top
        det = np.where(swapped, (p - det) % p, det)
        pv = m[:, col, col]
        det = det * pv % p
        safe = np.where(pv == 0, 1, pv)
        inv = inv_mod(safe, p)
        for r in range(col + 1, d):
            f = m[:, r, col] * inv % p
            m[:, r] = (m[:, r] - f[:, None] * m[:, col]) % p
    return det


def encode(digits: np.ndarray, p: int) -> np.ndarray:
    """Base-p code of the last axis of ``digits`` (most significant first)."""
    digits = np.asarray(digits, dtype=np.int64)
    code = np.zeros(digits.shape[:-1], dtype=np.int64)
    for k in range(digits.shape[-1]):
        code = code * p + digits[..., k]
    return code


def decode(codes: np.ndarray, p: int, n: int) -> np.ndarray:
    """Inverse of :func:`encode`: an array of shape ``codes.shape + (n,)``."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int64)
    c = codes.copy()
    for k in range(n - 1, -1, -1):
        out[..., k] = c % p
        c //= p
    return out


def all_vectors(p: int, d: int) -> np.ndarray:
    """Every vector of F_p^d as rows, ordered by code."""
    if p**d > cap("points"):
        raise CapExceeded("p^d", cap("points"), p**d)
    return decode(np.arange(p**d, dtype=np.int64), p, d)


# ---------------------------------------------------------------------------
# single objects


@dataclass(frozen=True, init=False)
class FpVector:
    modulus: PrimeModulus
    coords: tuple[int, ...]

    def __init__(self, modulus, coords: Iterable[int]):
        m = _as_modulus(modulus)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "coords", tuple(int(c) % m.p for c in coords))

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def d(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return f"FpVector(p={self.p}, {self.coords})"

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: FpVector) -> FpVector:
        _same(self, other)
        return FpVector(self.modulus, (a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: FpVector) -> FpVector:
        _same(self, other)
        return FpVector(self.modulus, (a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> FpVector:
        return FpVector(self.modulus, (-a for a in self.coords))

    def scale(self, c: int) -> FpVector:
        return FpVector(self.modulus, (c * a for a in self.coords))

    def dot(self, other: FpVector) -> int:
        _same(self, other)
        return sum(a * b for a, b in zip(self.coords, other.coords)) % self.p

    @property
    def code(self) -> int:
        c = 0
        for x in self.coords:
            c = c * self.p + x
        return c

    @classmethod
    def from_code(cls, modulus, code: int, d: int) -> FpVector:
        m = _as_modulus(modulus)
        return cls(m, decode(np.int64(code), m.p, d).tolist())

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)


class FpMatrix:
    """Square matrix over F_p with a cached invertibility flag."""

    __slots__ = ("modulus", "entries", "_invertible", "_hash")

    def __init__(self, modulus, entries: Iterable[Iterable[int]]):
        m = _as_modulus(modulus)
        rows = tuple(tuple(int(x) % m.p for x in row) for row in entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square and nonempty")
        self.modulus = m
        self.entries = rows
        self._invertible = None
        self._hash = None

    @classmethod
    def identity(cls, modulus, d: int) -> FpMatrix:
        return cls(modulus, np.eye(d, dtype=np.int64).tolist())

    @classmethod
    def from_array(cls, modulus, arr) -> FpMatrix:
        return cls(modulus, np.asarray(arr).tolist())

    @classmethod
    def from_code(cls, modulus, code: int, d: int) -> FpMatrix:
        m = _as_modulus(modulus)
        return cls(m, decode(np.int64(code), m.p, d * d).reshape(d, d).tolist())

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def d(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def code(self) -> int:
        c = 0
        for row in self.entries:
            for x in row:
                c = c * self.p + x
        return c

    def __eq__(self, other):
        return isinstance(other, FpMatrix) and self.p == other.p and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.entries))
        return self._hash

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {[list(r) for r in self.entries]})"

    def det(self) -> int:
        return int(det_batch(self.array()[None], self.p)[0])

    @property
    def invertible(self) -> bool:
        if self._invertible is None:
            self._invertible = self.det() != 0
        return self._invertible

    def is_identity(self) -> bool:
        return all(x == (i == j) for i, row in enumerate(self.entries) for j, x in enumerate(row))

    @property
    def T(self) -> FpMatrix:
        return FpMatrix(self.modulus, zip(*self.entries))

    def inverse(self) -> FpMatrix:
        if not self.invertible:
            raise SingularMatrix("matrix is singular mod p")
        out = FpMatrix(self.modulus, inverse_batch(self.array()[None], self.p)[0].tolist())
        out._invertible = True
        return out

    def __matmul__(self, other):
        p = _same(self, other)
        if isinstance(other, FpVector):
            return FpVector(self.modulus, matvec_batch(self.array(), other.array(), p).tolist())
        if isinstance(other, FpMatrix):
            return FpMatrix(self.modulus, matmul_batch(self.array(), other.array(), p).tolist())
        return NotImplemented

    __mul__ = __matmul__

    def __sub__(self, other: FpMatrix) -> FpMatrix:
        _same(self, other)
        return FpMatrix(self.modulus, (self.array() - other.array()).tolist())

    def __pow__(self, n: int) -> FpMatrix:
        if n < 0:
            return self.inverse() ** (-n)
        out, base = FpMatrix.identity(self.modulus, self.d), self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out


def mat_ops(a: FpMatrix, b: FpMatrix | FpVector | None = None, op: str = "mul"):
    """Dispatch for the matrix operations: ``mul``, ``transpose``, ``inverse``, ``apply_transpose``."""
    if op == "mul":
        return a @ b
    if op == "transpose":
        return a.T
    if op == "inverse":
        return a.inverse()
    if op == "apply_transpose":
        return a.T @ b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# subspaces


def rref(rows: np.ndarray, p: int) -> np.ndarray:
    """Reduced row echelon form mod p with zero rows dropped."""
    a = np.array(rows, dtype=np.int64).reshape(-1, np.shape(rows)[-1]) % p
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        for i in range(nrows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        r += 1
    return a[:r]


@dataclass(frozen=True, init=False)
class Subspace:
    """A subspace of F_p^d held by its canonical RREF basis."""

    modulus: PrimeModulus
    d: int
    basis: tuple[tuple[int, ...], ...]

    def __init__(self, modulus, d: int, basis_rows=()):
        m = _as_modulus(modulus)
        rows = np.asarray(list(basis_rows), dtype=np.int64).reshape(-1, d)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "basis", tuple(map(tuple, rref(rows, m.p).tolist())))

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.p**self.dim

    def __repr__(self):
        return f"Subspace(p={self.p}, d={self.d}, basis={[list(b) for b in self.basis]})"

    def basis_vectors(self) -> list[FpVector]:
        return [FpVector(self.modulus, b) for b in self.basis]

    def elements(self) -> np.ndarray:
        """All p^dim elements as rows."""
        if self.dim == 0:
            return np.zeros((1, self.d), dtype=np.int64)
        coeffs = decode(np.arange(self.p**self.dim), self.p, self.dim)
        return coeffs @ np.array(self.basis, dtype=np.int64) % self.p

    def __contains__(self, v) -> bool:
        v = np.asarray(list(v), dtype=np.int64) % self.p
        if self.dim == 0:
            return not v.any()
        return rref(np.vstack([np.array(self.basis), v]), self.p).shape[0] == self.dim

    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(row) if x) for row in self.basis]


def span(vectors: Sequence[FpVector], modulus=None, d: int | None = None) -> Subspace:
    """Subspace spanned by ``vectors``; ``modulus`` and ``d`` are needed only when it is empty."""
    if not vectors:
        if modulus is None or d is None:
            raise ValueError("empty span needs modulus and d")
        return Subspace(modulus, d)
    for v in vectors:
        _same(vectors[0], v)
    return Subspace(vectors[0].modulus, len(vectors[0]), [v.coords for v in vectors])


def perp(V: Subspace) -> Subspace:
    """Orthogonal complement under the standard dot product."""
    p, d = V.p, V.d
    if V.dim == 0:
        return Subspace(V.modulus, d, np.eye(d, dtype=np.int64))
    B = np.array(V.basis, dtype=np.int64)
    piv = V.pivots()
    free = [j for j in range(d) if j not in piv]
    rows = []
    # null space of the RREF basis: one vector per free column
    for f in free:
        x = np.zeros(d, dtype=np.int64)
        x[f] = 1
        for i, pc in enumerate(piv):
            x[pc] = (-B[i, f]) % p
        rows.append(x)
    return Subspace(V.modulus, d, rows)


def coset_reps(V: Subspace) -> np.ndarray:
    """One representative per coset of V in F_p^d: p^(d - dim V) rows.

    Representatives are the vectors supported on the non-pivot coordinates.
    """
    p, d = V.p, V.d
    free = [j for j in range(d) if j not in V.pivots()]
    n = len(free)
    if p**n > cap("points"):
        raise CapExceeded("coset representatives", cap("points"), p**n)
    out = np.zeros((p**n, d), dtype=np.int64)
    if n:
        out[:, free] = decode(np.arange(p**n), p, n)
    return out


def _rref_forms(p: int, d: int, k: int) -> Iterator[np.ndarray]:
    for piv in itertools.combinations(range(d), k):
        slots = [(i, j) for i, pc in enumerate(piv) for j in range(pc + 1, d) if j not in piv]
        for vals in itertools.product(range(p), repeat=len(slots)):
            m = np.zeros((k, d), dtype=np.int64)
            for i, pc in enumerate(piv):
                m[i, pc] = 1
            for (i, j), v in zip(slots, vals):
                m[i, j] = v
            yield m


def all_subspaces(p, d: int, dims: Iterable[int] | None = None) -> Iterator[Subspace]:
    """Every subspace of F_p^d (optionally restricted to the listed dimensions)."""
    m = _as_modulus(p)
    for k in range(d + 1) if dims is None else dims:
        for rows in _rref_forms(m.p, d, k):
            yield Subspace(m, d, rows)


# ---------------------------------------------------------------------------
# hyperplanes


@dataclass(frozen=True)
class AffineHyperplane:
    """``{x : normal . x = offset}`` with the first nonzero normal coordinate 1."""

    normal: FpVector
    offset: int

    def __post_init__(self):
        if self.normal.is_zero():
            raise ValueError("hyperplane normal must be nonzero")
        lead = next(x for x in self.normal.coords if x)
        if lead != 1:
            raise ValueError("hyperplane normal is not normalized")
        object.__setattr__(self, "offset", int(self.offset) % self.normal.p)

    @classmethod
    def through(cls, normal: FpVector, offset: int) -> AffineHyperplane:
        """Normalize an arbitrary nonzero normal (scaling the offset alongside)."""
        lead = next(x for x in normal.coords if x)
        s = pow(lead, -1, normal.p)
        return cls(normal.scale(s), offset * s)

    def __contains__(self, x) -> bool:
        return self.normal.dot(x if isinstance(x, FpVector) else FpVector(self.normal.modulus, x)) == self.offset


def normal_classes(p: int, d: int) -> np.ndarray:
    """Normalized representatives of the nonzero scalar classes, (p^d-1)/(p-1) rows."""
    blocks = []
    for lead in range(d):
        n = d - lead - 1
        tail = decode(np.arange(p**n), p, n) if n else np.zeros((1, 0), dtype=np.int64)
        blk = np.zeros((tail.shape[0], d), dtype=np.int64)
        blk[:, lead] = 1
        blk[:, lead + 1 :] = tail
        blocks.append(blk)
    return np.vstack(blocks)


def hyperplane_enumerate(p, d: int) -> Iterator[AffineHyperplane]:
    """Every affine hyperplane of F_p^d, each exactly once."""
    m = _as_modulus(p)
    if d < 1:
        raise ValueError("d must be at least 1")
    if m.p**d > cap("points"):
        raise CapExceeded("p^d", cap("points"), m.p**d)
    for n in normal_classes(m.p, d):
        normal = FpVector(m, n.tolist())
        for c in range(m.p):
            yield AffineHyperplane(normal, c)


# ---------------------------------------------------------------------------
# point sets


class PointSet:
    """A subset of F_p^d stored as a sorted array of point codes."""

    __slots__ = ("p", "d", "codes")

    def __init__(self, p: int, d: int, codes):
        self.p = int(p)
        self.d = int(d)
        c = np.unique(np.asarray(codes, dtype=np.int64).ravel())
        c.setflags(write=False)
        self.codes = c

    @classmethod
    def from_points(cls, p: int, points, d: int | None = None) -> PointSet:
        pts = np.asarray([list(x) for x in points] if not isinstance(points, np.ndarray) else points, dtype=np.int64)
        if d is None:
            d = pts.shape[-1]
        pts = pts.reshape(-1, d) % p
        return cls(p, d, encode(pts, p))

    @classmethod
    def from_mask(cls, p: int, d: int, mask: np.ndarray) -> PointSet:
        return cls(p, d, np.flatnonzero(np.asarray(mask).ravel()))

    @classmethod
    def full(cls, p: int, d: int) -> PointSet:
        return cls(p, d, np.arange(p**d))

    def points(self) -> np.ndarray:
        return decode(self.codes, self.p, self.d)

    def vectors(self) -> list[FpVector]:
        return [FpVector(self.p, row) for row in self.points().tolist()]

    def mask(self) -> np.ndarray:
        """Boolean indicator over F_p^d, shape (p,)*d."""
        if self.p**self.d > cap("points"):
            raise CapExceeded("p^d", cap("points"), self.p**self.d)
        m = np.zeros(self.p**self.d, dtype=bool)
        m[self.codes] = True
        return m.reshape((self.p,) * self.d)

    def __len__(self):
        return int(self.codes.size)

    def __iter__(self):
        return iter(map(tuple, self.points().tolist()))

    def __contains__(self, x) -> bool:
        if isinstance(x, FpVector):
            code = x.code
        else:
            code = int(encode(np.asarray(list(x)) % self.p, self.p))
        i = np.searchsorted(self.codes, code)
        return bool(i < self.codes.size and self.codes[i] == code)

    def contains_codes(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        i = np.searchsorted(self.codes, codes)
        i = np.minimum(i, max(self.codes.size - 1, 0))
        return (self.codes.size > 0) & (self.codes[i] == codes) if self.codes.size else np.zeros(codes.shape, bool)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and (self.p, self.d) == (other.p, other.d)
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self):
        return hash((self.p, self.d, self.codes.tobytes()))

    def __repr__(self):
        return f"PointSet(p={self.p}, d={self.d}, size={len(self)})"

    def _new(self, codes) -> PointSet:
        return PointSet(self.p, self.d, codes)

    def __and__(self, other: PointSet) -> PointSet:
        _same(self, other)
        return self._new(np.intersect1d(self.codes, other.codes, assume_unique=True))

    def __or__(self, other: PointSet) -> PointSet:
        _same(self, other)
        return self._new(np.union1d(self.codes, other.codes))

    def __sub__(self, other: PointSet) -> PointSet:
        _same(self, other)
        return self._new(np.setdiff1d(self.codes, other.codes, assume_unique=True))

    def __le__(self, other: PointSet) -> bool:
        return bool(np.isin(self.codes, other.codes, assume_unique=True).all())

    def neg(self) -> PointSet:
        return self._new(encode((-self.points()) % self.p, self.p))

    def translate(self, v) -> PointSet:
        v = np.asarray(list(v), dtype=np.int64)
        return self._new(encode((self.points() + v) % self.p, self.p))

    def transform(self, M) -> PointSet:
        """Image ``{M x : x in self}``."""
        arr = M.array() if isinstance(M, FpMatrix) else np.asarray(M, dtype=np.int64)
        return self._new(encode(matvec_batch(arr, self.points(), self.p), self.p))

    def sumset(self, V: Subspace | PointSet) -> PointSet:
        """Minkowski sum with a subspace or another point set."""
        other = V.elements() if isinstance(V, Subspace) else V.points()
        pts = (self.points()[:, None, :] + other[None, :, :]) % self.p
        return self._new(encode(pts.reshape(-1, self.d), self.p))
