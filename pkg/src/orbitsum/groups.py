"""Matrix groups over F_p, their orbits and stabilizers, and affine elements.

Groups are materialized: :func:`close_generators` enumerates every element
breadth-first.  Elements are kept as sorted arrays of matrix codes (see
:func:`orbitsum.fp.encode`), which makes membership a binary search and keeps
the bulk products in numpy.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fp import (
    CapExceeded,
    FpMatrix,
    FpVector,
    ModulusMismatch,
    PointSet,
    PrimeModulus,
    cap,
    decode,
    encode,
    inverse_batch,
    matmul_batch,
    matvec_batch,
    normal_classes,
)
from .reports import CheckReport, verdict

__all__ = [
    "MatrixGroup",
    "OrbitSet",
    "InstanceProfile",
    "AffineElement",
    "close_generators",
    "orbit",
    "stabilizer",
    "hyperplane_profile",
    "stab_chain_check",
    "commutator",
    "lower_central_probe",
    "LowerCentralReport",
]


def _bfs_closure(start: np.ndarray, step: Callable[[np.ndarray], np.ndarray], limit: int, what: str) -> np.ndarray:
    """Codes reachable from ``start`` under ``step`` (frontier -> candidate codes)."""
    seen = set(start.tolist())
    frontier = np.unique(start)
    while frontier.size:
        cand = np.unique(step(frontier))
        new = [c for c in cand.tolist() if c not in seen]
        seen.update(new)
        if len(seen) > limit:
            raise CapExceeded(what, limit, len(seen))
        frontier = np.array(new, dtype=np.int64)
    return np.array(sorted(seen), dtype=np.int64)


def _members(sorted_codes: np.ndarray, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    if sorted_codes.size == 0:
        return np.zeros(codes.shape, dtype=bool)
    i = np.minimum(np.searchsorted(sorted_codes, codes), sorted_codes.size - 1)
    return sorted_codes[i] == codes


# ---------------------------------------------------------------------------
# matrix groups


class MatrixGroup:
    """A finite subgroup of GL_d(F_p), stored with all of its elements."""

    def __init__(self, p: int, d: int, codes, generators: Sequence[FpMatrix] | None = None):
        self.modulus = PrimeModulus(p)
        self.p = self.modulus.p
        self.d = int(d)
        c = np.unique(np.asarray(codes, dtype=np.int64))
        c.setflags(write=False)
        self.codes = c
        self._generators = list(generators) if generators is not None else None

    @property
    def order(self) -> int:
        return int(self.codes.size)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"MatrixGroup(p={self.p}, d={self.d}, order={self.order})"

    def __eq__(self, other):
        return isinstance(other, MatrixGroup) and (self.p, self.d) == (other.p, other.d) and np.array_equal(
            self.codes, other.codes
        )

    def __hash__(self):
        return hash((self.p, self.d, self.codes.tobytes()))

    @functools.cached_property
    def arrays(self) -> np.ndarray:
        """Elements as an (order, d, d) array."""
        return decode(self.codes, self.p, self.d * self.d).reshape(-1, self.d, self.d)

    def elements(self) -> list[FpMatrix]:
        return [FpMatrix(self.modulus, m) for m in self.arrays.tolist()]

    @property
    def generators(self) -> list[FpMatrix]:
        if self._generators is None:
            self._generators = _greedy_generators(self)
        return self._generators

    def __contains__(self, M: FpMatrix) -> bool:
        return bool(_members(self.codes, M.code))

    def contains_codes(self, codes) -> np.ndarray:
        return _members(self.codes, codes)

    def transpose(self) -> MatrixGroup:
        arr = np.swapaxes(self.arrays, 1, 2)
        return MatrixGroup(self.p, self.d, encode(arr.reshape(-1, self.d * self.d), self.p))

    def is_closed(self) -> bool:
        """Closed under products of generators with elements and contains I."""
        ident = encode(np.eye(self.d, dtype=np.int64).reshape(1, -1), self.p)
        if not self.contains_codes(ident).all():
            return False
        g = np.array([m.array() for m in self.generators]) if self.generators else np.zeros((0, self.d, self.d))
        prods = matmul_batch(self.arrays[:, None], g[None], self.p)
        return bool(self.contains_codes(encode(prods.reshape(-1, self.d * self.d), self.p)).all())


def _greedy_generators(G: MatrixGroup) -> list[FpMatrix]:
    if G.order == 1:
        return []
    gens: list[FpMatrix] = []
    have = np.zeros(0, dtype=np.int64)
    for code in G.codes.tolist():
        if have.size and _members(have, code):
            continue
        gens.append(FpMatrix.from_code(G.modulus, code, G.d))
        have = close_generators(gens).codes
        if have.size == G.order:
            break
    return gens


def close_generators(gens: Sequence[FpMatrix], limit: int | None = None, p: int | None = None, d: int | None = None) -> MatrixGroup:
    """The subgroup of GL_d(F_p) generated by ``gens``.

    Breadth-first closure under right multiplication by generators; raises
    :class:`CapExceeded` (with the partial size) past ``limit`` elements.
    """
    limit = cap("group") if limit is None else limit
    gens = list(gens)
    if not gens:
        if p is None or d is None:
            raise ValueError("empty generator list needs p and d")
        gens = [FpMatrix.identity(p, d)]
    p, d = gens[0].p, gens[0].d
    for g in gens:
        if g.p != p:
            raise ModulusMismatch("generators have different moduli")
        if g.d != d:
            raise ValueError("generators have different sizes")
        if not g.invertible:
            raise ValueError(f"generator {g} is not invertible")
    g_arr = np.array([g.array() for g in gens], dtype=np.int64)
    n2 = d * d

    def step(frontier):
        m = decode(frontier, p, n2).reshape(-1, 1, d, d)
        return encode(matmul_batch(m, g_arr[None], p).reshape(-1, n2), p).ravel()

    ident = encode(np.eye(d, dtype=np.int64).reshape(1, -1), p)
    codes = _bfs_closure(ident, step, limit, "group closure")
    return MatrixGroup(p, d, codes, generators=[g for g in gens if not g.is_identity()])


# ---------------------------------------------------------------------------
# orbits and stabilizers


@dataclass
class OrbitSet:
    group: MatrixGroup
    base_point: FpVector
    points: PointSet
    transposed: bool = True

    def __len__(self):
        return len(self.points)


def _vec_arg(v, p: int) -> np.ndarray:
    arr = v.array() if isinstance(v, FpVector) else np.asarray(list(v), dtype=np.int64) % p
    if not arr.any():
        raise ValueError("zero vector rejected")
    return arr


def orbit(H: MatrixGroup, v: FpVector, transposed: bool = True) -> OrbitSet:
    """The orbit ``H^T v`` (default) or ``H v`` as a point set."""
    if isinstance(v, FpVector) and v.p != H.p:
        raise ModulusMismatch("vector and group moduli differ")
    x = _vec_arg(v, H.p)
    mats = np.swapaxes(H.arrays, 1, 2) if transposed else H.arrays
    pts = matvec_batch(mats, x[None, :], H.p)
    base = v if isinstance(v, FpVector) else FpVector(H.p, x)
    return OrbitSet(H, base, PointSet(H.p, H.d, encode(pts, H.p)), transposed)


def stabilizer(H: MatrixGroup, xi: FpVector, transposed: bool = False) -> MatrixGroup:
    """``{M in H : M xi = xi}`` (or ``M^T xi = xi`` when ``transposed``)."""
    x = _vec_arg(xi, H.p)
    mats = np.swapaxes(H.arrays, 1, 2) if transposed else H.arrays
    fixed = (matvec_batch(mats, x[None, :], H.p) == x).all(axis=1)
    return MatrixGroup(H.p, H.d, H.codes[fixed])


@dataclass(frozen=True)
class InstanceProfile:
    p: int
    d: int
    orbit_size: int
    delta_eff: float
    max_hyperplane_hit: int
    beta_eff: float
    argmax_normal: tuple[int, ...] = ()
    argmax_offset: int = 0


def hyperplane_profile(I: OrbitSet | PointSet, chunk: int = 1 << 22) -> InstanceProfile:
    """Exact ``max_P |I ∩ P|`` over affine hyperplanes, with the effective exponents.

    For each normalized normal class the values ``n . x`` are histogrammed;
    the largest bin is the best offset for that class.
    """
    pts_set = I.points if isinstance(I, OrbitSet) else I
    p, d = pts_set.p, pts_set.d
    if p**d > cap("points"):
        raise CapExceeded("p^d", cap("points"), p**d)
    pts = pts_set.points()
    n = len(pts_set)
    normals = normal_classes(p, d)
    best, arg = 0, (0, 0)
    per = max(1, chunk // max(n, 1))
    for lo in range(0, len(normals), per):
        blk = normals[lo : lo + per]
        dots = (pts @ blk.T) % p  # (n, k)
        # histogram each column by offsetting with the column index
        flat = (dots + p * np.arange(blk.shape[0])[None, :]).ravel()
        counts = np.bincount(flat, minlength=p * blk.shape[0]).reshape(blk.shape[0], p)
        j = int(np.argmax(counts))
        if counts.flat[j] > best:
            best = int(counts.flat[j])
            arg = (lo + j // p, j % p)
    delta = math.log(n) / math.log(p)
    beta = 0.0 if n <= 1 else 1.0 - math.log(best) / math.log(n)
    beta = min(max(beta, 0.0), 1.0)
    return InstanceProfile(p, d, n, delta, best, beta, tuple(normals[arg[0]].tolist()), arg[1])


def stab_chain_check(H: MatrixGroup, v: FpVector, xi: FpVector) -> CheckReport:
    """``|Stab_H(xi)| <= |Stab_{H^T}(v)| * |I ∩ P|`` with ``I = H^T v``, ``P = {x : xi.x = xi.v}``."""
    st_xi = stabilizer(H, xi).order
    st_v = stabilizer(H, v, transposed=True).order
    I = orbit(H, v, transposed=True).points
    x = _vec_arg(xi, H.p)
    c = int(x @ _vec_arg(v, H.p) % H.p)
    hit = int(((I.points() @ x) % H.p == c).sum())
    ok = st_xi <= st_v * hit
    return CheckReport(
        "stab_chain",
        verdict(ok),
        {"stab_H_xi": st_xi, "stab_HT_v": st_v, "orbit_hyperplane_hit": hit},
    )


# ---------------------------------------------------------------------------
# affine group Aff_d(F_p)


@dataclass(frozen=True)
class AffineElement:
    """``(M, t)``: the map ``x -> M x + t``, i.e. the block matrix [[M, t], [0, 1]]."""

    linear: FpMatrix
    translation: FpVector

    def __post_init__(self):
        if self.linear.p != self.translation.p:
            raise ModulusMismatch("linear part and translation moduli differ")
        if self.linear.d != self.translation.d:
            raise ValueError("dimension mismatch")
        if not self.linear.invertible:
            raise ValueError("linear part must be invertible")

    @classmethod
    def identity(cls, p, d: int) -> AffineElement:
        return cls(FpMatrix.identity(p, d), FpVector(p, [0] * d))

    @classmethod
    def translation_by(cls, xi: FpVector) -> AffineElement:
        return cls(FpMatrix.identity(xi.modulus, xi.d), xi)

    @classmethod
    def from_code(cls, p, code: int, d: int) -> AffineElement:
        m = PrimeModulus(int(p))
        lin, t = divmod(int(code), m.p**d)
        return cls(FpMatrix.from_code(m, lin, d), FpVector.from_code(m, t, d))

    @property
    def p(self) -> int:
        return self.linear.p

    @property
    def d(self) -> int:
        return self.linear.d

    @property
    def code(self) -> int:
        return self.linear.code * self.p**self.d + self.translation.code

    def __matmul__(self, other: AffineElement) -> AffineElement:
        return AffineElement(self.linear @ other.linear, self.linear @ other.translation + self.translation)

    __mul__ = __matmul__

    def inverse(self) -> AffineElement:
        inv = self.linear.inverse()
        return AffineElement(inv, -(inv @ self.translation))

    def __call__(self, x: FpVector) -> FpVector:
        return self.linear @ x + self.translation

    def is_identity(self) -> bool:
        return self.linear.is_identity() and self.translation.is_zero()

    def block(self) -> np.ndarray:
        d = self.d
        out = np.zeros((d + 1, d + 1), dtype=np.int64)
        out[:d, :d] = self.linear.array()
        out[:d, d] = self.translation.array()
        out[d, d] = 1
        return out


def commutator(g: AffineElement, h: AffineElement) -> AffineElement:
    """``g h g^-1 h^-1``."""
    if g.p != h.p:
        raise ModulusMismatch("moduli differ")
    return g @ h @ g.inverse() @ h.inverse()


# batch arithmetic on affine codes: code = linear_code * p^d + translation_code


def check_affine_codes_fit(p: int, d: int) -> None:
    if d * d + d > 1 and (d * d + d) * math.log2(p) >= 62.5:
        raise CapExceeded("affine code width p^(d^2+d)", 2**62, p ** (d * d + d))


def aff_decode(codes, p: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    codes = np.asarray(codes, dtype=np.int64)
    lin, t = np.divmod(codes, p**d)
    return decode(lin, p, d * d).reshape(codes.shape + (d, d)), decode(t, p, d)


def aff_encode(M: np.ndarray, t: np.ndarray, p: int) -> np.ndarray:
    d = t.shape[-1]
    return encode(M.reshape(M.shape[:-2] + (d * d,)), p) * p**d + encode(t, p)


def aff_mul(a_codes, b_codes, p: int, d: int, outer: bool = True) -> np.ndarray:
    """Products ``a b``; all pairs (shape (len a, len b)) when ``outer``."""
    Ma, ta = aff_decode(a_codes, p, d)
    Mb, tb = aff_decode(b_codes, p, d)
    if outer:
        Ma, ta = Ma[:, None], ta[:, None]
        Mb, tb = Mb[None], tb[None]
    M = matmul_batch(Ma, Mb, p)
    t = (matvec_batch(Ma, tb, p) + ta) % p
    return aff_encode(M, t, p)


def aff_inv(codes, p: int, d: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    if codes.size == 0:
        return codes.copy()
    M, t = aff_decode(codes.ravel(), p, d)
    Mi = inverse_batch(M, p)
    ti = (-matvec_batch(Mi, t, p)) % p
    return aff_encode(Mi, ti, p).reshape(codes.shape)


def aff_identity_code(p: int, d: int) -> int:
    return int(encode(np.eye(d, dtype=np.int64).reshape(1, -1), p)[0]) * p**d


def aff_close(gen_codes, p: int, d: int, limit: int | None = None) -> np.ndarray:
    """Sorted codes of the subgroup of Aff_d(F_p) generated by ``gen_codes``."""
    limit = cap("affine") if limit is None else limit
    gens = np.unique(np.asarray(gen_codes, dtype=np.int64))
    start = np.array([aff_identity_code(p, d)], dtype=np.int64)
    if gens.size == 0:
        return start
    return _bfs_closure(start, lambda f: aff_mul(f, gens, p, d).ravel(), limit, "affine closure")


def _codes_of(S, p=None, d=None):
    codes = getattr(S, "codes", None)
    if codes is not None and hasattr(S, "p"):
        return np.asarray(codes, dtype=np.int64), S.p, S.d
    elems = list(S)
    if not elems:
        if p is None:
            raise ValueError("empty element list needs p and d")
        return np.zeros(0, dtype=np.int64), p, d
    return np.unique([g.code for g in elems]), elems[0].p, elems[0].d


@dataclass
class LowerCentralReport:
    sizes: list[int]
    has_translation_outside_H1: list[bool]
    inside_H1: list[bool]
    terminates_at: int | None
    stabilized_at: int | None
    depth: int
    method: list[str] = field(default_factory=list)

    @property
    def nilpotent(self) -> bool | None:
        """True if the series reaches H1, False if it stalls above it, None if undecided."""
        if self.terminates_at is not None:
            return True
        if self.stabilized_at is not None:
            return False
        return None


def _greedy_gen_codes(codes: np.ndarray, p: int, d: int, limit: int) -> np.ndarray:
    gens: list[int] = []
    have = np.zeros(0, dtype=np.int64)
    for c in codes.tolist():
        if have.size and _members(have, c):
            continue
        gens.append(c)
        have = aff_close(gens, p, d, limit)
        if have.size == codes.size:
            break
    return np.array(gens, dtype=np.int64)


def _commutators(a: np.ndarray, b: np.ndarray, p: int, d: int) -> np.ndarray:
    """``[x, y] = x y x^-1 y^-1`` for all x in ``a``, y in ``b`` (shape (len a, len b))."""
    xy = aff_mul(a, b, p, d)
    xyx = aff_mul(xy, aff_inv(a, p, d)[:, None], p, d, outer=False)
    return aff_mul(xyx, aff_inv(b, p, d)[None, :], p, d, outer=False)


def _normal_closure(seed: np.ndarray, conj_by: np.ndarray, p: int, d: int, limit: int) -> np.ndarray:
    ident = aff_identity_code(p, d)
    gens = np.unique(seed)
    gens = gens[gens != ident]
    inv = aff_inv(conj_by, p, d)
    while True:
        N = aff_close(gens, p, d, limit)
        hn = aff_mul(conj_by, gens, p, d)
        hnh = aff_mul(hn, inv[:, None], p, d, outer=False).ravel()
        extra = hnh[~_members(N, hnh)]
        if extra.size == 0:
            return N
        gens = np.unique(np.concatenate([gens, extra]))


def lower_central_probe(H2, H1=None, depth: int | None = None, pairwise_limit: int = 10_000) -> LowerCentralReport:
    """Lower central series ``W_0 = H2``, ``W_{i+1} = [H2, W_i]`` relative to ``H1``.

    Records, per term, whether it holds a nontrivial pure translation
    ``(I, xi)`` outside ``H1`` and whether it already lies inside ``H1``.
    """
    c2, p, d = _codes_of(H2)
    c1 = _codes_of(H1, p, d)[0] if H1 is not None else np.array([aff_identity_code(p, d)])
    c1 = np.unique(c1)
    limit = cap("affine")
    if not np.array_equal(aff_close(c2, p, d, limit), c2):
        raise ValueError("H2 is not a group")
    if not np.array_equal(aff_close(c1, p, d, limit), c1):
        raise ValueError("H1 is not a group")
    if not _members(c2, c1).all():
        raise ValueError("H1 is not contained in H2")
    depth = d + 3 if depth is None else depth
    ident_lin = aff_identity_code(p, d) // p**d
    ident = aff_identity_code(p, d)

    def translation_outside(W):
        pure = (W // p**d == ident_lin) & (W != ident)
        return bool((pure & ~_members(c1, W)).any())

    W = c2
    sizes, trans, inside, methods = [W.size], [translation_outside(W)], [bool(_members(c1, W).all())], ["input"]
    terminates = 0 if inside[0] else None
    stabilized = None
    gens2 = None
    for i in range(depth):
        if terminates is not None or stabilized is not None:
            break
        if c2.size <= pairwise_limit:
            step = max(1, cap("pairs") // max(W.size, 1))
            comms = [np.unique(_commutators(c2[lo : lo + step], W, p, d)) for lo in range(0, c2.size, step)]
            Wn = aff_close(np.unique(np.concatenate(comms)), p, d, limit)
            methods.append("pairwise")
        else:
            # [G, W] is the normal closure of commutators of generators
            if gens2 is None:
                gens2 = _greedy_gen_codes(c2, p, d, limit)
            comms = _commutators(gens2, _greedy_gen_codes(W, p, d, limit), p, d).ravel()
            Wn = _normal_closure(comms, gens2, p, d, limit)
            methods.append("generators")
        sizes.append(Wn.size)
        trans.append(translation_outside(Wn))
        inside.append(bool(_members(c1, Wn).all()))
        if inside[-1]:
            terminates = i + 1
        elif np.array_equal(Wn, W):
            stabilized = i
        W = Wn
    return LowerCentralReport(sizes, trans, inside, terminates, stabilized, depth, methods)
