"""Finite subsets of Aff_d(F_p) and the growth inequalities checked on them.

An :class:`AffineSet` is a sorted array of affine codes ``(M, t) ->
code(M) * p^d + code(t)``, so the linear part ``L(A)`` and the translation
fibers ``R_M(A)`` fall out of a single ``divmod``.  Every verifier compares
integers (or :class:`~fractions.Fraction` constants) exactly.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .fourier import VERIFY_BAND, Spectrum, SpectrumField, dft_full, pair_count, spec_alpha
from .fp import (
    CapExceeded,
    FpMatrix,
    FpVector,
    PointSet,
    Subspace,
    cap,
    decode,
    encode,
    matvec_batch,
)
from .groups import (
    AffineElement,
    InstanceProfile,
    MatrixGroup,
    OrbitSet,
    _members,
    aff_close,
    aff_identity_code,
    aff_inv,
    aff_mul,
    check_affine_codes_fit,
    stabilizer,
)
from .reports import FAIL, INCONCLUSIVE, PASS, UNMET, CheckReport, verdict

__all__ = [
    "AffineSet",
    "BlockView",
    "GrowthReport",
    "IterationSchedule",
    "PairCertificate",
    "TranslateUnion",
    "SpectrumInvarianceError",
    "aff_set_algebra",
    "product_set",
    "restricted_product",
    "growth_report",
    "approx_power_law_check",
    "build_A_alpha",
    "iteration_schedule",
    "prop_p_iteration",
    "block_observations_check",
    "blocks_lemma_check",
    "stab_lemma_check",
    "translate_union_check",
    "semidirect",
    "symmetrize",
]


class SpectrumInvarianceError(ValueError):
    """The spectrum handed to :func:`build_A_alpha` is not symmetric or not H-invariant."""


class AffineSet:
    """A finite subset of Aff_d(F_p)."""

    __slots__ = ("p", "d", "codes", "__dict__")

    def __init__(self, p: int, d: int, codes):
        check_affine_codes_fit(p, d)
        self.p = int(p)
        self.d = int(d)
        c = np.unique(np.asarray(codes, dtype=np.int64).ravel())
        c.setflags(write=False)
        self.codes = c

    @classmethod
    def from_elements(cls, elements: Iterable[AffineElement], p: int | None = None, d: int | None = None) -> AffineSet:
        elements = list(elements)
        if elements:
            p, d = elements[0].p, elements[0].d
        return cls(p, d, [g.code for g in elements])

    @classmethod
    def from_parts(cls, p: int, d: int, linear_codes, translation_codes) -> AffineSet:
        """``{(M, t)}`` for aligned arrays of matrix and vector codes."""
        lin = np.asarray(linear_codes, dtype=np.int64)
        t = np.asarray(translation_codes, dtype=np.int64)
        return cls(p, d, lin * p**d + t)

    def __len__(self):
        return int(self.codes.size)

    def __repr__(self):
        return f"AffineSet(p={self.p}, d={self.d}, size={len(self)})"

    def __eq__(self, other):
        return isinstance(other, AffineSet) and (self.p, self.d) == (other.p, other.d) and np.array_equal(
            self.codes, other.codes
        )

    def __hash__(self):
        return hash((self.p, self.d, self.codes.tobytes()))

    def __contains__(self, g: AffineElement) -> bool:
        return bool(_members(self.codes, g.code))

    def contains_codes(self, codes) -> np.ndarray:
        return _members(self.codes, codes)

    def elements(self) -> list[AffineElement]:
        return [AffineElement.from_code(self.p, c, self.d) for c in self.codes.tolist()]

    def _new(self, codes) -> AffineSet:
        return AffineSet(self.p, self.d, codes)

    @functools.cached_property
    def contains_identity(self) -> bool:
        return bool(_members(self.codes, aff_identity_code(self.p, self.d)))

    @functools.cached_property
    def symmetric(self) -> bool:
        return self.inverse() == self

    def inverse(self) -> AffineSet:
        return self._new(aff_inv(self.codes, self.p, self.d))

    def __and__(self, other: AffineSet) -> AffineSet:
        return self._new(np.intersect1d(self.codes, other.codes, assume_unique=True))

    def __or__(self, other: AffineSet) -> AffineSet:
        return self._new(np.union1d(self.codes, other.codes))

    def __le__(self, other: AffineSet) -> bool:
        return bool(other.contains_codes(self.codes).all())

    def __mul__(self, other: AffineSet) -> AffineSet:
        return product_set(self, other)

    def left(self, g: AffineElement) -> AffineSet:
        """``g A``."""
        return self._new(aff_mul(np.array([g.code]), self.codes, self.p, self.d).ravel())

    def power(self, m: int) -> AffineSet:
        return power_set(self, m)

    @functools.cached_property
    def blocks(self) -> BlockView:
        return BlockView.of(self)

    def is_group(self) -> bool:
        return np.array_equal(aff_close(self.codes, self.p, self.d), self.codes)


# ---------------------------------------------------------------------------
# set algebra


def product_set(A: AffineSet, B: AffineSet, limit: int | None = None) -> AffineSet:
    """``AB = {ab}``, deduplicated; the result is capped at ``limit`` elements."""
    limit = cap("affine") if limit is None else limit
    if (A.p, A.d) != (B.p, B.d):
        raise ValueError("affine sets live in different groups")
    if len(A) == 0 or len(B) == 0:
        return A._new([])
    step = max(1, (1 << 22) // len(B))
    out = np.zeros(0, dtype=np.int64)
    for lo in range(0, len(A), step):
        part = np.unique(aff_mul(A.codes[lo : lo + step], B.codes, A.p, A.d))
        out = np.union1d(out, part)
        if out.size > limit:
            raise CapExceeded("product set", limit, int(out.size))
    return A._new(out)


def power_set(A: AffineSet, m: int, limit: int | None = None) -> AffineSet:
    """``A^m`` by repeated right multiplication; stops early once ``A^k A = A^k``."""
    if m < 1:
        raise ValueError("m must be positive")
    out = A
    for _ in range(m - 1):
        nxt = product_set(out, A, limit)
        if nxt == out:
            break
        out = nxt
    return out


def restricted_product(pairs: Iterable[tuple[AffineElement, AffineElement]] | np.ndarray, p: int | None = None, d: int | None = None) -> AffineSet:
    """``A ._E A' = {a a' : (a, a') in E}`` for E given as element pairs or an (n, 2) code array."""
    if isinstance(pairs, np.ndarray):
        if p is None or d is None:
            raise ValueError("code arrays need p and d")
        if pairs.size == 0:
            return AffineSet(p, d, [])
        return AffineSet(p, d, aff_mul(pairs[:, 0], pairs[:, 1], p, d, outer=False))
    pairs = list(pairs)
    if not pairs:
        if p is None or d is None:
            raise ValueError("empty relation needs p and d")
        return AffineSet(p, d, [])
    return AffineSet.from_elements([a @ b for a, b in pairs])


def aff_set_algebra(A: AffineSet, B: AffineSet | None = None, op: str = "product", m: int = 2, pairs=None) -> AffineSet:
    """Dispatch for ``product``, ``inverse``, ``power`` (``A^m``) and ``restricted``."""
    if op == "product":
        return product_set(A, B)
    if op == "inverse":
        return A.inverse()
    if op == "power":
        return power_set(A, m)
    if op == "restricted":
        return restricted_product(pairs if pairs is not None else [], A.p, A.d)
    raise ValueError(f"unknown op {op!r}")


def symmetrize(A: AffineSet) -> AffineSet:
    """``A ∪ A^-1 ∪ {1}``."""
    ident = A._new([aff_identity_code(A.p, A.d)])
    return A | A.inverse() | ident


def semidirect(K0: MatrixGroup, W: Subspace) -> AffineSet:
    """``{(M, w) : M in K0, w in W}``; a subgroup when W is K0-invariant."""
    w = encode(W.elements(), K0.p)
    return AffineSet.from_parts(K0.p, K0.d, np.repeat(K0.codes, w.size), np.tile(w, K0.order))


# ---------------------------------------------------------------------------
# block views


@dataclass
class BlockView:
    """``L(A)`` and the fibers ``R_M(A)`` (as sorted translation-code arrays)."""

    p: int
    d: int
    L: np.ndarray
    fiber_sizes: np.ndarray
    _starts: np.ndarray
    _trans: np.ndarray

    @classmethod
    def of(cls, A: AffineSet) -> BlockView:
        lin, t = np.divmod(A.codes, A.p**A.d)
        L, starts, sizes = np.unique(lin, return_index=True, return_counts=True)
        return cls(A.p, A.d, L, sizes, starts, t)

    def __len__(self):
        return int(self.L.size)

    def fiber(self, M: FpMatrix | int) -> PointSet:
        code = M.code if isinstance(M, FpMatrix) else int(M)
        i = np.searchsorted(self.L, code)
        if i == self.L.size or self.L[i] != code:
            return PointSet(self.p, self.d, [])
        s = self._starts[i]
        return PointSet(self.p, self.d, self._trans[s : s + self.fiber_sizes[i]])

    def fibers(self) -> dict[int, PointSet]:
        return {int(c): self.fiber(int(c)) for c in self.L}

    @property
    def max_fiber(self) -> int:
        return int(self.fiber_sizes.max()) if self.L.size else 0

    @property
    def min_fiber(self) -> int:
        return int(self.fiber_sizes.min()) if self.L.size else 0

    def linear_group(self) -> MatrixGroup:
        return MatrixGroup(self.p, self.d, self.L)


# ---------------------------------------------------------------------------
# growth


@dataclass
class GrowthReport:
    size: int
    size2: int
    size3: int
    tripling: float
    covering_K: int
    cover: np.ndarray = field(repr=False, default=None)

    def as_dict(self):
        return {"size": self.size, "size2": self.size2, "size3": self.size3, "tripling": self.tripling, "covering_K": self.covering_K}


def _greedy_cover(inc_cand: np.ndarray, inc_elem: np.ndarray, n_cand: int, n_elem: int, priority: np.ndarray) -> list[int]:
    """Max-coverage greedy with ties broken by ``priority`` (lower first)."""
    order = np.argsort(inc_elem, kind="stable")
    by_elem_cand = inc_cand[order]
    elem_ptr = np.searchsorted(inc_elem[order], np.arange(n_elem + 1))
    order_c = np.argsort(inc_cand, kind="stable")
    by_cand_elem = inc_elem[order_c]
    cand_ptr = np.searchsorted(inc_cand[order_c], np.arange(n_cand + 1))
    counts = np.diff(cand_ptr).astype(np.int64)
    covered = np.zeros(n_elem, dtype=bool)
    rank = np.empty(n_cand, dtype=np.int64)
    rank[np.argsort(priority, kind="stable")] = np.arange(n_cand)
    left = n_elem
    chosen = []
    while left:
        c = int(np.argmax(counts * (n_cand + 1) - rank))
        chosen.append(c)
        for e in by_cand_elem[cand_ptr[c] : cand_ptr[c + 1]]:
            if covered[e]:
                continue
            covered[e] = True
            left -= 1
            counts[by_elem_cand[elem_ptr[e] : elem_ptr[e + 1]]] -= 1
    return chosen


def growth_report(A: AffineSet, symmetrize_input: bool = False, orders: int = 6, seed: int = 0) -> GrowthReport:
    """Sizes of ``A, A^2, A^3`` and a greedy ``X`` with ``A^2 ⊆ X A``.

    Candidates for X range over ``A^3`` (only those translates can meet
    ``A^2``); the greedy runs under several tie-breaking orders and keeps the
    smallest cover found.  ``covering_K`` is therefore an upper bound on the
    optimal covering number, never a claimed optimum.
    """
    if symmetrize_input:
        A = symmetrize(A)
    if not A.contains_identity or not A.symmetric:
        raise ValueError("growth_report needs 1 in A and A = A^-1 (use symmetrize_input=True)")
    A2 = product_set(A, A)
    A3 = product_set(A2, A)
    cands = A3.codes if A3.codes.size * len(A) <= 4 * cap("pairs") else A2.codes
    inc_c, inc_e = [], []
    step = max(1, cap("pairs") // len(A))
    for lo in range(0, cands.size, step):
        prods = aff_mul(cands[lo : lo + step], A.codes, A.p, A.d)
        hit = A2.contains_codes(prods)
        ci, _ = np.nonzero(hit)
        inc_c.append(ci + lo)
        inc_e.append(np.searchsorted(A2.codes, prods[hit]))
    inc_c = np.concatenate(inc_c)
    inc_e = np.concatenate(inc_e)
    rng = np.random.default_rng(seed)
    best = None
    for k in range(orders):
        if k == 0:
            prio = np.arange(cands.size)
        elif k == 1:
            prio = -np.arange(cands.size)
        else:
            prio = rng.permutation(cands.size)
        chosen = _greedy_cover(inc_c, inc_e, cands.size, len(A2), prio)
        if best is None or len(chosen) < len(best):
            best = chosen
    X = cands[np.array(best, dtype=np.int64)]
    return GrowthReport(len(A), len(A2), len(A3), len(A3) / len(A), len(X), X)


def approx_power_law_check(A: AffineSet, K=None, m_max: int = 4) -> CheckReport:
    """``|A^m| <= K^(m-1) |A|`` for ``m <= m_max`` with K the greedy covering bound."""
    if K is None:
        K = growth_report(A).covering_K
    sizes, ok = {}, True
    P = A
    for m in range(1, m_max + 1):
        if m > 1:
            P = product_set(P, A)
        sizes[m] = len(P)
        ok &= len(P) <= Fraction(K) ** (m - 1) * len(A)
    return CheckReport("approx_power_law", verdict(ok), {"K": K, "sizes": sizes})


# ---------------------------------------------------------------------------
# A_alpha and the iteration


def _spectrum_invariant(H: MatrixGroup, S: PointSet) -> bool:
    return all(S.transform(g) == S for g in H.generators)


def build_A_alpha(H: MatrixGroup, spec: Spectrum | PointSet, check: bool = True) -> AffineSet:
    """``{(M, xi) : M in H, xi in spec}`` as a subset of Aff_d(F_p)."""
    S = spec.points if isinstance(spec, Spectrum) else spec
    if check:
        if S.neg() != S:
            raise SpectrumInvarianceError("spectrum is not symmetric")
        if not _spectrum_invariant(H, S):
            raise SpectrumInvarianceError("spectrum is not H-invariant")
    A = AffineSet.from_parts(H.p, H.d, np.repeat(H.codes, len(S)), np.tile(S.codes, H.order))
    if check and len(A) <= cap("affine") and not A.symmetric:
        raise SpectrumInvarianceError("A_alpha is not symmetric")
    return A


@dataclass
class IterationSchedule:
    p: int
    d: int
    eps_prime: float
    J: int
    eps0: float
    alphas: list[float]
    chosen_j: int | None = None
    spec_sizes: list[int] = field(default_factory=list)

    @property
    def c(self) -> int | None:
        return None if self.chosen_j is None else 2**self.chosen_j

    @property
    def phi(self) -> float | None:
        return None if self.chosen_j is None else self.alphas[self.chosen_j]

    def closed_form(self, j: int) -> float:
        """``2^(1 - 2^j) p^(-2^j eps0)``."""
        return 2.0 ** (1 - 2**j) * float(self.p) ** (-(2**j) * self.eps0)

    def log2_alpha(self, j: int) -> float:
        return 1 - 2**j - 2**j * self.eps0 * math.log2(self.p)

    def phi_closed_form(self) -> float:
        """``2^(1-c) p^(-eps' c / 2^J)`` for the chosen c."""
        c = self.c
        return 2.0 ** (1 - c) * float(self.p) ** (-self.eps_prime * c / 2**self.J)


def iteration_schedule(p: int, d: int, eps_prime: float) -> IterationSchedule:
    """``J = ceil(2d / eps')``, ``eps0 = eps' / 2^J``, ``alpha_0 = p^-eps0``, ``alpha_j = alpha_{j-1}^2 / 2``."""
    if not 0 < eps_prime <= 1:
        raise ValueError("eps' must lie in (0, 1]")
    J = math.ceil(2 * d / eps_prime)
    eps0 = eps_prime / 2**J
    alphas = [float(p) ** (-eps0)]
    for _ in range(J):
        alphas.append(alphas[-1] * alphas[-1] / 2)
    return IterationSchedule(p, d, eps_prime, J, eps0, alphas)


@dataclass
class PairCertificate:
    j: int
    alpha_j: float
    alpha_next: float
    F_size: int
    spec_size: int
    H_order: int
    F_pairs: np.ndarray | None = field(repr=False, default=None)  # (|F_j|, 2) codes, when small
    checked_pairs: int = 0
    full_check: bool = False
    violations: int = 0
    verdict: str = PASS
    notes: list[str] = field(default_factory=list)

    @property
    def E_size(self) -> int:
        return self.F_size * self.H_order**2

    @property
    def A_size(self) -> int:
        return self.spec_size * self.H_order

    @property
    def bound(self) -> Fraction:
        """``(alpha_j^2 / 2) |A_{alpha_j}|^2`` with alpha_j taken as its exact binary value."""
        a = Fraction(self.alpha_j)
        return a * a / 2 * self.A_size**2

    @property
    def size_ok(self) -> bool:
        return self.E_size >= self.bound


def _F_pairs(S: PointSet, T: PointSet) -> np.ndarray:
    pts = S.points()
    tmask = T.mask().ravel()
    out = []
    step = max(1, cap("pairs") // max(len(S), 1))
    for lo in range(0, len(pts), step):
        diff = encode((pts[lo : lo + step, None, :] - pts[None, :, :]) % S.p, S.p)
        i, j = np.nonzero(tmask[diff])
        out.append(np.stack([S.codes[lo + i], S.codes[j]], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=np.int64)


def _sample_F(S: PointSet, T: PointSet, n: int, rng) -> np.ndarray:
    tmask = T.mask().ravel()
    pts = S.points()
    got, tries = [], 0
    while sum(len(g) for g in got) < n:
        a = rng.integers(0, len(S), 4 * n)
        b = rng.integers(0, len(S), 4 * n)
        diff = encode((pts[a] - pts[b]) % S.p, S.p)
        keep = tmask[diff]
        got.append(np.stack([S.codes[a[keep]], S.codes[b[keep]]], axis=1))
        tries += 1
        if tries > 1000:
            break
    return np.concatenate(got)[:n]


def _containment(H: MatrixGroup, S_j: PointSet, S_next: PointSet, xi_pairs: np.ndarray, M1: np.ndarray, M2: np.ndarray) -> tuple[int, int]:
    """Violations among ``(N1, N2)`` built from aligned arrays of pair codes and matrix codes.

    ``N1 = (M1, xi1)``, ``N2 = (M2, -M1^-1 xi2)``; checks both lie in
    ``A_{alpha_j}``, that ``N1 N2`` lies in ``A_{alpha_{j+1}}`` and that
    ``(xi1, xi2)`` is recovered from ``(N1, N2)``.
    """
    p, d = H.p, H.d
    pd = p**d
    xi1 = decode(xi_pairs[:, 0], p, d)
    xi2 = decode(xi_pairs[:, 1], p, d)
    A1 = H.arrays[np.searchsorted(H.codes, M1)]
    A1inv_xi2 = matvec_batch(_inv_stack(A1, p), xi2, p)
    t2 = (-A1inv_xi2) % p
    n1 = M1 * pd + encode(xi1, p)
    n2 = M2 * pd + encode(t2, p)
    bad = ~(S_j.contains_codes(encode(xi1, p)) & S_j.contains_codes(encode(t2, p)))
    prod = aff_mul(n1, n2, p, d, outer=False)
    lin, tr = np.divmod(prod, pd)
    bad |= ~(H.contains_codes(lin) & S_next.contains_codes(tr))
    # recover (xi1, xi2) = (R(N1), -L(N1) R(N2))
    rec2 = (-matvec_batch(A1, t2, p)) % p
    bad |= (encode(rec2, p) != xi_pairs[:, 1])
    return int(bad.sum()), int(bad.size)


def _inv_stack(M: np.ndarray, p: int) -> np.ndarray:
    from .fp import inverse_batch

    return inverse_batch(M, p)


def prop_p_iteration(
    H: MatrixGroup,
    I: OrbitSet | PointSet,
    eps_prime: float,
    field_: SpectrumField | None = None,
    exact: bool = False,
    sample: int = 10_000,
    full_limit: int = 1_000_000,
    seed: int = 0,
) -> tuple[IterationSchedule, PairCertificate]:
    """Run the spectral ladder, pick the pigeonhole rung, and certify its pair relation.

    The chosen ``j`` is the smallest index in ``[0, J-1]`` with
    ``|Spec_{alpha_{j+1}}| <= p^(d/J) |Spec_{alpha_j}|``, compared exactly as
    ``|Spec_{alpha_{j+1}}|^J <= p^d |Spec_{alpha_j}|^J``.
    """
    pts = I.points if isinstance(I, OrbitSet) else I
    p, d = pts.p, pts.d
    sched = iteration_schedule(p, d, eps_prime)
    field_ = dft_full(pts) if field_ is None else field_
    specs = [spec_alpha(field_, a, exact=exact, band=VERIFY_BAND) for a in sched.alphas]
    sched.spec_sizes = [len(s) for s in specs]
    notes = []
    for j in range(sched.J):
        if len(specs[j + 1]) ** sched.J <= p**d * len(specs[j]) ** sched.J:
            sched.chosen_j = j
            break
    if sched.chosen_j is None:
        raise AssertionError("pigeonhole failed: spectrum sizes exceed p^d")
    j = sched.chosen_j
    S_j, S_n = specs[j].points, specs[j + 1].points
    flagged = [k for k in range(j + 2) if not specs[k].clean]
    if flagged:
        notes.append(f"margin flags at rungs {flagged}")

    F_size = pair_count(S_j, S_n)
    cert = PairCertificate(j, sched.alphas[j], sched.alphas[j + 1], F_size, len(S_j), H.order, notes=notes)
    if F_size <= cap("pairs"):
        cert.F_pairs = _F_pairs(S_j, S_n)
    rng = np.random.default_rng(seed)
    if cert.E_size <= full_limit and cert.F_pairs is not None:
        k = len(cert.F_pairs)
        idx = np.arange(k * H.order * H.order)
        fi, rest = np.divmod(idx, H.order * H.order)
        m1, m2 = np.divmod(rest, H.order)
        cert.full_check = True
    else:
        n = max(sample, 10_000)
        if cert.F_pairs is not None:
            fi = rng.integers(0, len(cert.F_pairs), n)
            pairs = cert.F_pairs
        else:
            pairs = _sample_F(S_j, S_n, n, rng)
            fi = np.arange(len(pairs))
        m1 = rng.integers(0, H.order, fi.size)
        m2 = rng.integers(0, H.order, fi.size)
        cert.F_pairs = cert.F_pairs if cert.F_pairs is not None else pairs
    viol = checked = 0
    step = 1 << 18
    for lo in range(0, fi.size, step):
        v, c = _containment(
            H, S_j, S_n, cert.F_pairs[fi[lo : lo + step]], H.codes[m1[lo : lo + step]], H.codes[m2[lo : lo + step]]
        )
        viol += v
        checked += c
    cert.violations, cert.checked_pairs = viol, checked
    if viol or not cert.size_ok:
        cert.verdict = FAIL
        if viol:
            notes.append(f"{viol} restricted products left A_alpha_(j+1)")
        if not cert.size_ok:
            notes.append("|E_j| below (alpha_j^2/2)|A|^2")
    elif flagged:
        cert.verdict = INCONCLUSIVE
    return sched, cert


# ---------------------------------------------------------------------------
# block inequalities


def block_observations_check(A: AffineSet, A_prime: AffineSet | None = None) -> CheckReport:
    """The two fiber observations for products of affine sets, plus the intersection bound.

    * ``|A^2| >= |L(A)| max_N |R_N(A)|``
    * when ``A = A^-1``: ``|R_M(A^3)| >= max_N |R_N(A)|`` for every ``M`` in ``L(A)``
    * ``|A ∩ A'| <= |L(A ∩ A')| max_N |R_N(A ∩ A')|``
    """
    bA = A.blocks
    A2 = product_set(A, A)
    ok1 = len(A2) >= len(bA) * bA.max_fiber
    details = {"size": len(A), "size2": len(A2), "L": len(bA), "max_fiber": bA.max_fiber, "obs1": ok1}
    ok2 = True
    if A.symmetric:
        A3 = product_set(A2, A)
        b3 = A3.blocks
        idx = np.searchsorted(b3.L, bA.L)
        present = (idx < b3.L.size) & (b3.L[np.minimum(idx, b3.L.size - 1)] == bA.L)
        sizes = np.where(present, b3.fiber_sizes[np.minimum(idx, b3.L.size - 1)], 0)
        ok2 = bool((sizes >= bA.max_fiber).all())
        details.update(min_fiber_A3_over_L=int(sizes.min()), obs2=ok2)
    else:
        details["obs2"] = "skipped (A not symmetric)"
    Ap = A2 if A_prime is None else A_prime
    X = A & Ap
    bX = X.blocks
    ok3 = len(X) <= len(bX) * bX.max_fiber
    details.update(intersection=len(X), obs3=ok3)
    return CheckReport("block_observations", verdict(ok1 and ok2 and ok3), details)


def _hypotheses(A: AffineSet, B: AffineSet, K: Fraction, meet: int, B_growth: GrowthReport | None) -> tuple[bool, dict]:
    info = {}
    if not (B.contains_identity and B.symmetric):
        info["B_symmetric_with_identity"] = False
        return False, info
    g = B_growth if B_growth is not None else growth_report(B)
    info.update(B_covering_K=g.covering_K, B_size=len(B), A_size=len(A), intersection=meet)
    ok = g.covering_K <= K and len(B) <= K * len(A) and meet * K >= len(A)
    return ok, info


def blocks_lemma_check(A: AffineSet, B: AffineSet, K, B_growth: GrowthReport | None = None) -> CheckReport:
    """The four block inequalities for a K-approximate group B close to A.

    Hypotheses (checked first, reported as unmet rather than failed):
    ``B`` symmetric with 1, greedy covering number ``<= K``, ``|B| <= K|A|``,
    ``|A ∩ B| >= |A| / K``.
    """
    K = Fraction(K)
    X = A & B
    ok, info = _hypotheses(A, B, K, len(X), B_growth)
    if not ok:
        return CheckReport("blocks_lemma", UNMET, info)
    bA, bB, bX = A.blocks, B.blocks, X.blocks
    LAB = np.intersect1d(bA.L, bB.L).size
    # R_N(A) ∩ R_N(B) = R_N(A ∩ B), so the max over L(A ∩ B) is bX.max_fiber
    m_int = bX.max_fiber
    ineq = {
        "L_B <= K^3 |L_A ∩ L_B|": len(bB) <= K**3 * LAB,
        "|L_A ∩ L_B| >= K^-1 (min/max) |L_A|": LAB * K * bA.max_fiber >= bA.min_fiber * len(bA),
        "max R_B <= K^3 max R_(A∩B)": bB.max_fiber <= K**3 * m_int,
        "max R_(A∩B) >= K^-1 min R_A": m_int * K >= bA.min_fiber,
    }
    info.update(K=K, L_A=len(bA), L_B=len(bB), L_AB=LAB, max_RA=bA.max_fiber, min_RA=bA.min_fiber,
                max_RB=bB.max_fiber, max_R_AB=m_int, inequalities=ineq)
    return CheckReport("blocks_lemma", verdict(all(ineq.values())), info)


def stab_lemma_check(
    A_alpha: AffineSet,
    B: AffineSet,
    g: AffineElement,
    xi: FpVector,
    K,
    H: MatrixGroup | None = None,
    profile: InstanceProfile | None = None,
    B_growth: GrowthReport | None = None,
) -> CheckReport:
    """The stabilizer-fraction bound for ``L(B)``, checked through its proof chain.

    With ``s = |Stab_H(xi)| / |H|`` standing in for ``p^(-delta beta)``:

    1. ``|L(g)^-1 H ∩ L(B)| <= |Stab_H(xi)| |S|`` where S picks one element of
       L(B) per coset of ``Stab(xi)``, and ``|L(g)^-1 H ∩ L(B)| >= |H| / K``;
    2. ``|L(B^2)| >= |S| |L(B) ∩ Stab(xi)|`` and ``|L(B^2)| <= K^6 |L(B)|``;
    3. ``|L(B) ∩ Stab(xi)| <= K^7 s |L(B)|``.
    """
    K = Fraction(K)
    if xi.is_zero():
        raise ValueError("xi must be nonzero")
    gA = A_alpha.left(g.inverse())
    meet = len(gA & B)  # = |A_alpha ∩ g B|
    ok, info = _hypotheses(A_alpha, B, K, meet, B_growth)
    if not ok:
        return CheckReport("stab_lemma", UNMET, info)
    p, d = B.p, B.d
    H = A_alpha.blocks.linear_group() if H is None else H
    bB = B.blocks
    LB = decode(bB.L, p, d * d).reshape(-1, d, d)
    x = xi.array()
    images = encode(matvec_batch(LB, x[None, :], p), p)
    S = np.unique(images).size
    in_stab = int((images == xi.code).sum())
    stab_H = stabilizer(H, xi).order
    LgH = np.intersect1d(gA.blocks.L, bB.L).size
    B2 = product_set(B, B)
    LB2 = len(B2.blocks)
    chain = {
        "step1_upper": LgH <= stab_H * S,
        "step1_lower": LgH * K >= H.order,
        "step2_cosets": LB2 >= S * in_stab,
        "step2_growth": LB2 <= K**6 * len(bB),
        "final": in_stab * H.order <= K**7 * stab_H * len(bB),
    }
    info.update(K=K, H_order=H.order, stab_H_xi=stab_H, cosets_S=S, LgH_meet_LB=LgH, L_B=len(bB),
                L_B2=LB2, L_B_meet_stab=in_stab, chain=chain)
    if profile is not None:
        # |I|^(-beta_eff) = max_hyperplane_hit / |I|
        frac = profile.max_hyperplane_hit / profile.orbit_size
        info["paper_form"] = in_stab <= float(K**7) * frac * len(bB) * (1 + 1e-12)
    return CheckReport("stab_lemma", verdict(all(chain.values())), info)


@dataclass
class TranslateUnion:
    M: int
    base_fiber: PointSet
    V: Subspace
    T: PointSet
    F: PointSet  # one representative per coset of V

    @property
    def ratio(self) -> float:
        return len(self.base_fiber) / len(self.T)


def _coset_key(pts: np.ndarray, V: Subspace) -> np.ndarray:
    """Canonical representative of ``x + V``: clear the pivot coordinates of V."""
    x = pts.copy() % V.p
    for row, c in zip(V.basis, V.pivots()):
        x = (x - x[:, c : c + 1] * np.array(row)[None, :]) % V.p
    return x


def translate_union_check(B: AffineSet, k: int, M: FpMatrix | int, V: Subspace) -> tuple[TranslateUnion, CheckReport]:
    """``T_M = R_M(B^{3k}) + V`` is a union of V-cosets inside ``R_M(B^{4k})``.

    Requires ``{(I, v) : v in V} ⊆ B^k`` and ``M in L(B)``.
    """
    if V.dim == 0:
        raise ValueError("V must be a nontrivial subspace")
    if k < 1:
        raise ValueError("k must be positive")
    p, d = B.p, B.d
    Mcode = M.code if isinstance(M, FpMatrix) else int(M)
    if not _members(B.blocks.L, Mcode):
        raise ValueError("M is not in L(B)")
    Bk = power_set(B, k)
    ident_lin = aff_identity_code(p, d) // p**d
    if not (Bk.blocks.fiber(ident_lin).contains_codes(encode(V.elements(), p))).all():
        raise ValueError("V is not contained in R_I(B^k)")
    B3k = power_set(B, 3 * k)
    B4k = power_set(B, 4 * k)
    base = B3k.blocks.fiber(Mcode)
    T = base.sumset(V)
    R4 = B4k.blocks.fiber(Mcode)
    reps = PointSet(p, d, encode(_coset_key(T.points(), V), p))
    checks = {
        "T_in_R_M(B^4k)": T <= R4,
        "base_in_T": base <= T,
        "disjoint_union": len(T) == len(reps) * len(V),
    }
    tu = TranslateUnion(Mcode, base, V, T, reps)
    info = {"k": k, "base": len(base), "T": len(T), "cosets": len(reps), "R4": len(R4), "ratio": tu.ratio, "checks": checks}
    return tu, CheckReport("translate_union", verdict(all(checks.values())), info)
