"""Instance families, the verifier battery, and deterministic sweeps.

Random draws use numpy's ``Generator(PCG64(seed))`` so instances replay
exactly from their config.  Sweep rows are canonically ordered and floats
are written with 12 significant digits, which makes the CSV byte-stable
across ``jobs`` settings.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .affine import (
    AffineSet,
    block_observations_check,
    blocks_lemma_check,
    build_A_alpha,
    growth_report,
    prop_p_iteration,
    semidirect,
    stab_lemma_check,
    symmetrize,
    translate_union_check,
)
from .fourier import (
    VERIFY_BAND,
    _dft_naive,
    dft_full,
    exp_sums,
    max_nonzero_ratio,
    spec_alpha,
    spec_difference_check,
    subspace_concentration_check,
)
from .fp import (
    CapExceeded,
    FpMatrix,
    FpVector,
    PointSet,
    PrimeModulus,
    Subspace,
    all_subspaces,
    all_vectors,
    cap,
    coset_reps,
    decode,
    det_batch,
)
from .groups import (
    AffineElement,
    InstanceProfile,
    MatrixGroup,
    OrbitSet,
    close_generators,
    commutator,
    hyperplane_profile,
    orbit,
    stab_chain_check,
)
from .reports import FAIL, INCONCLUSIVE, PASS, UNMET, CheckReport, jsonable, verdict

__all__ = [
    "SCHEMA_VERSION",
    "FAMILIES",
    "ALPHA_GRID",
    "CHECKS",
    "InstanceConfig",
    "Instance",
    "SweepResult",
    "gen_instance",
    "verify_all",
    "run_sweep",
    "load_configs",
    "b_family",
    "invariant_subspaces",
    "format_csv",
]

SCHEMA_VERSION = 1
FAMILIES = ("cyclic-random", "diagonal-torus", "quadratic-residue", "unipotent-counterexample", "explicit-generators")
ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))

CHECKS = (
    "profile",
    "stab_chain",
    "dft_oracle",
    "parseval",
    "spec_invariance",
    "spec_difference",
    "concentration",
    "block_observations",
    "prop_p",
    "blocks_lemma",
    "stab_lemma",
    "translate_union",
    "commutator",
    "trend",
)

CSV_FIELDS = (
    "family",
    "p",
    "d",
    "seed",
    "H_order",
    "I_size",
    "delta_eff",
    "beta_eff",
    "max_nonzero_ratio",
    "log_p_ratio",
    *CHECKS,
    "error",
    "timing",
)


@dataclass(frozen=True)
class InstanceConfig:
    p: int
    d: int
    family: str
    v: tuple[int, ...] | None = None
    transposed: bool = True
    seed: int = 0
    gens: tuple = ()
    caps: tuple = ()  # (name, value) pairs
    alphas: tuple[float, ...] = ALPHA_GRID
    eps_prime: float = 0.5
    exact: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.family == "quadratic-residue" and self.d != 1:
            raise ValueError("quadratic-residue needs d = 1")
        if self.family in ("diagonal-torus", "unipotent-counterexample") and self.d < 2:
            raise ValueError(f"{self.family} needs d >= 2")
        if self.family == "explicit-generators" and not self.gens:
            raise ValueError("explicit-generators needs gens")
        if self.v is not None and len(self.v) != self.d:
            raise ValueError("v has the wrong length")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def from_dict(cls, raw: dict) -> InstanceConfig:
        raw = dict(raw)
        if raw.get("v") is not None:
            raw["v"] = tuple(int(x) for x in raw["v"])
        if "gens" in raw:
            raw["gens"] = tuple(tuple(tuple(int(x) for x in row) for row in g) for g in raw["gens"])
        if "caps" in raw:
            caps = raw["caps"]
            raw["caps"] = tuple(sorted(caps.items())) if isinstance(caps, dict) else tuple(map(tuple, caps))
        if "alphas" in raw:
            raw["alphas"] = tuple(float(a) for a in raw["alphas"])
        return cls(**raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["caps"] = dict(self.caps)
        return out

    @property
    def sort_key(self):
        return (self.family, self.p, self.seed, self.d, json.dumps(self.to_dict(), sort_keys=True))


def load_configs(path_or_text: str) -> list[InstanceConfig]:
    """Read a JSON config: ``{"schema_version": 1, "defaults": {...}, "instances": [...]}``.

    An entry may give ``p`` or ``seed`` as a list; the cartesian product is
    expanded.
    """
    try:
        with open(path_or_text) as fh:
            doc = json.load(fh)
    except (FileNotFoundError, OSError):
        doc = json.loads(path_or_text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"expected schema_version {SCHEMA_VERSION}")
    defaults = doc.get("defaults", {})
    out = []
    for entry in doc.get("instances", []):
        merged = {**defaults, **entry}
        ps = merged.pop("p")
        seeds = merged.pop("seed", 0)
        for p in ps if isinstance(ps, list) else [ps]:
            for s in seeds if isinstance(seeds, list) else [seeds]:
                out.append(InstanceConfig.from_dict({**merged, "p": p, "seed": s}))
    return out


# ---------------------------------------------------------------------------
# families


@dataclass
class Instance:
    config: InstanceConfig
    group: MatrixGroup
    orbit: OrbitSet
    profile: InstanceProfile


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _random_invertible(p: int, d: int, rng, tries: int = 1000) -> FpMatrix:
    ident = np.eye(d, dtype=np.int64)
    for _ in range(tries):
        m = rng.integers(0, p, (d, d))
        if det_batch(m[None], p)[0] and not np.array_equal(m, ident):
            return FpMatrix(p, m)
    raise RuntimeError("no usable invertible matrix drawn")


def _random_nonzero(p: int, d: int, rng) -> tuple[int, ...]:
    while True:
        v = rng.integers(0, p, d)
        if v.any():
            return tuple(int(x) for x in v)


def _family_gens(cfg: InstanceConfig, rng) -> list[FpMatrix]:
    p, d = cfg.p, cfg.d
    if cfg.family == "cyclic-random":
        return [_random_invertible(p, d, rng)]
    if cfg.family == "quadratic-residue":
        g = pow(PrimeModulus(p).primitive_root, 2, p)
        return [FpMatrix(p, [[g]])]
    if cfg.family == "diagonal-torus":
        g = PrimeModulus(p).primitive_root
        m = np.eye(d, dtype=np.int64)
        m[0, 0], m[1, 1] = g, pow(g, -1, p)
        return [FpMatrix(p, m)]
    if cfg.family == "unipotent-counterexample":
        m = np.eye(d, dtype=np.int64)
        m[0, 1] = 1
        return [FpMatrix(p, m)]
    return [FpMatrix(p, g) for g in cfg.gens]


def _default_v(cfg: InstanceConfig, rng) -> tuple[int, ...]:
    if cfg.family == "cyclic-random":
        return _random_nonzero(cfg.p, cfg.d, rng)
    if cfg.family == "diagonal-torus":
        return (1,) * cfg.d
    return (1,) + (0,) * (cfg.d - 1)


def gen_instance(cfg: InstanceConfig) -> Instance:
    """Group, orbit and hyperplane profile for ``cfg``; identical configs give identical instances."""
    rng = _rng(cfg.seed)
    gens = _family_gens(cfg, rng)
    v = cfg.v if cfg.v is not None else _default_v(cfg, rng)
    H = close_generators(gens, p=cfg.p, d=cfg.d)
    I = orbit(H, FpVector(cfg.p, v), cfg.transposed)
    return Instance(cfg, H, I, hyperplane_profile(I))


# ---------------------------------------------------------------------------
# B families


def invariant_subspaces(G: MatrixGroup, limit: int = 4096) -> list[Subspace]:
    """Subspaces W with ``M W = W`` for every generator of G (only for small ``p^d``)."""
    if G.p**G.d > limit:
        return [Subspace(G.p, G.d, []), Subspace(G.p, G.d, np.eye(G.d, dtype=np.int64))]
    out = []
    for W in all_subspaces(G.p, G.d):
        el = PointSet.from_points(G.p, W.elements(), G.d)
        if all(el.transform(M) == el for M in G.generators):
            out.append(W)
    return out


def _subgroups(H: MatrixGroup, max_count: int = 4) -> list[MatrixGroup]:
    """Trivial group, H, and cyclic subgroups generated by powers of a generator."""
    trivial = MatrixGroup(H.p, H.d, [FpMatrix.identity(H.p, H.d).code])
    out = {trivial.codes.tobytes(): trivial, H.codes.tobytes(): H}
    for g in H.generators[:1]:
        for k in (2, 3, 4, 6):
            S = close_generators([g**k], p=H.p, d=H.d)
            out.setdefault(S.codes.tobytes(), S)
            if len(out) >= max_count + 2:
                break
    return list(out.values())


@dataclass
class BCandidate:
    B: AffineSet
    K0_order: int
    W_dim: int
    W: Subspace
    kind: str


def b_family(H: MatrixGroup, max_size: int = 20_000, rng=None, shifts: int = 1) -> list[BCandidate]:
    """``K0 ⋉ W`` subgroups for ``K0 <= H`` and K0-invariant W, plus symmetrized coset unions."""
    out = []
    for K0 in _subgroups(H):
        for W in invariant_subspaces(K0):
            if K0.order * len(W) > max_size:
                continue
            B = semidirect(K0, W)
            out.append(BCandidate(B, K0.order, W.dim, W, "semidirect"))
    if rng is not None and shifts:
        base = [c for c in out if c.W_dim > 0 and len(c.B) * 3 <= max_size]
        for c in base[:2]:
            els = c.B.codes
            s = AffineElement.from_code(H.p, int(els[rng.integers(0, els.size)]), H.d)
            t = AffineElement(FpMatrix.identity(H.p, H.d), FpVector(H.p, _random_nonzero(H.p, H.d, rng)))
            g = s @ t
            U = symmetrize(c.B | c.B.left(g))
            out.append(BCandidate(U, c.K0_order, c.W_dim, c.W, "coset-union"))
    return out


def _needed_K(A: AffineSet, B: AffineSet, meet: int, covering: int) -> int:
    need = max(Fraction(covering), Fraction(len(B), len(A)), Fraction(len(A), max(meet, 1)))
    return math.ceil(need)


# ---------------------------------------------------------------------------
# the battery


def _worst(verdicts: Iterable[str]) -> str:
    vs = set(verdicts)
    for v in (FAIL, INCONCLUSIVE):
        if v in vs:
            return v
    if vs and vs <= {UNMET}:
        return UNMET
    return PASS


def _guard(name: str, fn) -> CheckReport:
    try:
        return fn()
    except (CapExceeded, MemoryError) as exc:
        return CheckReport(name, INCONCLUSIVE, {}, f"resource: {exc}")


def _nonzero_sample(p: int, d: int, rng, n: int) -> list[FpVector]:
    if p**d - 1 <= n:
        return [FpVector(p, row) for row in all_vectors(p, d)[1:]]
    return [FpVector(p, _random_nonzero(p, d, rng)) for _ in range(n)]


def _check_profile(inst: Instance) -> CheckReport:
    pr = inst.profile
    ok = 1 <= pr.max_hyperplane_hit <= pr.orbit_size and 0 <= pr.beta_eff <= 1
    ok &= (pr.beta_eff == 0) == (pr.max_hyperplane_hit == pr.orbit_size)
    ok &= inst.group.order % pr.orbit_size == 0
    return CheckReport("profile", verdict(ok), asdict(pr))


def _check_dft(field, I: PointSet, rng, n: int = 2000) -> CheckReport:
    p, d = I.p, I.d
    if p**d <= n:
        ref = _dft_naive(I).ravel()
        got = field.values.ravel()
    else:
        codes = np.unique(rng.integers(0, p**d, n))
        ref = exp_sums(I, decode(codes, p, d))
        got = field.values.ravel()[codes]
    err = float(np.max(np.abs(got - ref)))
    return CheckReport("dft_oracle", verdict(err <= 1e-9 * len(I)), {"max_abs_diff": err, "method": field.method})


def _check_parseval(field) -> CheckReport:
    pe, se, ze = field.parseval_error(), field.symmetry_error(), field.zero_error()
    ok = pe <= 1e-6 and se <= field.tolerance and ze <= field.tolerance
    return CheckReport("parseval", verdict(ok), {"parseval_rel": pe, "symmetry": se, "zero": ze})


def _check_invariance(H: MatrixGroup, specs: dict, transposed: bool) -> CheckReport:
    if not transposed:
        return CheckReport("spec_invariance", UNMET, {}, "orbit not in the transposed convention")
    excluded, bad = [], []
    for a, S in specs.items():
        if not S.clean:
            excluded.append(a)
            continue
        pts = S.points
        if pts.neg() != pts or not all(pts.transform(M) == pts for M in H.generators) or (a < 1 and 0 not in pts.codes):
            bad.append(a)
    info = {"excluded_alphas": excluded, "bad_alphas": bad}
    if bad:
        return CheckReport("spec_invariance", FAIL, info)
    if excluded and len(excluded) == len(specs):
        return CheckReport("spec_invariance", INCONCLUSIVE, info)
    return CheckReport("spec_invariance", PASS, info)


def _check_concentration(I: PointSet, profile, alphas, rng, exact: bool, max_pairs: int = 64) -> CheckReport:
    p, d = I.p, I.d
    subspaces = [V for V in all_subspaces(p, d) if V.dim > 0] if p**d <= 200 else None
    if subspaces is None:
        # sample lines and random eta for larger grids
        pairs = []
        for _ in range(max_pairs):
            V = Subspace(p, d, [_random_nonzero(p, d, rng)])
            pairs.append((V, _random_nonzero(p, d, rng)))
    else:
        pairs = [(V, tuple(int(x) for x in eta)) for V in subspaces for eta in coset_reps(V)]
    verdicts, worst_ratio = [], 0.0
    for V, eta in pairs:
        for a in alphas:
            r = subspace_concentration_check(I, a, eta, V, profile=profile, exact=exact)
            verdicts.append(r.verdict)
            worst_ratio = max(worst_ratio, r.lhs / r.rhs_exact)
    counts = {v: verdicts.count(v) for v in sorted(set(verdicts))}
    return CheckReport("concentration", _worst(verdicts), {"cells": len(verdicts), "verdicts": counts, "max_lhs_over_rhs": worst_ratio})


def _distinct_spectra(specs: dict) -> list:
    seen, out = set(), []
    for a, S in specs.items():
        key = S.points.codes.tobytes()
        if S.clean and key not in seen:
            seen.add(key)
            out.append((a, S))
    return out


def _lemma_tuples(inst: Instance, specs: dict, rng, max_A: int = 4000):
    """(A_alpha, B, g, xi, K, growth) tuples drawn from the B family."""
    H = inst.group
    usable = [(a, S) for a, S in _distinct_spectra(specs) if H.order * len(S) <= max_A]
    if not usable:
        return []
    # prefer a spectrum bigger than {0} when there is one
    usable.sort(key=lambda t: (len(t[1]) == 1, t[0]))
    a, S = usable[0]
    A = build_A_alpha(H, S)
    out = []
    gs = [AffineElement.identity(H.p, H.d), AffineElement.from_code(H.p, int(A.codes[rng.integers(0, len(A))]), H.d)]
    xis = _nonzero_sample(H.p, H.d, rng, 2)
    for cand in b_family(H, rng=rng):
        if len(cand.B) ** 2 > 4 * cap("pairs"):
            continue
        gr = growth_report(cand.B)
        for g in gs:
            meet = len(A & cand.B.left(g))
            if meet == 0:
                continue
            K = _needed_K(A, cand.B, meet, gr.covering_K)
            for xi in xis:
                out.append((A, cand, g, xi, K, gr))
    return out


def _check_block_obs(inst: Instance, specs: dict, max_A: int = 2000) -> CheckReport:
    reports = []
    for a, S in _distinct_spectra(specs):
        if inst.group.order * len(S) > max_A:
            continue
        A = build_A_alpha(inst.group, S)
        reports.append(block_observations_check(A))
    if not reports:
        return CheckReport("block_observations", INCONCLUSIVE, {}, "no A_alpha within size budget")
    return CheckReport("block_observations", _worst(r.verdict for r in reports), {"sets": len(reports)})


def _check_lemmas(tuples) -> tuple[CheckReport, CheckReport]:
    if not tuples:
        msg = "no B candidate meets A_alpha"
        return CheckReport("blocks_lemma", UNMET, {}, msg), CheckReport("stab_lemma", UNMET, {}, msg)
    bl, st = [], []
    seen = set()
    for A, cand, g, xi, K, gr in tuples:
        key = (cand.B.codes.tobytes(), g.code)
        if key not in seen:
            seen.add(key)
            # blocks lemma compares A with B directly, so only the g = 1 tuples apply
            if g.is_identity():
                bl.append(blocks_lemma_check(A, cand.B, K, gr).verdict)
        st.append(stab_lemma_check(A, cand.B, g, xi, K, profile=None, B_growth=gr).verdict)
    def pack(name, vs):
        counts = {v: vs.count(v) for v in sorted(set(vs))}
        return CheckReport(name, _worst(vs) if vs else UNMET, {"tuples": len(vs), "verdicts": counts})
    return pack("blocks_lemma", bl), pack("stab_lemma", st)


def _check_translate_union(H: MatrixGroup) -> CheckReport:
    vs = []
    for cand in b_family(H):
        if cand.W_dim == 0 or len(cand.B) > 2000:
            continue
        M = int(cand.B.blocks.L[-1])
        for k in (1, 2):
            _, rep = translate_union_check(cand.B, k, M, cand.W)
            vs.append(rep.verdict)
    if not vs:
        return CheckReport("translate_union", UNMET, {}, "no candidate with dim W > 0")
    return CheckReport("translate_union", _worst(vs), {"cases": len(vs)})


def _check_commutator(p: int, d: int, rng, n: int = 200) -> CheckReport:
    bad = 0
    ident = FpMatrix.identity(p, d)
    for _ in range(n):
        xi = FpVector(p, rng.integers(0, p, d))
        eta = FpVector(p, rng.integers(0, p, d))
        N = _random_invertible(p, d, rng) if p**(d * d) > 1 else ident
        got = commutator(AffineElement(ident, xi), AffineElement(N, eta))
        want = AffineElement(ident, (ident - N) @ xi)
        bad += got != want
    return CheckReport("commutator", verdict(bad == 0), {"triples": n, "mismatches": bad})


def _check_trend(profile: InstanceProfile, ratio: float) -> CheckReport:
    if profile.beta_eff == 0 or profile.orbit_size <= 1:
        return CheckReport("trend", UNMET, {"beta_eff": profile.beta_eff}, "orbit lies in a hyperplane")
    return CheckReport("trend", verdict(ratio < 1 - 1e-12), {"ratio": ratio})


def verify_all(inst: Instance, alphas: Sequence[float] | None = None, eps_prime: float | None = None, exact: bool | None = None) -> dict[str, CheckReport]:
    """Run the whole battery; each entry is one verdict, and a resource failure only marks its own check."""
    cfg = inst.config
    alphas = tuple(cfg.alphas if alphas is None else alphas)
    eps_prime = cfg.eps_prime if eps_prime is None else eps_prime
    exact = cfg.exact if exact is None else exact
    rng = _rng(cfg.seed ^ 0x5EED)
    H, I = inst.group, inst.orbit.points
    out: dict[str, CheckReport] = {"profile": _check_profile(inst)}
    v = inst.orbit.base_point
    out["stab_chain"] = _guard(
        "stab_chain",
        lambda: _pack_many("stab_chain", [stab_chain_check(H, v, xi) for xi in _nonzero_sample(H.p, H.d, rng, 8)]),
    )
    try:
        field = dft_full(I)
    except CapExceeded as exc:
        for name in CHECKS[2:]:
            out.setdefault(name, CheckReport(name, INCONCLUSIVE, {}, f"resource: {exc}"))
        return out
    out["dft_oracle"] = _check_dft(field, I, rng)
    out["parseval"] = _check_parseval(field)
    specs = {a: spec_alpha(field, a, exact=exact, band=VERIFY_BAND) for a in alphas}
    out["spec_invariance"] = _check_invariance(H, specs, inst.orbit.transposed)
    out["spec_difference"] = _guard(
        "spec_difference",
        lambda: _pack_many("spec_difference", [spec_difference_check(field, a, exact=exact) for a in alphas]),
    )
    out["concentration"] = _guard("concentration", lambda: _check_concentration(I, inst.profile, alphas, rng, exact))
    out["block_observations"] = _guard("block_observations", lambda: _check_block_obs(inst, specs))
    out["prop_p"] = _guard("prop_p", lambda: _prop_p_report(H, inst.orbit, eps_prime, field, exact, cfg.seed))
    try:
        tuples = _lemma_tuples(inst, specs, rng) if inst.orbit.transposed else []
        out["blocks_lemma"], out["stab_lemma"] = _check_lemmas(tuples)
    except (CapExceeded, MemoryError) as exc:
        out["blocks_lemma"] = CheckReport("blocks_lemma", INCONCLUSIVE, {}, f"resource: {exc}")
        out["stab_lemma"] = CheckReport("stab_lemma", INCONCLUSIVE, {}, f"resource: {exc}")
    out["translate_union"] = _guard("translate_union", lambda: _check_translate_union(H))
    out["commutator"] = _check_commutator(H.p, H.d, rng)
    out["trend"] = _check_trend(inst.profile, max_nonzero_ratio(field))
    return out


def _pack_many(name: str, reports: list[CheckReport]) -> CheckReport:
    vs = [r.verdict for r in reports]
    return CheckReport(name, _worst(vs), {"cases": len(vs), "verdicts": {v: vs.count(v) for v in sorted(set(vs))}})


def _prop_p_report(H, I, eps_prime, field, exact, seed) -> CheckReport:
    if not I.transposed:
        return CheckReport("prop_p", UNMET, {}, "orbit not in the transposed convention")
    sched, cert = prop_p_iteration(H, I, eps_prime, field_=field, exact=exact, seed=seed)
    info = {
        "J": sched.J,
        "chosen_j": sched.chosen_j,
        "spec_sizes": sched.spec_sizes,
        "F_size": cert.F_size,
        "E_size": cert.E_size,
        "bound": float(cert.bound),
        "checked": cert.checked_pairs,
        "full": cert.full_check,
        "violations": cert.violations,
    }
    return CheckReport("prop_p", cert.verdict, info, "; ".join(cert.notes))


# ---------------------------------------------------------------------------
# sweeps


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.12g}"
    return str(x)


def _run_row(cfg: InstanceConfig, timing: bool = False) -> tuple[dict, dict]:
    import os

    saved = {}
    for name, value in cfg.caps:
        key = f"ORBITSUM_CAP_{name.upper()}"
        saved[key] = os.environ.get(key)
        os.environ[key] = str(value)
    t0 = time.perf_counter()
    row: dict[str, Any] = {"family": cfg.family, "p": cfg.p, "d": cfg.d, "seed": cfg.seed}
    details: dict[str, Any] = {"config": cfg.to_dict()}
    try:
        inst = gen_instance(cfg)
        field = dft_full(inst.orbit.points)
        ratio = max_nonzero_ratio(field)
        row.update(
            H_order=inst.group.order,
            I_size=inst.profile.orbit_size,
            delta_eff=inst.profile.delta_eff,
            beta_eff=inst.profile.beta_eff,
            max_nonzero_ratio=ratio,
            log_p_ratio=math.log(ratio) / math.log(cfg.p) if ratio > 0 else float("-inf"),
        )
        reports = verify_all(inst)
        for name in CHECKS:
            row[name] = reports[name].verdict
        details["checks"] = {k: r.as_dict() for k, r in reports.items()}
        row["error"] = ""
    except Exception as exc:  # one bad row must not sink the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    finally:
        for key, old in saved.items():
            if old is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = old
    row["timing"] = f"{time.perf_counter() - t0:.3f}" if timing else ""
    return row, details


@dataclass
class SweepResult:
    rows: list[dict] = field(default_factory=list)
    details: list[dict] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r.get(c) == FAIL for r in self.rows for c in CHECKS)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_csv(self) -> str:
        return format_csv(self.rows)

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "fields": list(CSV_FIELDS),
            "rows": [{k: jsonable(r.get(k, "")) for k in CSV_FIELDS} for r in self.rows],
            "details": jsonable(self.details),
        }
        return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False, default=str)


def format_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_fmt(r.get(k, "")) for k in CSV_FIELDS])
    return buf.getvalue()


def run_sweep(configs: Sequence[InstanceConfig], jobs: int = 1, timing: bool = False) -> SweepResult:
    """Run the battery over ``configs``; output order depends only on the configs."""
    configs = sorted(configs, key=lambda c: c.sort_key)
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_row, configs, [timing] * len(configs)))
    else:
        results = [_run_row(c, timing) for c in configs]
    return SweepResult([r for r, _ in results], [d for _, d in results])
