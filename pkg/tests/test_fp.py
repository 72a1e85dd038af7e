import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from orbitsum.fp import (
    AffineHyperplane,
    CapExceeded,
    FpMatrix,
    FpVector,
    ModulusMismatch,
    PointSet,
    PrimeModulus,
    SingularMatrix,
    Subspace,
    all_subspaces,
    coset_reps,
    hyperplane_enumerate,
    inverse_batch,
    mat_ops,
    matmul_batch,
    perp,
    span,
)

SMALL_PRIMES = [3, 5, 7, 11, 13]


def test_modulus_rejects_composites_and_small():
    for bad in (1, 2, 4, 9, 15, 91):
        with pytest.raises(ValueError):
            PrimeModulus(bad)
    assert PrimeModulus(2_147_483_647).p == 2_147_483_647


def test_inverse_example():
    a = FpMatrix(5, [[2, 0], [0, 3]])
    assert a.inverse() == FpMatrix(5, [[3, 0], [0, 2]])
    assert mat_ops(a, op="inverse") == FpMatrix(5, [[3, 0], [0, 2]])


def test_identity_action():
    assert FpMatrix.identity(7, 2) @ FpVector(7, [3, 4]) == FpVector(7, [3, 4])


def test_transpose_action_example():
    a = FpMatrix(5, [[1, 1], [0, 1]])
    assert a @ FpVector(5, [1, 0]) == FpVector(5, [1, 0])
    assert a.T @ FpVector(5, [1, 0]) == FpVector(5, [1, 1])


def test_errors():
    with pytest.raises(ModulusMismatch):
        FpMatrix(5, [[1]]) @ FpVector(7, [1])
    with pytest.raises(SingularMatrix):
        FpMatrix(5, [[1, 2], [2, 4]]).inverse()
    assert not FpMatrix(5, [[1, 2], [2, 4]]).invertible


@st.composite
def invertible(draw, p=None, d=None):
    p = draw(st.sampled_from(SMALL_PRIMES)) if p is None else p
    d = draw(st.integers(1, 3)) if d is None else d
    entries = draw(st.lists(st.integers(0, p - 1), min_size=d * d, max_size=d * d))
    m = FpMatrix(p, np.array(entries).reshape(d, d))
    if not m.invertible:
        m = FpMatrix.identity(p, d)
    return m


@given(invertible())
def test_inverse_roundtrip(a):
    ident = FpMatrix.identity(a.p, a.d)
    assert a @ a.inverse() == ident
    assert a.inverse() @ a == ident
    assert a.T.T == a


@given(st.integers(0, 2**31), st.sampled_from([3, 7, 31, 1009]))
@settings(max_examples=30)
def test_batched_inverse_matches_oracle(seed, p):
    rng = np.random.default_rng(seed)
    m = rng.integers(0, p, (20, 2, 2))
    m = m[(m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]) % p != 0]
    if not len(m):
        return
    inv = inverse_batch(m, p)
    prod = matmul_batch(m, inv, p)
    assert (prod == np.eye(2, dtype=np.int64)).all()


def test_matmul_large_prime_no_overflow():
    p = 2_147_483_629
    a = np.full((1, 3, 3), p - 1)
    got = matmul_batch(a, a, p)
    assert (got == (3 * (p - 1) ** 2) % p).all()


def test_perp_examples():
    assert perp(Subspace(5, 2, [[1, 0]])) == Subspace(5, 2, [[0, 1]])
    assert perp(Subspace(3, 2, [[1, 1]])) == Subspace(3, 2, [[1, 2]])


def test_perp_matches_dot_oracle():
    p, d = 3, 2
    for V in all_subspaces(p, d):
        want = oracles.perp(oracles.span(V.basis, p, d), p, d)
        got = frozenset(map(tuple, perp(V).elements().tolist()))
        assert got == want


def test_coset_reps_example():
    reps = coset_reps(Subspace(5, 2, [[0, 1]]))
    assert sorted(map(tuple, reps.tolist())) == [(k, 0) for k in range(5)]


@pytest.mark.parametrize("p,d", [(3, 1), (3, 2), (5, 2), (3, 3), (7, 3)])
def test_subspace_invariants_exhaustive(p, d):
    count = 0
    for V in all_subspaces(p, d):
        count += 1
        W = perp(V)
        assert V.dim + W.dim == d
        assert all(np.dot(a, b) % p == 0 for a in V.basis for b in W.basis)
        assert perp(W) == V
        reps = coset_reps(V)
        assert len(reps) == p ** (d - V.dim)
        for r1, r2 in itertools.combinations(reps.tolist(), 2):
            assert tuple((a - b) % p for a, b in zip(r1, r2)) not in V
    # Gaussian binomials sum: number of subspaces of F_p^d
    expected = {(3, 1): 2, (3, 2): 6, (5, 2): 8, (3, 3): 28, (7, 3): 116}
    assert count == expected[(p, d)]


def test_subspace_canonical_equality():
    a = span([FpVector(7, [2, 4, 0]), FpVector(7, [0, 0, 3])])
    b = Subspace(7, 3, [[1, 2, 5], [0, 0, 2]])
    assert a == b and hash(a) == hash(b)


@pytest.mark.parametrize("p,d,count", [(3, 1, 3), (3, 2, 12), (5, 2, 30), (3, 3, 39)])
def test_hyperplane_counts(p, d, count):
    hs = list(hyperplane_enumerate(p, d))
    assert len(hs) == count == (p**d - 1) // (p - 1) * p
    assert len(set(hs)) == count
    as_sets = {frozenset(x for x in oracles.vecs(p, d) if x in h) for h in hs}
    assert as_sets == oracles.distinct_hyperplanes(p, d)


def test_hyperplane_normalization():
    h = AffineHyperplane.through(FpVector(5, [0, 3]), 1)
    assert h.normal == FpVector(5, [0, 1]) and h.offset == 2
    with pytest.raises(ValueError):
        AffineHyperplane(FpVector(5, [0, 0]), 0)
    with pytest.raises(ValueError):
        AffineHyperplane(FpVector(5, [2, 0]), 0)


def test_hyperplane_cap(monkeypatch):
    monkeypatch.setenv("ORBITSUM_CAP_POINTS", "100")
    with pytest.raises(CapExceeded):
        next(hyperplane_enumerate(11, 2))


def test_pointset_algebra():
    A = PointSet.from_points(5, [(1, 0), (0, 1)])
    B = PointSet.from_points(5, [(0, 1), (2, 2)])
    assert len(A | B) == 3 and len(A & B) == 1 and len(A - B) == 1
    assert A.neg() == PointSet.from_points(5, [(4, 0), (0, 4)])
    assert A.transform(FpMatrix(5, [[0, 1], [1, 0]])) == A
    assert len(A.sumset(Subspace(5, 2, [[1, 0]]))) == 10
