import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from orbitsum.fourier import (
    bluestein_dft,
    dft_full,
    exact_sign,
    exp_sum,
    max_nonzero_ratio,
    pair_count,
    spec_alpha,
    spec_difference_check,
    subspace_concentration_check,
)
from orbitsum.fp import CapExceeded, FpMatrix, FpVector, PointSet, Subspace
from orbitsum.groups import close_generators, hyperplane_profile, orbit

QR7 = PointSet(7, 1, [1, 2, 4])
C4_ORBIT = PointSet.from_points(5, [(1, 0), (0, 1), (4, 0), (0, 4)])


def _random_set(p, d, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, p**d + 1))
    return PointSet(p, d, rng.choice(p**d, size=n, replace=False))


def test_exp_sum_examples():
    assert exp_sum(QR7, [0]) == pytest.approx(3, abs=1e-12)
    assert exp_sum(QR7, [1]) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert exp_sum(PointSet.full(11, 1), [3]) == pytest.approx(0, abs=1e-12)
    assert exp_sum(QR7, FpVector(7, [1])) == pytest.approx(oracles.exp_sum([(1,), (2,), (4,)], (1,), 7))
    with pytest.raises(ValueError):
        exp_sum(PointSet(7, 1, []), [1])


def test_dft_examples():
    single = dft_full(PointSet(11, 2, [17]))
    assert np.allclose(single.magnitudes, 1.0)
    f = dft_full(QR7)
    assert np.allclose(f.magnitudes[1:], math.sqrt(2), atol=1e-12)


def test_bluestein_matches_numpy():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 7, 13, 31, 97):
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.allclose(bluestein_dft(a), n * np.fft.ifft(a), atol=1e-9)


@given(st.sampled_from([3, 5, 7, 11, 13, 17, 31]), st.integers(1, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_fast_and_naive_agree(p, d, seed):
    I = _random_set(p, d, seed)
    fast = dft_full(I, "fast")
    naive = dft_full(I, "naive")
    assert np.max(np.abs(fast.values - naive.values)) <= 1e-9 * len(I)


@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_field_invariants(p, d, seed):
    f = dft_full(_random_set(p, d, seed))
    assert f.parseval_error() <= 1e-6
    assert f.symmetry_error() <= f.tolerance
    assert f.zero_error() <= f.tolerance


def test_dft_cap(monkeypatch):
    monkeypatch.setenv("ORBITSUM_CAP_POINTS", "100")
    with pytest.raises(CapExceeded):
        dft_full(PointSet(11, 2, [1]))


def test_spec_alpha_examples():
    f = dft_full(QR7)
    assert spec_alpha(f, 0.5).points.codes.tolist() == [0]
    assert spec_alpha(f, 0.4).points.codes.tolist() == list(range(7))
    assert 0 in spec_alpha(dft_full(_random_set(11, 2, 3)), 0.99).points.codes


def test_spec_margin_band_and_exact():
    # |S(xi)| = sqrt(2) exactly, so alpha = sqrt(2)/3 sits on the threshold
    f = dft_full(QR7)
    a = math.sqrt(2) / 3
    S = spec_alpha(f, a)
    assert len(S.margin_flags) == 6 and not S.clean
    # the exact value sqrt(2)/3 is irrational, so a float alpha is strictly on one side
    S_exact = spec_alpha(f, a, exact=True)
    assert S_exact.clean and S_exact.resolved_exact == 6
    want_in = Fraction(repr(a)) ** 2 * 9 < 2
    assert len(S_exact.points) == (7 if want_in else 1)


def test_exact_sign_cases():
    # |S(1)|^2 = 2 for QR7
    assert exact_sign(QR7, [1], Fraction(1, 2)) == -1  # 2 < 9/4
    assert exact_sign(QR7, [1], Fraction(2, 5)) == 1  # 2 > 36/25
    # rational tie: the full line at xi = 0 gives |S|^2 = 49 = (1)^2 * 49
    assert exact_sign(PointSet.full(7, 1), [0], Fraction(1)) == 0
    # irrational |S|^2 = (7+1)/4 ... for p = 11, |S|^2 = 3
    QR11 = PointSet(11, 1, [1, 3, 4, 5, 9])
    assert exact_sign(QR11, [1], Fraction(1, 3)) == 1  # 3 > 25/9


def test_max_nonzero_ratio_examples():
    assert max_nonzero_ratio(dft_full(PointSet.full(7, 1))) == pytest.approx(0, abs=1e-12)
    assert max_nonzero_ratio(dft_full(QR7)) == pytest.approx(0.4714045207910317, abs=1e-12)
    U = close_generators([FpMatrix(11, [[1, 1], [0, 1]])])
    f = dft_full(orbit(U, FpVector(11, [1, 0])))
    assert max_nonzero_ratio(f) == pytest.approx(1.0, abs=1e-12)
    assert f.magnitude((1, 0)) == pytest.approx(11, abs=1e-9)


@pytest.mark.parametrize("p", [7, 11, 19, 23, 31, 43, 59])
def test_quadratic_residue_law(p):
    qr = sorted({x * x % p for x in range(1, p)})
    f = dft_full(PointSet(p, 1, qr))
    assert np.allclose(f.magnitudes[1:], math.sqrt(p + 1) / 2, atol=1e-9)


def test_pair_count_methods_agree():
    for seed in range(5):
        S = _random_set(11, 2, seed)
        T = _random_set(11, 2, seed + 100)
        brute = sum(1 for a in S.points() for b in S.points() if int(((a - b) % 11) @ [11, 1]) in set(T.codes.tolist()))
        assert pair_count(S, T, "direct") == pair_count(S, T, "convolution") == brute


def test_spec_difference_examples():
    r = spec_difference_check(dft_full(QR7), 0.4)
    assert r.ok and r.details["pair_count"] == 49 and r.details["bound"] == pytest.approx(3.92)
    r = spec_difference_check(dft_full(QR7), 0.5)
    assert r.ok and r.details["spec_size"] == 1 and r.details["pair_count"] == 1


@given(st.sampled_from([5, 7, 11]), st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_spec_difference_random(p, seed):
    f = dft_full(_random_set(p, 2, seed))
    for k in range(1, 10):
        assert spec_difference_check(f, k / 10, exact=True).verdict in ("pass", "inconclusive")


def test_concentration_examples():
    r = subspace_concentration_check(C4_ORBIT, 0.3, (0, 0), Subspace(5, 2, [[1, 0]]))
    assert r.rhs_exact == pytest.approx(2.5) and r.max_fiber == 2 and r.ok
    assert abs(r.energy - r.dual_energy) <= 1e-6 * r.energy
    r = subspace_concentration_check(QR7, 0.4, (0,), Subspace(7, 1, [[1]]))
    assert r.rhs_exact == pytest.approx(7 / 3) and r.ok
    U = close_generators([FpMatrix(11, [[1, 1], [0, 1]])])
    I = orbit(U, FpVector(11, [1, 0]))
    r = subspace_concentration_check(I, 0.5, (0, 0), Subspace(11, 2, [[0, 1]]), profile=hyperplane_profile(I))
    # each fiber over x + V^perp (V^perp = first axis) holds exactly one point
    assert r.max_fiber == 1 and r.rhs_exact == pytest.approx(1.0) and r.ok
    with pytest.raises(ValueError):
        subspace_concentration_check(QR7, 0.4, (0,), Subspace(7, 1, []))


@given(st.sampled_from([5, 7]), st.integers(0, 2**32 - 1), st.sampled_from([0.2, 0.5, 0.8]))
@settings(max_examples=20, deadline=None)
def test_concentration_random(p, seed, alpha):
    I = _random_set(p, 2, seed)
    rng = np.random.default_rng(seed)
    V = Subspace(p, 2, [rng.integers(0, p, 2) if seed % 3 else [1, 0]]) if seed % 5 else Subspace(p, 2, np.eye(2))
    if V.dim == 0:
        V = Subspace(p, 2, [[0, 1]])
    eta = tuple(int(x) for x in rng.integers(0, p, 2))
    assert subspace_concentration_check(I, alpha, eta, V).verdict in ("pass", "inconclusive")


def test_spectrum_h_invariant_for_transposed_orbits():
    H = close_generators([FpMatrix(11, [[2, 1], [1, 1]])])
    f = dft_full(orbit(H, FpVector(11, [1, 3])))
    for a in (0.2, 0.4, 0.6):
        S = spec_alpha(f, a)
        if not S.clean:
            continue
        assert all(S.points.transform(M) == S.points for M in H.generators)
        assert S.points.neg() == S.points
