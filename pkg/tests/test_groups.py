import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from orbitsum.fp import CapExceeded, FpMatrix, FpVector, PointSet
from orbitsum.groups import (
    AffineElement,
    aff_close,
    close_generators,
    commutator,
    hyperplane_profile,
    lower_central_probe,
    orbit,
    stab_chain_check,
    stabilizer,
)


def _mset(G):
    return {tuple(map(tuple, m.array().tolist())) for m in G.elements()}


def test_closure_examples():
    G = close_generators([FpMatrix(7, [[2]])])
    assert G.order == 3 and sorted(G.codes.tolist()) == [1, 2, 4]
    assert close_generators([FpMatrix.identity(5, 2)]).order == 1
    C4 = close_generators([FpMatrix(5, [[0, 4], [1, 0]])])
    assert C4.order == 4
    assert FpMatrix(5, [[0, 4], [1, 0]]) ** 2 == FpMatrix(5, [[4, 0], [0, 4]])


@pytest.mark.parametrize(
    "gens,p",
    [
        ([((1, 1), (0, 1)), ((2, 0), (0, 1))], 5),
        ([((0, 4), (1, 0)), ((1, 2), (0, 1))], 3),
        ([((1, 1, 0), (0, 1, 0), (0, 0, 2))], 3),
    ],
)
def test_closure_matches_oracle_and_is_idempotent(gens, p):
    G = close_generators([FpMatrix(p, g) for g in gens])
    assert _mset(G) == oracles.closure(gens, p)
    assert G.is_closed()
    assert close_generators(G.elements()) == G


def test_closure_cap():
    with pytest.raises(CapExceeded) as err:
        close_generators([FpMatrix(11, [[1, 1], [0, 1]]), FpMatrix(11, [[2, 0], [0, 1]])], limit=50)
    assert err.value.partial is not None


def test_orbit_examples():
    H = close_generators([FpMatrix(7, [[2]])])
    assert sorted(orbit(H, FpVector(7, [3])).points.codes.tolist()) == [3, 5, 6]
    C4 = close_generators([FpMatrix(5, [[0, 4], [1, 0]])])
    pts = {tuple(x) for x in orbit(C4, FpVector(5, [1, 0])).points.points().tolist()}
    assert pts == {(1, 0), (0, 1), (4, 0), (0, 4)}
    trivial = close_generators([FpMatrix.identity(5, 2)])
    assert len(orbit(trivial, FpVector(5, [2, 3])).points) == 1
    with pytest.raises(ValueError):
        orbit(C4, FpVector(5, [0, 0]))


def test_stabilizer_examples():
    D = close_generators([FpMatrix(5, [[2, 0], [0, 3]])])
    assert D.order == 4
    assert stabilizer(D, FpVector(5, [1, 0])).order == 1
    H = close_generators([FpMatrix(7, [[2]])])
    st_ = stabilizer(H, FpVector(7, [1]))
    assert st_.order == 1 and len(orbit(H, FpVector(7, [1]), transposed=False).points) * st_.order == 3


@st.composite
def group_and_vector(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    d = draw(st.integers(1, 2))
    ngen = draw(st.integers(1, 2))
    gens = []
    for _ in range(ngen):
        e = draw(st.lists(st.integers(0, p - 1), min_size=d * d, max_size=d * d))
        m = FpMatrix(p, np.array(e).reshape(d, d))
        gens.append(m if m.invertible else FpMatrix.identity(p, d))
    v = draw(st.lists(st.integers(0, p - 1), min_size=d, max_size=d).filter(any))
    return close_generators(gens), FpVector(p, v)


@given(group_and_vector(), st.booleans())
@settings(max_examples=60, deadline=None)
def test_orbit_stabilizer(gv, transposed):
    H, v = gv
    I = orbit(H, v, transposed)
    S = stabilizer(H, v, transposed)
    assert len(I.points) * S.order == H.order
    assert H.order % len(I.points) == 0


@given(group_and_vector(), st.data())
@settings(max_examples=40, deadline=None)
def test_stab_chain_holds(gv, data):
    H, v = gv
    xi = data.draw(st.lists(st.integers(0, H.p - 1), min_size=H.d, max_size=H.d).filter(any))
    assert stab_chain_check(H, v, FpVector(H.p, xi)).ok


def test_profile_examples():
    p = 11
    U = close_generators([FpMatrix(p, [[1, 1], [0, 1]])])
    prof = hyperplane_profile(orbit(U, FpVector(p, [1, 0])))
    assert prof.max_hyperplane_hit == p == prof.orbit_size and prof.beta_eff == 0
    C4 = close_generators([FpMatrix(5, [[0, 4], [1, 0]])])
    prof = hyperplane_profile(orbit(C4, FpVector(5, [1, 0])))
    assert prof.max_hyperplane_hit == 2
    assert prof.beta_eff == pytest.approx(0.5, abs=1e-12)
    H = close_generators([FpMatrix(7, [[2]])])
    prof = hyperplane_profile(orbit(H, FpVector(7, [1])))
    assert prof.max_hyperplane_hit == 1 and prof.beta_eff == 1.0
    assert prof.delta_eff == pytest.approx(math.log(3) / math.log(7))


@given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_profile_matches_bruteforce(p, d, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, p**d + 1))
    codes = rng.choice(p**d, size=n, replace=False)
    I = PointSet(p, d, codes)
    pts = [tuple(x) for x in I.points().tolist()]
    prof = hyperplane_profile(I)
    assert prof.max_hyperplane_hit == oracles.max_hyperplane_hit(pts, p, d)
    assert 1 <= prof.max_hyperplane_hit <= prof.orbit_size
    assert 0 <= prof.beta_eff <= 1


def test_stab_chain_examples():
    H = close_generators([FpMatrix(7, [[2]])])
    r = stab_chain_check(H, FpVector(7, [1]), FpVector(7, [1]))
    assert r.ok and r.details == {"stab_H_xi": 1, "stab_HT_v": 1, "orbit_hyperplane_hit": 1}
    U = close_generators([FpMatrix(5, [[1, 1], [0, 1]])])
    r = stab_chain_check(U, FpVector(5, [1, 0]), FpVector(5, [1, 0]))
    # boundary case: equality
    assert r.ok and r.details["stab_H_xi"] == U.order == r.details["stab_HT_v"] * r.details["orbit_hyperplane_hit"]


def _aff(p, M, t):
    return AffineElement(FpMatrix(p, M), FpVector(p, t))


def test_commutator_examples():
    g, h = _aff(5, [[1]], [1]), _aff(5, [[2]], [3])
    assert commutator(g, h) == _aff(5, [[1]], [4])
    assert commutator(h, h).is_identity()
    g = _aff(3, [[1, 0], [0, 1]], [1, 0])
    h = _aff(3, [[0, 2], [1, 0]], [0, 0])
    assert commutator(g, h) == _aff(3, [[1, 0], [0, 1]], [1, 2])


def test_affine_composition_matches_blocks():
    g, h = _aff(7, [[1, 2], [3, 5]], [4, 1]), _aff(7, [[2, 0], [1, 1]], [0, 6])
    assert ((g.block() @ h.block()) % 7 == (g @ h).block()).all()
    assert (g @ g.inverse()).is_identity()
    want = oracles.aff_mul(((((1, 2), (3, 5))), (4, 1)), (((2, 0), (1, 1)), (0, 6)), 7)
    assert tuple(map(tuple, (g @ h).linear.array().tolist())) == want[0]


@given(st.sampled_from([(1, 5), (2, 5), (2, 7), (3, 3)]), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_commutator_identity(dp, seed):
    d, p = dp
    rng = np.random.default_rng(seed)
    ident = FpMatrix.identity(p, d)
    while True:
        N = FpMatrix(p, rng.integers(0, p, (d, d)))
        if N.invertible:
            break
    xi, eta = FpVector(p, rng.integers(0, p, d)), FpVector(p, rng.integers(0, p, d))
    got = commutator(AffineElement(ident, xi), AffineElement(N, eta))
    assert got == AffineElement(ident, (ident - N) @ xi)


def _aff1(p):
    return aff_close([_aff(p, [[2]], [0]).code, _aff(p, [[1]], [1]).code], p, 1)


def test_lower_central_aff1_not_nilpotent():
    c = _aff1(5)
    assert c.size == 20
    for limit in (10_000, 0):  # pairwise, then the generator method
        rep = lower_central_probe(_Codes(c, 5, 1), depth=4, pairwise_limit=limit)
        assert rep.sizes[:3] == [20, 5, 5]
        assert rep.nilpotent is False and rep.stabilized_at == 1
        assert all(rep.has_translation_outside_H1)


def test_lower_central_translations_abelian():
    T = aff_close([_aff(5, [[1, 0], [0, 1]], [1, 0]).code, _aff(5, [[1, 0], [0, 1]], [0, 1]).code], 5, 2)
    rep = lower_central_probe(_Codes(T, 5, 2))
    assert rep.terminates_at == 1 and rep.sizes[1] == 1


def test_lower_central_abelian_linear():
    D = aff_close([_aff(7, [[3]], [0]).code], 7, 1)
    rep = lower_central_probe(_Codes(D, 7, 1))
    assert rep.terminates_at == 1 and rep.nilpotent


def test_lower_central_rejects_non_group():
    c = np.array([_aff(5, [[2]], [0]).code])
    with pytest.raises(ValueError):
        lower_central_probe(_Codes(c, 5, 1))


class _Codes:
    def __init__(self, codes, p, d):
        self.codes, self.p, self.d = np.asarray(codes), p, d
