"""Eta, theta factors and theta blocks against brute-force oracles."""

import random

import pytest

from paramodular.errors import InadmissibleShape
from paramodular.etatheta import (BabyBlock, ThetaBlock, _disc_tube, baby,
                                  baby_divides, eta, search, theta, theta_sum)

TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def naive_eta_poly(nmax):
    """Coefficients of prod_{n<=nmax} (1 - q^n) by plain convolution."""
    poly = {0: 1}
    for n in range(1, nmax + 1):
        out = dict(poly)
        for e, c in poly.items():
            if e + n <= nmax:
                out[e + n] = out.get(e + n, 0) - c
        poly = {e: c for e, c in out.items() if c != 0 and e <= nmax}
    return poly


def test_eta_matches_naive_product():
    T = 24 * 12 + 1
    e = eta(T)
    oracle = naive_eta_poly(12)
    got = {(a - 1) // 24: s[0] for a, s in e.slices.items()}
    assert got == oracle


def test_delta_is_eta_24():
    T = 24 * (len(TAU) + 1)
    d = eta(T).pow(24)
    for n, t in enumerate(TAU, start=1):
        assert d.coeff(24 * n, 0) == t
    assert d.q_order() == 24


def test_theta_product_equals_sum():
    for d in (1, 2, 3, 5):
        assert theta(d, 24 * 10) == theta_sum(d, 24 * 10)


def test_theta_leading_term():
    t = theta(4, 24 * 2)
    assert t.slice(3) == {4: 1, -4: -1}


def test_block_shape_validation():
    with pytest.raises(InadmissibleShape):
        ThetaBlock(-6, (1,) * 9)            # odd sum
    with pytest.raises(InadmissibleShape):
        ThetaBlock(-5, (1,) * 10)           # fractional q-order
    with pytest.raises(InadmissibleShape):
        ThetaBlock(-6, (0,) + (1,) * 9)     # nonpositive theta index
    b = ThetaBlock(-6, (2, 1, 1, 1, 1, 1, 1, 1, 1, 2))
    assert b.thetas == (1, 1, 1, 1, 1, 1, 1, 1, 2, 2)   # sorted
    assert (b.weight, b.index, b.q_order) == (2, 8, 1)


def test_block_expansion_leading_slice_is_baby():
    for blk in (ThetaBlock(-6, (1,) * 10),
                ThetaBlock(18, (1, 1)),
                ThetaBlock(-18, (1,) * 20 + (2, 2))):
        s = blk.expand(24 * (blk.q_order + 1))
        assert s.q_order() == 24 * blk.q_order
        assert s.slice(24 * blk.q_order) == blk.baby().poly


def test_block_product_combines_shapes():
    a = ThetaBlock(-6, (1,) * 10)
    b = ThetaBlock(18, (1, 1))
    c = a * b
    assert (c.eta_power, c.weight, c.index) == (12, 12, 6)
    T = 24 * 4
    assert c.expand(T) == (a.expand(T + 30) * b.expand(T + 30)).truncate(T)


def test_baby_block_oracle():
    rng = random.Random(3)
    for _ in range(20):
        ds = tuple(rng.randrange(1, 5) for _ in range(rng.randrange(1, 6)))
        bb = BabyBlock.from_tuple(ds)
        # oracle: multiply out (x^d - x^-d) in a dict directly
        poly = {0: 1}
        for d in ds:
            out = {}
            for e, c in poly.items():
                out[e + d] = out.get(e + d, 0) + c
                out[e - d] = out.get(e - d, 0) - c
            poly = {e: c for e, c in out.items() if c != 0}
        assert bb.poly == poly


def test_baby_divides_zeta_squared():
    # product-form baby blocks always divide their zeta^2 counterpart
    for ds in ((1,) * 10, (1, 1, 2, 2), (1, 2, 3, 4), (2, 2)):
        bb = BabyBlock.from_tuple(ds)
        assert baby_divides(bb, bb.at_zeta_squared())
    # and a genuine failure: (x - x^-1)^2 does not divide (x - x^-1)
    b2 = BabyBlock.from_tuple((1, 1))
    b1sq = BabyBlock({1: 1, -1: -1})
    assert not baby_divides(b2, b1sq)


def test_search_weight2_frozen():
    got5 = search(2, 5, 10)
    assert [b.thetas for b in got5] == [(1,) * 10]
    assert got5[0].eta_power == -6
    assert search(2, 6, 10) == []
    tuples8 = [b.thetas for b in search(2, 8, 10)]
    assert (1, 1, 1, 1, 1, 1, 1, 1, 2, 2) in tuples8
    with pytest.raises(InadmissibleShape):
        search(2, 5, 9)


def test_search_matches_brute_force():
    """Cross-check the pruned search with an unpruned recursion."""
    def brute(index, l, cap=8):
        out = []
        def rec(prefix, lo, rem):
            if len(prefix) == l:
                if rem == 0 and sum(prefix) % 2 == 0:
                    out.append(tuple(prefix))
                return
            for d in range(lo, cap):
                if d * d > rem:
                    break
                rec(prefix + [d], d, rem - d * d)
        rec([], 1, 2 * index)
        return out

    for k, idx, l in ((2, 8, 10), (2, 12, 10), (12, 13, 12)):
        assert [b.thetas for b in search(k, idx, l)] == brute(idx, l, cap=12)


def test_search_is_deterministic_lex():
    tuples = [b.thetas for b in search(2, 12, 10)]
    assert tuples == sorted(tuples)
    assert len(set(tuples)) == len(tuples)


def test_admissible_block_can_be_weak():
    # the Cauchy-Schwarz equality ladder (2s_i+1) = d_i needs every d odd
    # and then contributes a lone disc = -index coefficient
    b = ThetaBlock(-6, (1, 1, 1, 1, 1, 1, 1, 3, 3, 23))
    assert not b.is_cusp()
    groups = _disc_tube(-6, b.thetas)
    assert groups[(554, 554)] == -1          # c(69, 277), disc -277
    s = b.expand(24 * 69 + 23)
    assert s.slice(24 * 69)[2 * 277] == -1


def test_tube_verdict_matches_scan():
    checked = weak = 0
    for index in range(5, 41):
        for b in search(2, index, 10)[:12]:
            assert (not _disc_tube(-6, b.thetas)) == b._cusp_by_scan(), b.label()
            checked += 1
            weak += not b.is_cusp()
    for index in range(11, 31):
        for b in search(2, index, 22)[:12]:
            assert (not _disc_tube(-18, b.thetas)) == b._cusp_by_scan(), b.label()
            checked += 1
            weak += not b.is_cusp()
    assert checked > 200 and 0 < weak < checked


def test_positive_eta_power_is_always_cusp():
    b = ThetaBlock(18, (1, 1))
    assert b.is_cusp()
    assert b._cusp_by_scan()


def test_singular_support_is_not_cusp():
    # theta_1^8 carries c(1, 4) with 4*1*4 - 16 = 0: holomorphic, not cuspidal
    b = ThetaBlock(0, (1,) * 8)
    assert not b.is_cusp()
    assert not b._cusp_by_scan()
    assert (8, 8) in _disc_tube(0, b.thetas)   # u = (1,...,1): c(1, 4), disc 0
