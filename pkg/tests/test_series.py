"""Puiseux series core: canonical form, trunc bookkeeping, exact division."""

import random
from fractions import Fraction

import pytest

from paramodular.errors import (BadPrimeDenominator, DivisionByZero,
                                FieldMismatch, InsufficientCoverage,
                                NonExactDivision, NonInvertibleLeadingSlice)
from paramodular.fields import GF, QQ
from paramodular.series import INF, PuiseuxSeries


def S(slices, trunc=INF, field=QQ):
    return PuiseuxSeries(field, trunc, slices)


def test_canonical_form():
    s = S({0: {0: Fraction(2, 1), 2: 0}, 24: {}, 48: {0: 1}}, trunc=30)
    # zero coefficients and empty slices dropped, Fraction(2,1) -> int 2
    assert s.slices == {0: {0: 2}}
    assert type(s.slices[0][0]) is int
    # slices beyond trunc discarded
    assert 48 not in s.slices
    assert s.trunc == 30


def test_constructors_and_inspection():
    z = PuiseuxSeries.zero(QQ, trunc=10)
    assert z.is_zero() and z.q_order() is None
    m = PuiseuxSeries.monomial(QQ, a=3, b=-2, coeff=5)
    assert m.trunc == INF
    assert m.coeff(3, -2) == 5 and m.coeff(3, 0) == 0
    assert m.q_order() == 3
    one = PuiseuxSeries.one(QQ)
    assert one.slices == {0: {0: 1}}
    with pytest.raises(InsufficientCoverage):
        S({0: {0: 1}}, trunc=5).slice(6)


def test_add_trunc_is_min():
    a = S({24: {0: 1}}, trunc=100)
    b = S({0: {0: 1}}, trunc=50)
    c = a + b
    assert c.trunc == 50
    assert c.slices == {0: {0: 1}, 24: {0: 1}}
    d = a - a
    assert d.is_zero() and d.trunc == 100


def test_mul_trunc_uses_orders():
    a = S({24: {0: 1}}, trunc=100)   # order 24
    b = S({0: {0: 1}}, trunc=50)     # order 0
    assert (a * b).trunc == min(100 + 0, 50 + 24)
    # multiplying by an exactly-known unit keeps the trunc
    u = PuiseuxSeries.monomial(QQ, a=0, b=0, coeff=7)
    assert (a * u).trunc == 100


def test_mul_against_naive():
    rng = random.Random(11)
    for _ in range(40):
        sa = {24 * rng.randrange(4): {2 * rng.randrange(-3, 4): rng.randrange(-9, 10)}
              for _ in range(4)}
        sb = {24 * rng.randrange(4): {2 * rng.randrange(-3, 4): rng.randrange(-9, 10)}
              for _ in range(4)}
        a, b = S(sa), S(sb)
        prod = a * b
        naive = {}
        for xa, pa in a.slices.items():
            for xb, pb in b.slices.items():
                for ba, ca in pa.items():
                    for bb, cb in pb.items():
                        key = (xa + xb, ba + bb)
                        naive[key] = naive.get(key, 0) + ca * cb
        naive = {k: v for k, v in naive.items() if v != 0}
        got = {(aa, bb): prod.coeff(aa, bb)
               for aa in prod.slices for bb in prod.slices[aa]}
        assert got == naive


def test_field_mismatch():
    a = S({0: {0: 1}})
    b = PuiseuxSeries(GF(7), INF, {0: {0: 1}})
    with pytest.raises(FieldMismatch):
        a + b


def test_div_exact_roundtrip():
    rng = random.Random(23)
    for _ in range(30):
        sb = {0: {0: rng.choice([1, -1, 2])}}
        for _ in range(3):
            sb.setdefault(24 * rng.randrange(1, 4), {})[2 * rng.randrange(-2, 3)] = \
                rng.randrange(-5, 6)
        sa = {24 * rng.randrange(3): {2 * rng.randrange(-2, 3): rng.randrange(-5, 6)}
              for _ in range(3)}
        a, b = S(sa, trunc=24 * 6), S(sb, trunc=24 * 6)
        if b.is_zero():
            continue
        q = (a * b).div_exact(b)
        assert q.slices == a.truncate(q.trunc).slices


def test_div_exact_trunc_rule():
    a = S({24: {0: 1}, 48: {0: 3}}, trunc=24 * 5)       # order 24
    b = S({24: {0: 1}, 72: {0: -1}}, trunc=24 * 4)      # order 24
    q = a.div_exact(b)
    # oc = 0, known to min(Ta - oa, Tb - ob)
    assert q.trunc == min(24 * 5 - 24, 24 * 4 - 24)
    assert q.coeff(0, 0) == 1


def test_div_exact_failure_slice_index():
    # 1 / (zeta^(1/2) - zeta^(-1/2) + q zeta^(3/2)): the constant slice of the
    # quotient already fails to be a Laurent polynomial
    one = PuiseuxSeries.one(QQ).truncate(48)
    b = S({0: {1: 1, -1: -1}, 24: {3: 1}}, trunc=48)
    with pytest.raises(NonExactDivision) as ei:
        one.div_exact(b)
    assert ei.value.slice_index == 0


def test_div_by_zero():
    with pytest.raises(DivisionByZero):
        PuiseuxSeries.one(QQ).div_exact(PuiseuxSeries.zero(QQ, trunc=10))


def test_inverse_and_negative_powers():
    b = S({0: {2: 1}, 24: {0: 5}, 48: {-2: 3}}, trunc=24 * 6)
    inv = b.inverse()
    prod = b * inv
    assert prod == PuiseuxSeries.one(QQ).truncate(prod.trunc)
    p = b.pow(-2)
    chk = p * b * b
    assert chk == PuiseuxSeries.one(QQ).truncate(chk.trunc)


def test_inverse_needs_monomial_leading_slice():
    b = S({0: {1: 1, -1: -1}, 24: {0: 1}}, trunc=48)
    with pytest.raises(NonInvertibleLeadingSlice):
        b.inverse()


def test_pow_zero_and_shift():
    b = S({24: {2: 3}}, trunc=96)
    assert b.pow(0).slices == {0: {0: 1}}
    sh = b.shift(24, -2)
    assert sh.slices == {48: {0: 3}} and sh.trunc == 96 + 24


def test_reduce_mod_p_values():
    s = S({0: {0: Fraction(5, 3)}, 24: {2: -24}})
    r7 = s.reduce_mod_p(7)
    assert r7.coeff(0, 0) == 4          # 5/3 = 5 * 3^-1 = 5 * 5 = 25 = 4 (7)
    big = s.reduce_mod_p(12347)
    assert big.coeff(24, 2) == 12323    # -24 mod 12347
    with pytest.raises(BadPrimeDenominator):
        S({0: {0: Fraction(1, 7)}}).reduce_mod_p(7)


def test_reduce_mod_p_is_homomorphism():
    rng = random.Random(5)
    for p in (2, 3, 12347):
        for _ in range(15):
            sa = {24 * rng.randrange(3): {2 * rng.randrange(-2, 3): rng.randrange(-50, 51)}
                  for _ in range(4)}
            sb = {24 * rng.randrange(3): {2 * rng.randrange(-2, 3): rng.randrange(-50, 51)}
                  for _ in range(4)}
            a, b = S(sa, trunc=200), S(sb, trunc=200)
            # reduction can raise the order bound, so compare on the common window
            for lhs, rhs in (((a * b).reduce_mod_p(p),
                              a.reduce_mod_p(p) * b.reduce_mod_p(p)),
                             ((a + b).reduce_mod_p(p),
                              a.reduce_mod_p(p) + b.reduce_mod_p(p))):
                t = min(lhs.trunc, rhs.trunc)
                assert lhs.truncate(t) == rhs.truncate(t)
