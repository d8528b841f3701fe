"""Multiplicative lift expansion against the classical index-1 oracle.

The raising quotient of eta^18 th1^2 is -2 phi_{0,1}; the product attached
to 2 phi_{0,1} is the additive lift of eta^18 th1^2 itself, which pins every
slice.  Closed forms for the first two xi-slices give a second, independent
check of the convolution.
"""

from fractions import Fraction

import pytest

from paramodular.borcherds import (LeadingBlock, borcherds_expand,
                                   coordinates_in_span, product_exponents)
from paramodular.errors import (InsufficientCoverage, NonExactDivision,
                                SelfCheckFailure, ValidationFailure)
from paramodular.etatheta import ThetaBlock
from paramodular.fields import QQ
from paramodular.jacobi import JacobiFormFragment, gritsenko_lift
from paramodular.series import PuiseuxSeries
from paramodular.weakzero import WeakJacobiFragment, raising_quotient

TB_10_1 = ThetaBlock(18, (1, 1))
ROWS = 9


def classical_psi():
    s = raising_quotient(TB_10_1, 24 * ROWS + 23)
    return WeakJacobiFragment.from_series(s, 1).scale(-1)


PSI = classical_psi()


def row_series(psi, step=1, trunc=None):
    """Generating series of the rows n*step, placed at q^n."""
    out = {}
    hi = psi.n_max // step
    for n in range(0, hi + 1):
        row = psi.row(n * step)
        if row:
            out[24 * n] = {2 * r: v for r, v in row.items()}
    if trunc is None:
        trunc = 24 * hi + 23
    return PuiseuxSeries(psi.field, trunc, out)


def test_exponent_data():
    A, B, C, weight = product_exponents(PSI)
    assert (A, B, C) == (1, 2, 1)
    assert weight == 10
    lb = LeadingBlock.from_row0(PSI.row0())
    assert lb.eta_power == 18 and lb.mults == {1: 2}
    assert lb.weight == 10 and lb.index == 1 and lb.q_order_24 == 24
    assert lb.label() == "eta^18*th1^2"
    assert lb.expand(24 * 4 + 23) == TB_10_1.expand(24 * 4 + 23)


def test_classical_product_is_the_additive_lift():
    ex = borcherds_expand(PSI, depth=3, qrows=3)
    assert ex.eps == 1
    pf = ex.to_fragment()
    assert pf.eigen == {1: 1}
    phi = JacobiFormFragment.from_block(TB_10_1, 12)
    lift = gritsenko_lift(phi, 3)
    hits = 0
    for t, v in sorted(pf.coeffs.items()):
        if lift.covered(t):
            assert lift.get(t) == v, t
            hits += 1
    assert hits > 100


def test_slice_closed_forms():
    ex = borcherds_expand(PSI, depth=2, qrows=3)
    base = ex.slices[0]
    g1 = row_series(PSI, trunc=base.trunc)
    s1 = (base * g1).scale(-1).truncate(ex.slices[1].trunc)
    assert ex.slices[1] == s1

    g2 = PuiseuxSeries(PSI.field, 2 * g1.trunc,
                       {2 * a: {2 * b: v for b, v in p.items()}
                        for a, p in g1.slices.items()})
    h1 = row_series(PSI, step=2, trunc=base.trunc)
    inner = (g1 * g1).scale(Fraction(1, 2)) + g2.scale(Fraction(-1, 2)) \
        + h1.scale(-1)
    s2 = (base * inner).truncate(ex.slices[2].trunc)
    assert ex.slices[2] == s2


def test_slice_fragments_validate():
    ex = borcherds_expand(PSI, depth=2, qrows=3)
    for j in (0, 1, 2):
        frag = ex.slice_fragment(j)
        assert frag.index == 1 + j and frag.weight == 10 and frag.cusp


def test_exponent_gates():
    bad_eta = WeakJacobiFragment(1, QQ, 0, 0, {}, {(0, 0): 1})
    with pytest.raises(ValidationFailure):
        product_exponents(bad_eta)
    half = PSI.scale(Fraction(1, 2))
    with pytest.raises(ValidationFailure):
        product_exponents(half)
    frac_slice = WeakJacobiFragment(1, QQ, 0, 0, {},
                                    {(0, 0): 22, (0, 1): 1, (0, -1): 1})
    with pytest.raises(ValidationFailure):
        product_exponents(frac_slice)


def test_fractional_exponent_in_regular_row():
    psi = WeakJacobiFragment(
        1, QQ, 0, 2,
        {(1, 1): Fraction(1, 2), (1, -1): Fraction(1, 2)},
        {(0, 0): 24})
    with pytest.raises(ValidationFailure):
        borcherds_expand(psi, depth=1, qrows=1)


def test_needs_enough_rows():
    with pytest.raises(InsufficientCoverage):
        borcherds_expand(PSI, depth=3, qrows=4)


def test_doctored_slices_fail_self_checks():
    ex = borcherds_expand(PSI, depth=2, qrows=3, checks=False)
    bump = PuiseuxSeries.monomial(QQ, 24, 0, 1, trunc=ex.slices[1].trunc)
    ex.slices[1] = ex.slices[1] + bump
    with pytest.raises(SelfCheckFailure):
        ex.check_involution_sign()

    ex2 = borcherds_expand(PSI, depth=1, qrows=3, checks=False)
    tiny = PuiseuxSeries.monomial(QQ, 24, 0, Fraction(1, 2),
                                  trunc=ex2.slices[1].trunc)
    ex2.slices[1] = ex2.slices[1] + tiny
    with pytest.raises(SelfCheckFailure):
        ex2.check_integrality()


def test_eta_denominator_expands_theta_denominator_does_not():
    cofactor = LeadingBlock(-12, {1: 12})
    assert not cofactor.holomorphic_numerator()
    trunc = 24 * 3 + 23
    want = ThetaBlock(-12, (1,) * 12).expand(trunc)
    assert cofactor.expand(trunc) == want

    polar = LeadingBlock(30, {1: -3})
    with pytest.raises(NonExactDivision):
        polar.expand(trunc)


def test_coordinates_in_span():
    phi = JacobiFormFragment.from_block(TB_10_1, 3)
    tripled = JacobiFormFragment(10, 1, QQ, 3,
                                 {k: 3 * v for k, v in phi.coeffs.items()})
    assert coordinates_in_span(tripled, [phi]) == [3]

    off = dict(tripled.coeffs)
    off[(2, 0)] = off.get((2, 0), 0) + 1
    stray = JacobiFormFragment(10, 1, QQ, 3, off, cusp=True, _validated=True)
    assert coordinates_in_span(stray, [phi]) is None

    with pytest.raises(InsufficientCoverage):
        coordinates_in_span(tripled, [phi, phi])
