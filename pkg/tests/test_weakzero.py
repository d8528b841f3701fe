from fractions import Fraction

import pytest

from paramodular.errors import (FractionalExponents, InadmissibleShape,
                                InsufficientCoverage, ValidationFailure)
from paramodular.etatheta import ThetaBlock
from paramodular.fields import QQ
from paramodular.jacobi import JacobiFormFragment, v2
from paramodular.series import PuiseuxSeries
from paramodular.weakzero import (InflationSpec, WeakJacobiFragment,
                                  delta_quotient, humbert_sums, inflate,
                                  inflate_case2, inflate_case3,
                                  raising_quotient, v2_series,
                                  validate_weight0)

TB_10_1 = ThetaBlock(18, (1, 1))
TB_12_6 = ThetaBlock(12, (1,) * 12)
TB_8_6 = ThetaBlock(12, (1, 1, 1, 3))
TB_8_12 = ThetaBlock(0, (1,) * 15 + (3,))
TRUNC = 24 * 5 + 23


def test_v2_series_matches_fragment_v2():
    frag = JacobiFormFragment.from_block(TB_10_1, 12)
    s = TB_10_1.expand(24 * 12 + 23, QQ)
    vs = v2_series(s, TB_10_1.weight)
    vf = v2(frag)
    assert vf.coeffs
    for (n, r), c in vf.coeffs.items():
        assert vs.coeff(24 * n, 2 * r) == c
    for a, b, c in vs.support():
        assert vf.get(a // 24, b // 2) == c


def test_v2_series_rejects_fractional_support():
    s = PuiseuxSeries(QQ, 96, {25: {0: QQ.one}})
    with pytest.raises(FractionalExponents):
        v2_series(s, 10)


def test_delta_quotient_bookkeeping():
    frag = JacobiFormFragment.from_block(TB_12_6, 8)
    psi = delta_quotient(frag)
    assert psi.index == 6
    # numerator starts at q^2, the quotient at q^1
    assert all(v == QQ.zero for v in psi.row(0).values())
    lead = TB_12_6.expand(24 * 3, QQ).slice(48)
    assert psi.row(1) == {b // 2: v for b, v in lead.items()}
    rep = validate_weight0(psi)
    assert rep.ok and rep.c00 == QQ.zero and not rep.degenerate


def test_delta_quotient_guards():
    with pytest.raises(InadmissibleShape):
        delta_quotient(JacobiFormFragment.from_block(TB_10_1, 6))
    frag = JacobiFormFragment.from_block(TB_12_6, 6)
    loose = JacobiFormFragment(12, 6, QQ, frag.n_max, frag.coeffs, cusp=False)
    with pytest.raises(InadmissibleShape):
        delta_quotient(loose)


def test_from_series_fractional_exponents():
    with pytest.raises(FractionalExponents):
        WeakJacobiFragment.from_series(
            PuiseuxSeries(QQ, 96, {25: {0: QQ.one}}), 1)
    with pytest.raises(FractionalExponents):
        WeakJacobiFragment.from_series(
            PuiseuxSeries(QQ, 96, {24: {1: QQ.one}}), 1)


def test_raising_quotient_at_index_one():
    # (block|V2)/block for the weight-10 index-1 block is -2 phi_{0,1}
    psi = inflate(InflationSpec(1, raising=[(TB_10_1, 1)]), TRUNC)
    assert psi.row0() == {0: QQ.coerce(-20), 1: QQ.coerce(-2)}
    rep = validate_weight0(psi)
    assert rep.ok and rep.c00 == QQ.coerce(-20) and rep.weight == -10
    assert all(v == QQ.coerce(-2) for v in humbert_sums(psi).values())


def test_get_folds_classes():
    psi = inflate(InflationSpec(1, raising=[(TB_10_1, 1)]), TRUNC)
    assert psi.get(0, 1) == QQ.coerce(-2)
    assert psi.get(2, 3) == QQ.coerce(-2)
    assert psi.get(6, 5) == QQ.coerce(-2)
    assert psi.get(-1, 0) == QQ.zero
    with pytest.raises(InsufficientCoverage):
        psi.get(psi.n_max + 1, 0)


def test_validate_flags_symmetry_and_class():
    bad = WeakJacobiFragment(2, QQ, 0, 2, {(1, 1): QQ.one}, {})
    rep = validate_weight0(bad)
    assert not rep.ok
    assert any("symmetry" in v for v in rep.violations)


def test_validate_flags_fractional_singular():
    half = QQ.coerce(Fraction(1, 2))
    bad = WeakJacobiFragment(1, QQ, 0, 0, {},
                             {(0, 0): QQ.coerce(10), (0, 1): half,
                              (0, -1): half})
    rep = validate_weight0(bad)
    assert not rep.ok
    assert any("integer" in v for v in rep.violations)
    good = WeakJacobiFragment(1, QQ, 0, 0, {},
                              {(0, 0): QQ.coerce(10), (0, 1): QQ.one,
                               (0, -1): QQ.one})
    assert validate_weight0(good).ok


def test_validate_zero_fragment_degenerate():
    rep = validate_weight0(WeakJacobiFragment(6, QQ, 0, 3, {}, {}))
    assert rep.ok and rep.degenerate and rep.c00 == QQ.zero


def test_index_guards():
    with pytest.raises(ValidationFailure):
        InflationSpec(0, raising=[(TB_10_1, 1)]).validate()
    rep = validate_weight0(WeakJacobiFragment(0, QQ, 0, 2, {}, {}))
    assert not rep.ok and any("index" in v for v in rep.violations)


def test_inflation_spec_shape_guards():
    with pytest.raises(ValidationFailure):
        InflationSpec(6, raising=[(TB_10_1, 1)]).validate()  # index 1 != 6
    with pytest.raises(ValidationFailure):
        InflationSpec(6, raising=[(TB_12_6, 1)],
                      inflation=[(TB_8_6, TB_8_12, 1)]).validate()
    with pytest.raises(ValidationFailure):
        InflationSpec(5, inflation=[(TB_8_6, TB_8_12, 1)]).validate()


def test_inflate_is_linear():
    a = inflate(InflationSpec(6, raising=[(TB_8_6, 1)]), TRUNC)
    b = inflate(InflationSpec(6, inflation=[(TB_8_6, TB_8_12, 1)]), TRUNC)
    c = inflate(InflationSpec(6, raising=[(TB_8_6, 3)],
                              inflation=[(TB_8_6, TB_8_12, -2)]), TRUNC)
    lin = a.scale(3) + b.scale(-2)
    assert c.coeffs == lin.coeffs and c.singular == lin.singular


def test_inflate_case2_sign_convention():
    # q-order of the weight-8 index-6 block is 1, so the raising sign is -1
    assert TB_8_6.q_order == 1
    got = inflate_case2(TB_8_6, TB_8_12, 2, TRUNC)
    want = inflate(InflationSpec(6, raising=[(TB_8_6, -1)],
                                 inflation=[(TB_8_6, TB_8_12, 2)]), TRUNC)
    assert got.coeffs == want.coeffs and got.singular == want.singular


def test_inflate_case3_is_cofactor_expansion():
    # the top block factors as TB_8_6 times an eta^-12 cofactor, so the
    # quotient equals the cofactor's own expansion
    psi = inflate_case3(TB_8_6, TB_8_12, TRUNC)
    assert psi.index == 6
    cof = ThetaBlock(-12, (1,) * 12).expand(TRUNC, QQ)
    for a, b, v in cof.support():
        assert psi.get(a // 24, b // 2) == v
    with pytest.raises(ValidationFailure):
        inflate_case3(TB_10_1, TB_8_12, TRUNC)
