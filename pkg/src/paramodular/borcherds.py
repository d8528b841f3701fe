"""Multiplicative lifts of weight-0 fragments to paramodular expansions.

A validated weight-0 fragment of index N supplies the exponents of an
infinite product over the quadratic lattice; the product's Fourier-Jacobi
slices come out as cusp fragments of index N, 2N, ... together with a
measured involution sign.  Construction gates raise ValidationFailure,
consistency checks on the computed expansion raise SelfCheckFailure.
"""

from fractions import Fraction
from math import comb

from .errors import (InsufficientCoverage, ParamodularError,
                     SelfCheckFailure, ValidationFailure)
from .etatheta import eta, theta
from .fields import QQ
from .fragments import ParamodularFragment
from .jacobi import JacobiFormFragment
from .linalg import Inconsistent, Underdetermined, solve
from .series import PuiseuxSeries
from .weakzero import validate_weight0


def _as_int(x, what):
    f = Fraction(x)
    if f.denominator != 1:
        raise ValidationFailure(f"{what} = {f} is not an integer")
    return int(f)


def product_exponents(psi):
    """The scalar data (A, B, C, weight) read off the q^0 row.

    A counts the eta power in 24ths, B the zeta shift in halves, C the first
    slice index; the prospective weight is c(0,0)/2.  All four must come out
    integral, and C must be a multiple of the index.
    """
    row0 = psi.row(0) if psi.n_floor <= 0 <= psi.n_max else {}
    c00 = row0.get(0, psi.field.zero)
    a24 = sum(Fraction(v) for v in row0.values())
    b2 = sum(Fraction(r * v) for r, v in row0.items() if r > 0)
    c4 = sum(Fraction(r * r * v) for r, v in row0.items())
    if a24.denominator != 1 or a24 % 24 != 0:
        raise ValidationFailure(f"eta exponent {a24} is not divisible by 24")
    if b2.denominator != 1:
        raise ValidationFailure(f"zeta shift {b2} is fractional")
    A = int(a24) // 24
    B = _as_int(b2, "B")
    C4 = c4 / 4
    if C4.denominator != 1:
        raise ValidationFailure(f"slice offset {C4} is fractional")
    C = int(C4)
    if psi.index < 1 or C % psi.index != 0:
        raise ValidationFailure(
            f"slice offset {C} is not a multiple of the index {psi.index}")
    k2 = Fraction(c00)
    if k2.denominator > 2:
        raise ValidationFailure(f"c(0,0) = {c00} gives a fractional weight")
    return A, B, C, k2 / 2


class LeadingBlock:
    """eta^e times a product of theta factors with signed multiplicities."""

    __slots__ = ("eta_power", "mults")

    def __init__(self, eta_power, mults):
        self.eta_power = eta_power
        self.mults = {d: m for d, m in sorted(mults.items()) if m and d > 0}

    @classmethod
    def from_row0(cls, row0):
        c00 = _as_int(row0.get(0, 0), "c(0,0)")
        mults = {}
        for r, v in row0.items():
            if r > 0:
                mults[r] = _as_int(v, f"c(0,{r})")
        return cls(c00 - sum(mults.values()), mults)

    @property
    def weight(self):
        return Fraction(self.eta_power + sum(self.mults.values()), 2)

    @property
    def index(self):
        return Fraction(sum(d * d * m for d, m in self.mults.items()), 2)

    @property
    def q_order_24(self):
        return self.eta_power + 3 * sum(self.mults.values())

    def holomorphic_numerator(self):
        return self.eta_power >= 0 and all(m >= 0 for m in self.mults.values())

    def expand(self, trunc, field=QQ):
        margin = trunc + abs(self.eta_power) \
            + 3 * sum(abs(m) for m in self.mults.values()) + 26
        num = PuiseuxSeries.one(field, margin)
        den = PuiseuxSeries.one(field, margin)
        e = self.eta_power
        if e > 0:
            num = num * eta(margin, field).pow(e)
        elif e < 0:
            den = den * eta(margin, field).pow(-e)
        for d, m in self.mults.items():
            t = theta(d, margin, field)
            if m > 0:
                num = num * t.pow(m)
            else:
                den = den * t.pow(-m)
        return num.div_exact(den).truncate(trunc)

    def label(self):
        parts = [f"eta^{self.eta_power}"]
        for d, m in self.mults.items():
            parts.append(f"th{d}" + (f"^{m}" if m != 1 else ""))
        return "*".join(parts)

    def __repr__(self):
        return f"<LeadingBlock {self.label()}>"


def _gen_binom(c, j):
    if j == 0:
        return 1
    if c >= 0:
        return comb(c, j)
    return (-1) ** j * comb(-c + j - 1, j)


class ProductExpansion:
    """Fourier-Jacobi slices of a multiplicative lift, plus the checks."""

    def __init__(self, psi, depth, qrows, slices, A, B, C, weight):
        self.psi = psi
        self.level = psi.index
        self.depth = depth
        self.qrows = qrows
        self.slices = slices
        self.A, self.B, self.C = A, B, C
        self.weight = weight
        self.eps = None

    def slice_index(self, j):
        return self.C + j * self.level

    def slice_fragment(self, j):
        """The j-th slice as a validated cusp fragment; SelfCheckFailure."""
        s = self.slices[j]
        if Fraction(self.weight).denominator != 1:
            raise SelfCheckFailure(f"weight {self.weight} is not an integer")
        coeffs = {}
        for a, b, v in s.support():
            if a % 24 != 0 or b % 2 != 0:
                raise SelfCheckFailure(
                    f"slice {j} has a fractional exponent pair ({a}, {b})")
            coeffs[(a // 24, b // 2)] = v
        try:
            return JacobiFormFragment(int(self.weight), self.slice_index(j),
                                      self.psi.field, self.qrows + self.A,
                                      coeffs, cusp=True,
                                      label=f"slice[{self.slice_index(j)}]")
        except ParamodularError as e:
            raise SelfCheckFailure(f"slice {j} invalid: {e}") from e

    def to_fragment(self):
        """All slices assembled into one paramodular coefficient table."""
        coeffs = {}
        for j in range(self.depth + 1):
            m = self.slice_index(j) // self.level
            for (n, r), v in self.slice_fragment(j).coeffs.items():
                coeffs[(n, r, m)] = v
        eigen = {self.level: self.eps} if self.eps is not None else None
        return ParamodularFragment(self.level, int(self.weight),
                                   self.psi.field, coeffs, eigen=eigen,
                                   label="product")

    def check_integrality(self):
        for j, s in enumerate(self.slices):
            for a, b, v in s.support():
                if Fraction(v).denominator != 1:
                    raise SelfCheckFailure(
                        f"slice {j} coefficient at ({a},{b}) = {v} "
                        f"is not an integer")

    def check_leading_block(self):
        lb = LeadingBlock.from_row0(self.psi.row0())
        want = lb.expand(self.slices[0].trunc, self.psi.field)
        if not (self.slices[0] - want).is_zero():
            raise SelfCheckFailure(
                f"lowest slice does not match {lb.label()}")
        return lb

    def check_involution_sign(self):
        """Measure the uniform sign relating a(n,r,m) and a(m,-r,n)."""
        frags = {self.slice_index(j) // self.level: self.slice_fragment(j)
                 for j in range(self.depth + 1)}
        eps = None
        zero = self.psi.field.zero
        for m, frag in frags.items():
            for (n, r), v in frag.coeffs.items():
                if n not in frags or m > frags[n].n_max:
                    continue
                w = frags[n].get(m, -r)
                if v == zero and w == zero:
                    continue
                if v == zero or w == zero:
                    raise SelfCheckFailure(
                        f"involution pairs a({n},{r},{m})={v} with "
                        f"a({m},{-r},{n})={w}")
                q = Fraction(w) / Fraction(v)
                if q not in (1, -1):
                    raise SelfCheckFailure(
                        f"involution ratio {q} at ({n},{r},{m})")
                if eps is None:
                    eps = int(q)
                elif eps != int(q):
                    raise SelfCheckFailure("involution sign is not uniform")
        self.eps = eps
        return eps

    def run_self_checks(self):
        self.check_integrality()
        for j in range(self.depth + 1):
            self.slice_fragment(j)
        lb = self.check_leading_block()
        eps = self.check_involution_sign()
        return lb, eps


def borcherds_expand(psi, depth, qrows=4, checks=True):
    """Expand the multiplicative lift of psi through depth ascending slices.

    Slice j holds the coefficients of index C + j*N, complete through q-row
    qrows + A.  Needs psi rows through depth*qrows; exponents must be
    integers.
    """
    rep = validate_weight0(psi)
    if not rep.ok:
        raise ValidationFailure("; ".join(rep.violations))
    A, B, C, weight = product_exponents(psi)
    N = psi.index
    need = depth * qrows
    if psi.n_max < need:
        raise InsufficientCoverage(
            f"need rows through {need}, fragment stops at {psi.n_max}")
    f = psi.field
    trunc = 24 * (qrows + A) + 23

    lb = LeadingBlock.from_row0(psi.row0())
    base = lb.expand(trunc, f)
    slices = [base] + [PuiseuxSeries.zero(f, trunc) for _ in range(depth)]

    for m in range(1, depth + 1):
        jmax = depth // m
        for n in range(0, need // m + 1):
            row = psi.row(n * m)
            for r, c in sorted(row.items()):
                if c == f.zero:
                    continue
                e = _as_int(c, f"exponent c({n * m},{r})")
                terms = []
                for j in range(1, jmax + 1):
                    coef = f.coerce(_gen_binom(e, j) * (-1) ** j)
                    if coef != f.zero:
                        terms.append((j, 24 * n * j, 2 * r * j, coef))
                if not terms:
                    continue
                for s in range(depth, 0, -1):
                    acc = slices[s]
                    for j, da, db, coef in terms:
                        if j * m > s:
                            break
                        src = slices[s - j * m]
                        if src.is_zero():
                            continue
                        acc = acc + src.shift(da, db).scale(coef)
                    slices[s] = acc

    out = ProductExpansion(psi, depth, qrows, slices, A, B, C, weight)
    if checks:
        out.run_self_checks()
    return out


def coordinates_in_span(target, basis):
    """Exact coordinates of a slice in the span of basis fragments, or None.

    Works over the common complete window; raises InsufficientCoverage when
    that window cannot separate the basis.
    """
    assert basis
    n_cap = min([target.n_max] + [b.n_max for b in basis])
    keys = sorted({k for b in basis for k in b.coeffs if k[0] <= n_cap}
                  | {k for k in target.coeffs if k[0] <= n_cap})
    rows = [[Fraction(b.get(n, r)) for b in basis] for (n, r) in keys]
    rhs = [Fraction(target.get(n, r)) for (n, r) in keys]
    try:
        return solve(rows, rhs, len(basis))
    except Inconsistent:
        return None
    except Underdetermined:
        raise InsufficientCoverage(
            f"window through row {n_cap} does not separate the basis")
