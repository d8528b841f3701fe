"""Weight-0 weakly holomorphic Jacobi fragments and their constructions.

Sources: quotients of weight-12 cusp fragments by the discriminant series,
and quotients built from index-raising and inflation data.  Fragments here
may carry singular coefficients (4Nn - r^2 <= 0), stored separately from the
regular support; validity is judged by validate_weight0, which reports
rather than raises.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import isqrt

from .errors import (FractionalExponents, InadmissibleShape,
                     InsufficientCoverage, ValidationFailure)
from .etatheta import ThetaBlock, baby_divides, eta
from .fields import QQ
from .series import PuiseuxSeries


class WeakJacobiFragment:
    """Finitely many Fourier rows of a weight-0 weakly holomorphic form.

    coeffs holds the regular support (positive discriminant), singular the
    rest.  Rows n_floor..n_max are complete: absence inside means zero.
    """

    __slots__ = ("index", "field", "n_floor", "n_max", "coeffs", "singular",
                 "label")

    def __init__(self, index, field, n_floor, n_max, coeffs, singular,
                 label=None):
        assert index >= 0
        self.index = index
        self.field = field
        self.n_floor = n_floor
        self.n_max = n_max
        self.coeffs = {k: v for k, v in coeffs.items() if v != field.zero}
        self.singular = {k: v for k, v in singular.items() if v != field.zero}
        self.label = label

    @classmethod
    def from_series(cls, series, index, label=None):
        coeffs, singular = {}, {}
        lo = 0
        for a, b, v in series.support():
            if a % 24 != 0 or b % 2 != 0:
                raise FractionalExponents(
                    f"exponent pair (q^{a}/24, zeta^{b}/2) is not integral")
            n, r = a // 24, b // 2
            lo = min(lo, n)
            if 4 * index * n - r * r > 0:
                coeffs[(n, r)] = v
            else:
                singular[(n, r)] = v
        return cls(index, series.field, lo, series.trunc // 24, coeffs,
                   singular, label=label)

    def _fold(self, n, r):
        N = self.index
        if N == 0:
            return (n, r) if r == 0 else None
        rc = r % (2 * N)
        if rc > N:
            rc -= 2 * N
        num = 4 * N * n - r * r + rc * rc
        assert num % (4 * N) == 0
        return num // (4 * N), rc

    def get(self, n, r):
        """Class-folded coefficient; zero inside coverage means zero."""
        key = self._fold(n, r)
        if key is None:
            return self.field.zero
        n0, rc = key
        if n0 > self.n_max:
            raise InsufficientCoverage(
                f"class of ({n},{r}) first appears at row {n0} > {self.n_max}")
        if n0 < self.n_floor:
            return self.field.zero
        for probe in ((n0, rc), (n0, -rc)):
            if probe in self.coeffs:
                return self.coeffs[probe]
            if probe in self.singular:
                return self.singular[probe]
        return self.field.zero

    def row(self, n):
        if n < self.n_floor:
            return {}
        if n > self.n_max:
            raise InsufficientCoverage(f"row {n} beyond {self.n_max}")
        out = {}
        for (nn, r), v in self.coeffs.items():
            if nn == n:
                out[r] = v
        for (nn, r), v in self.singular.items():
            if nn == n:
                out[r] = v
        return out

    def row0(self):
        """The q^0 row as {d >= 0: c(0, d)}; empty when the row vanishes."""
        if self.n_max < 0 or self.n_floor > 0:
            return {}
        return {r: v for r, v in self.row(0).items() if r >= 0}

    def is_zero(self):
        return not self.coeffs and not self.singular

    def singular_classes(self):
        """Nonzero singular support folded to classes (disc, r-class, value)."""
        N = self.index
        out = {}
        for (n, r), v in self.singular.items():
            disc = 4 * N * n - r * r
            rc = abs(self._fold(n, r)[1]) if N else abs(r)
            key = (disc, rc)
            if key not in out:
                out[key] = v
        return out

    def scale(self, c):
        f = self.field
        c = f.coerce(c)
        return WeakJacobiFragment(
            self.index, f, self.n_floor, self.n_max,
            {k: f.mul(c, v) for k, v in self.coeffs.items()},
            {k: f.mul(c, v) for k, v in self.singular.items()},
            label=self.label)

    def __add__(self, other):
        assert self.index == other.index and self.field == other.field
        f = self.field
        coeffs = dict(self.coeffs)
        singular = dict(self.singular)
        for src, dst in ((other.coeffs, coeffs), (other.singular, singular)):
            for k, v in src.items():
                dst[k] = f.add(dst.get(k, f.zero), v)
        return WeakJacobiFragment(self.index, f,
                                  min(self.n_floor, other.n_floor),
                                  min(self.n_max, other.n_max),
                                  coeffs, singular)

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return (f"<WeakJacobiFragment N={self.index} rows "
                f"[{self.n_floor},{self.n_max}] "
                f"sing={len(self.singular)}{tag}>")


@dataclass
class Weight0Report:
    ok: bool
    violations: list
    c00: object
    weight: object
    degenerate: bool
    singular_classes: list
    boundary_classes: list = dc_field(default_factory=list)

    def __str__(self):
        head = "pass" if self.ok else "FAIL"
        lines = [f"validate_weight0: {head}  c(0,0)={self.c00}  "
                 f"weight={self.weight}"
                 + ("  [degenerate]" if self.degenerate else "")]
        for v in self.violations:
            lines.append(f"  violation: {v}")
        lines.append(f"  nonzero singular classes: {len(self.singular_classes)}")
        return "\n".join(lines)


def validate_weight0(psi):
    """Check the weight-0 invariants and report; never raises.

    Verifies r -> -r symmetry, invariance on (4Nn - r^2, r mod 2N) classes
    across the whole coverage, and integrality of singular coefficients.
    Returns c(0,0) and the prospective product weight c(0,0)/2.
    """
    violations = []
    N = psi.index
    f = psi.field
    if N < 1:
        violations.append(f"index must be >= 1, got {N}")

    stored = dict(psi.coeffs)
    stored.update(psi.singular)
    classes = {}
    for (n, r), v in stored.items():
        mirror = stored.get((n, -r), f.zero)
        if mirror != v:
            violations.append(f"symmetry: c({n},{r})={v} but c({n},{-r})={mirror}")
        if N >= 1:
            n0, rc = psi._fold(n, r)
            key = (4 * N * n - r * r, abs(rc))
            if key in classes and classes[key] != v:
                violations.append(
                    f"class invariance: disc {key[0]} r-class {key[1]} has "
                    f"{classes[key]} and {v}")
            classes[key] = v
    # absent positions inside coverage are zeros and must agree classwise
    if N >= 1:
        for (disc, rc), v in list(classes.items()):
            if v == f.zero:
                continue
            residues = {rc, -rc} if 0 < rc < N else {rc}
            bad = None
            for r0 in residues:
                for step in (2 * N, -2 * N):
                    r = r0 if step > 0 else r0 + step
                    while True:
                        n = disc + r * r
                        assert n % (4 * N) == 0
                        n //= 4 * N
                        if n > psi.n_max:
                            break
                        if stored.get((n, r), f.zero) != v:
                            bad = (n, r)
                            break
                        r += step
                    if bad:
                        break
                if bad:
                    break
            if bad:
                violations.append(
                    f"class invariance: c({bad[0]},{bad[1]}) should be {v}")

    for (n, r), v in psi.singular.items():
        vv = v if isinstance(v, Fraction) else Fraction(v)
        if vv.denominator != 1:
            violations.append(f"singular c({n},{r})={v} is not an integer")

    c00 = f.zero
    if psi.n_floor <= 0 <= psi.n_max:
        c00 = psi.get(0, 0)
    sing = sorted((d, rc, v) for (d, rc), v in psi.singular_classes().items())
    boundary = [t for t in sing
                if (t[0] + t[1] * t[1]) // (4 * N or 1) == psi.n_max]
    weight = Fraction(c00, 2) if isinstance(c00, (int, Fraction)) else c00
    if isinstance(weight, Fraction) and weight.denominator == 1:
        weight = int(weight)
    return Weight0Report(ok=not violations, violations=violations, c00=c00,
                         weight=weight, degenerate=psi.is_zero(),
                         singular_classes=sing, boundary_classes=boundary)


def fragment_series(frag):
    """Rebuild the Puiseux expansion of an integral-index Jacobi fragment."""
    slices = {}
    for (n, r), v in frag.coeffs.items():
        slices.setdefault(24 * n, {})[2 * r] = v
    return PuiseuxSeries(frag.field, 24 * frag.n_max + 23, slices)


def delta_quotient(psi12, label=None):
    """Divide a weight-12 cusp fragment by the discriminant series.

    Exact division; the result is a weight-0 weakly holomorphic fragment of
    the same index.
    """
    if psi12.index < 1:
        raise InadmissibleShape("index must be >= 1")
    if psi12.weight != 12 or not psi12.cusp:
        raise InadmissibleShape(
            f"need a weight-12 cusp fragment, got weight {psi12.weight}")
    num = fragment_series(psi12)
    disc = eta(num.trunc + 26, psi12.field).pow(24)
    quot = num.div_exact(disc)
    return WeakJacobiFragment.from_series(quot, psi12.index, label=label)


def v2_series(s, weight):
    """Index-raising at series level: c'(n,r) = c(2n,r) + 2^(k-1) c(n/2,r/2).

    Slices must sit on integral (n, r); the result covers half the rows.
    """
    f = s.field
    rows = s.trunc // 24
    out_rows = rows // 2
    two = f.coerce(Fraction(2) ** (weight - 1))
    slices = {}

    def bump(a, b, v):
        poly = slices.setdefault(a, {})
        poly[b] = f.add(poly.get(b, f.zero), v)

    for a, b, v in s.support():
        if a % 24 != 0 or b % 2 != 0:
            raise FractionalExponents(
                f"exponent pair (q^{a}/24, zeta^{b}/2) is not integral")
        n = a // 24
        if n % 2 == 0 and n // 2 <= out_rows:
            bump(a // 2, b, v)
        if 2 * n <= out_rows:
            bump(2 * a, 2 * b, f.mul(two, v))
    return PuiseuxSeries(f, 24 * out_rows + 23, slices)


class InflationSpec:
    """Data for a weight-0 combination of raising and inflation quotients.

    raising: list of (block, alpha) contributing alpha * (block|V2)/block.
    inflation: list of (block, top, beta) contributing beta * top/block,
    where index(top) - index(block) equals the level.
    """

    __slots__ = ("level", "raising", "inflation", "label")

    def __init__(self, level, raising=(), inflation=(), label=None):
        self.level = level
        self.raising = [(b, Fraction(a)) for b, a in raising]
        self.inflation = [(b, t, Fraction(c)) for b, t, c in inflation]
        self.label = label

    @property
    def weight(self):
        for b, _ in self.raising:
            return b.weight
        for b, _, _ in self.inflation:
            return b.weight
        raise ValidationFailure("empty inflation data")

    def validate(self):
        if self.level < 1:
            raise ValidationFailure(f"level must be >= 1, got {self.level}")
        if not self.raising and not self.inflation:
            raise ValidationFailure("empty inflation data")
        k = self.weight
        for b, _ in self.raising:
            if b.weight != k:
                raise ValidationFailure("mixed weights in raising terms")
            if b.index != self.level:
                raise ValidationFailure(
                    f"raising block index {b.index} != level {self.level}")
            if not baby_divides(b.baby(), b.baby().at_zeta_squared()):
                raise ValidationFailure(
                    f"baby block of {b.label()} does not divide its "
                    f"zeta^2 image")
        for b, t, _ in self.inflation:
            if b.weight != k or t.weight != k:
                raise ValidationFailure("mixed weights in inflation terms")
            if t.index - b.index != self.level:
                raise ValidationFailure(
                    f"inflation index step {t.index} - {b.index} != "
                    f"{self.level}")
            if b.index % self.level != 0:
                raise ValidationFailure(
                    f"inflation base index {b.index} is not a multiple of "
                    f"the level")
            if not baby_divides(b.baby(), t.baby()):
                raise ValidationFailure(
                    f"baby block of {b.label()} does not divide that of "
                    f"{t.label()}")

    def __repr__(self):
        return (f"<InflationSpec N={self.level} raising={len(self.raising)} "
                f"inflation={len(self.inflation)}>")


def raising_quotient(block, trunc, field=QQ):
    """(block|V2)/block expanded to the truncation order."""
    s = block.expand(2 * trunc + 72, field)
    num = v2_series(s, block.weight)
    return num.div_exact(s).truncate(trunc)


def inflation_quotient(block, top, trunc, field=QQ):
    """top/block expanded to the truncation order."""
    margin = trunc + 24 * max(block.q_order, top.q_order, 0) + 48
    return top.expand(margin, field).div_exact(
        block.expand(margin, field)).truncate(trunc)


def inflate(spec, trunc, field=QQ):
    """Evaluate an InflationSpec to a validated weight-0 fragment."""
    spec.validate()
    total = PuiseuxSeries.zero(field, trunc)
    for block, alpha in spec.raising:
        total = total + raising_quotient(block, trunc, field).scale(alpha)
    for block, top, beta in spec.inflation:
        total = total + inflation_quotient(block, top, trunc, field).scale(beta)
    psi = WeakJacobiFragment.from_series(total.truncate(trunc), spec.level,
                                         label=spec.label)
    report = validate_weight0(psi)
    if not report.ok:
        raise ValidationFailure("; ".join(report.violations))
    return psi


def inflate_case2(phi, top, beta, trunc, field=QQ, label=None):
    """One raising term with sign (-1)^nu(phi) plus one inflation term."""
    sign = Fraction(-1) ** phi.q_order
    spec = InflationSpec(phi.index, raising=[(phi, sign)],
                         inflation=[(phi, top, Fraction(beta))], label=label)
    return inflate(spec, trunc, field)


def inflate_case3(phi, top, trunc, field=QQ, label=None):
    """Pure inflation quotient top/phi."""
    if phi.weight != top.weight:
        raise ValidationFailure("mixed weights in inflation pair")
    if not baby_divides(phi.baby(), top.baby()):
        raise ValidationFailure("baby block does not divide the inflation")
    level = top.index - phi.index
    q = inflation_quotient(phi, top, trunc, field)
    return WeakJacobiFragment.from_series(q, level, label=label)


def humbert_sums(psi):
    """Accumulated exponents along each rational quadratic divisor.

    For each primitive (n0, r0) with 4 N n0 - r0^2 < 0, the product carries
    the factor exponent sum over x >= 1 of c(x^2 n0, x r0).  The sums are
    finite because the singular support is; a negative sum flags a pole.
    """
    N = psi.index
    f = psi.field
    depth = min((4 * N * n - r * r for (n, r) in psi.singular), default=0)
    out = {}
    for (n, r) in list(psi.singular):
        if 4 * N * n - r * r >= 0:
            continue
        # strip the largest g with g | r and g^2 | n to reach the primitive
        # point under (n, r) -> (x^2 n, x r)
        g = 1
        for t in range(2, isqrt(abs(n)) + 1 if n else abs(r) + 1):
            if (r % t == 0 or r == 0) and n % (t * t) == 0:
                g = t
        n0, r0 = n // (g * g), r // g
        if r0 < 0:
            r0 = -r0
        key = (n0, r0)
        if key in out:
            continue
        disc0 = 4 * N * n0 - r0 * r0
        acc = f.zero
        x = 1
        while disc0 * x * x >= depth:
            try:
                acc = f.add(acc, psi.get(x * x * n0, x * r0))
            except InsufficientCoverage:
                break
            x += 1
        out[key] = acc
    return out
