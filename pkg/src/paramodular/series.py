"""Truncated bivariate Puiseux series, exact over Q or F_p.

A series lives in q and zeta with exponents in (1/24)Z and (1/2)Z.  Terms are
stored per q-slice:

    slices: {a: {b: coeff}}   meaning   coeff * q^(a/24) * zeta^(b/2)

and trunc is the largest a retained: the series is known exactly for all
q-exponents <= trunc/24 and unknown beyond.  Exponents may be negative; every
slice has finite zeta-support.  Instances are treated as immutable: all
operations return new series in canonical form (no stored zeros, no empty
slices).

Truncation bookkeeping follows the usual rules: addition truncates to the
finer of the two claims, multiplication to min(Ta + ord(b), Tb + ord(a)), and
division inverts that.  INF marks exactly-known series (monomials, constants).
"""

from .errors import (DivisionByZero, InsufficientCoverage,
                     NonExactDivision, NonInvertibleLeadingSlice)
from .fields import GF, QQ, same_field
from .laurent import lp_div_exact, lp_mul, lp_norm

INF = 2 ** 62  # trunc value for exactly-known series


class PuiseuxSeries:

    __slots__ = ("field", "trunc", "slices")

    def __init__(self, field, trunc, slices, _canonical=False):
        self.field = field
        self.trunc = trunc
        if not _canonical:
            clean = {}
            for a, poly in slices.items():
                if a > trunc:
                    continue
                poly = lp_norm({b: field.coerce(c) for b, c in poly.items()},
                               field)
                if poly:
                    clean[a] = poly
            slices = clean
        self.slices = slices

    # --- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field=QQ, trunc=INF):
        return cls(field, trunc, {}, _canonical=True)

    @classmethod
    def monomial(cls, field=QQ, a=0, b=0, coeff=1, trunc=INF):
        coeff = field.coerce(coeff)
        slices = {a: {b: coeff}} if coeff != 0 else {}
        return cls(field, trunc, slices, _canonical=True)

    @classmethod
    def one(cls, field=QQ, trunc=INF):
        return cls.monomial(field, 0, 0, 1, trunc)

    # --- inspection ----------------------------------------------------------

    def is_zero(self):
        return not self.slices

    def q_order(self):
        """Lowest q-exponent in 1/24 units, or None for the zero series."""
        return min(self.slices) if self.slices else None

    def _order_lb(self):
        # lower bound on the q-order, usable for truncation arithmetic
        return min(self.slices) if self.slices else self.trunc + 1

    def slice(self, a):
        """The zeta-Laurent slice at q^(a/24), as a fresh dict {b: coeff}."""
        if a > self.trunc:
            raise InsufficientCoverage(f"slice a={a} beyond trunc={self.trunc}")
        return dict(self.slices.get(a, {}))

    def coeff(self, a, b):
        """Coefficient of q^(a/24) * zeta^(b/2)."""
        if a > self.trunc:
            raise InsufficientCoverage(f"exponent a={a} beyond trunc={self.trunc}")
        return self.slices.get(a, {}).get(b, 0)

    def support(self):
        """Iterate (a, b, coeff) over stored terms, sorted."""
        for a in sorted(self.slices):
            poly = self.slices[a]
            for b in sorted(poly):
                yield a, b, poly[b]

    def num_terms(self):
        return sum(len(p) for p in self.slices.values())

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return (self.field == other.field and self.trunc == other.trunc
                and self.slices == other.slices)

    def __repr__(self):
        n = self.num_terms()
        t = "INF" if self.trunc >= INF else self.trunc
        o = self.q_order()
        return f"<PuiseuxSeries/{self.field.name} order={o} trunc={t} terms={n}>"

    # --- arithmetic ----------------------------------------------------------

    def truncate(self, trunc):
        """Restrict the claim to q-exponents <= trunc."""
        assert trunc <= self.trunc, "cannot extend knowledge by truncating"
        slices = {a: dict(p) for a, p in self.slices.items() if a <= trunc}
        return PuiseuxSeries(self.field, trunc, slices, _canonical=True)

    def __add__(self, other):
        field = same_field(self.field, other.field)
        trunc = min(self.trunc, other.trunc)
        out = {a: dict(p) for a, p in self.slices.items() if a <= trunc}
        fadd = field.add
        for a, poly in other.slices.items():
            if a > trunc:
                continue
            tgt = out.setdefault(a, {})
            for b, c in poly.items():
                w = fadd(tgt.get(b, 0), c)
                if w == 0:
                    tgt.pop(b, None)
                else:
                    tgt[b] = w
        for a in [a for a, p in out.items() if not p]:
            del out[a]
        return PuiseuxSeries(field, trunc, out, _canonical=True)

    def __neg__(self):
        fneg = self.field.neg
        out = {a: {b: fneg(c) for b, c in p.items()}
               for a, p in self.slices.items()}
        return PuiseuxSeries(self.field, self.trunc, out, _canonical=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply by a scalar."""
        c = self.field.coerce(c)
        if c == 0:
            return PuiseuxSeries.zero(self.field, self.trunc)
        fmul = self.field.mul
        norm = self.field.normalize
        out = {}
        for a, p in self.slices.items():
            tgt = {b: norm(fmul(v, c)) for b, v in p.items()}
            tgt = {b: v for b, v in tgt.items() if v != 0}
            if tgt:
                out[a] = tgt
        return PuiseuxSeries(self.field, self.trunc, out, _canonical=True)

    def shift(self, da, db=0):
        """Multiply by the monomial q^(da/24) * zeta^(db/2)."""
        trunc = self.trunc if self.trunc >= INF else self.trunc + da
        out = {a + da: ({b + db: c for b, c in p.items()} if db else dict(p))
               for a, p in self.slices.items()}
        return PuiseuxSeries(self.field, trunc, out, _canonical=True)

    def __mul__(self, other):
        field = same_field(self.field, other.field)
        trunc = min(self.trunc + other._order_lb(),
                    other.trunc + self._order_lb(), INF)
        out = {}
        fmul = field.mul
        fadd = field.add
        items_b = [(a2, list(p2.items())) for a2, p2 in other.slices.items()]
        for a1, p1 in self.slices.items():
            for a2, p2 in items_b:
                a = a1 + a2
                if a > trunc:
                    continue
                tgt = out.get(a)
                if tgt is None:
                    tgt = out[a] = {}
                for b1, c1 in p1.items():
                    for b2, c2 in p2:
                        b = b1 + b2
                        w = fadd(tgt.get(b, 0), fmul(c1, c2))
                        if w == 0:
                            tgt.pop(b, None)
                        else:
                            tgt[b] = w
        for a in [a for a, p in out.items() if not p]:
            del out[a]
        if field is QQ or field.char == 0:
            for p in out.values():
                lp_norm(p, field)
        return PuiseuxSeries(field, trunc, out, _canonical=True)

    def div_exact(self, other):
        """Exact slice-recursive division self/other.

        Slice j of the quotient is (A_j - sum_{0<i<=j} B_i C_{j-i}) / B_0 with
        exact zeta-Laurent division by the lowest slice B_0 of the divisor;
        NonExactDivision (carrying the failing relative slice index) when any
        Laurent remainder is nonzero.
        """
        field = same_field(self.field, other.field)
        if other.is_zero():
            raise DivisionByZero("division by the zero series")
        ob = other.q_order()
        if self.is_zero():
            return PuiseuxSeries.zero(field, min(self.trunc - ob, INF))
        oa = self.q_order()
        oc = oa - ob
        jmax = min(self.trunc - oa, other.trunc - ob)
        b0 = other.slices[ob]
        quo = {}
        for j in range(jmax + 1):
            acc = dict(self.slices.get(oa + j, {}))
            fsub = field.sub
            for i in range(1, j + 1):
                bi = other.slices.get(ob + i)
                cj = quo.get(oc + j - i)
                if not bi or not cj:
                    continue
                prod = lp_mul(bi, cj, field)
                for b, c in prod.items():
                    w = fsub(acc.get(b, 0), c)
                    if w == 0:
                        acc.pop(b, None)
                    else:
                        acc[b] = w
            lp_norm(acc, field)
            if not acc:
                continue
            try:
                cj = lp_div_exact(acc, b0, field, what=f"quotient slice {j}")
            except NonExactDivision as e:
                e.slice_index = j
                raise
            if cj:
                quo[oc + j] = cj
        return PuiseuxSeries(field, oc + jmax, quo, _canonical=True)

    def inverse(self):
        """Reciprocal; requires the leading q-slice to be a single monomial."""
        if self.is_zero():
            raise DivisionByZero("inverse of the zero series")
        lead = self.slices[self.q_order()]
        if len(lead) != 1:
            raise NonInvertibleLeadingSlice(
                f"leading slice has {len(lead)} terms, need a unit monomial")
        return PuiseuxSeries.one(self.field).div_exact(self)

    def pow(self, e):
        """Integer power, negative allowed when the leading slice is a monomial."""
        if e == 0:
            return PuiseuxSeries.one(self.field, self.trunc)
        base = self if e > 0 else self.inverse()
        e = abs(e)
        out = None
        while e:
            if e & 1:
                out = base if out is None else out * base
            e >>= 1
            if e:
                base = base * base
        return out

    __pow__ = pow

    def reduce_mod_p(self, p):
        """Coefficient-wise reduction into F_p (a ring homomorphism).

        BadPrimeDenominator if any denominator is divisible by p.
        """
        fld = GF(p)
        out = {}
        for a, poly in self.slices.items():
            tgt = {}
            for b, c in poly.items():
                v = fld.coerce(c)
                if v != 0:
                    tgt[b] = v
            if tgt:
                out[a] = tgt
        return PuiseuxSeries(fld, self.trunc, out, _canonical=True)


# module-level names for the spec'd operations

def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def div_exact(a, b):
    return a.div_exact(b)


def power(a, e):
    return a.pow(e)


def reduce_mod_p(a, p):
    return a.reduce_mod_p(p)
