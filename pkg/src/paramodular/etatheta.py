"""Eta powers, odd theta factors, and theta blocks.

A theta block is eta^a * prod_i theta(d_i) with positive integers d_i; it has
weight (a + l)/2, index (sum d_i^2)/2 and q-order (a + 3l)/24 where l is the
number of theta factors.  Admissible shapes need an integral q-order and even
sum(d_i); both are enforced at construction.

eta and theta are built in product form; theta_sum is the sparse triple-product
alternative kept as an independent cross-check.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import InadmissibleShape
from .fields import QQ
from .laurent import lp_divides, lp_mul, lp_norm
from .series import INF, PuiseuxSeries


def eta(trunc, field=QQ):
    """Dedekind eta q^(1/24) * prod(1 - q^n) to the requested trunc."""
    out = PuiseuxSeries.monomial(field, a=1, b=0, coeff=1, trunc=trunc)
    n = 1
    while 24 * n <= trunc - 1:
        factor = PuiseuxSeries(field, INF, {0: {0: 1}, 24 * n: {0: -1}})
        out = (out * factor).truncate(trunc)
        n += 1
    return out


def theta(d, trunc, field=QQ):
    """Odd theta factor with zeta stretched by d, in product form:

    q^(1/8) (zeta^(d/2) - zeta^(-d/2)) prod (1-q^n zeta^d)(1-q^n zeta^-d)(1-q^n)
    """
    assert d >= 1
    out = PuiseuxSeries(field, trunc, {3: {d: 1, -d: -1}})
    n = 1
    while 24 * n <= trunc - 3:
        for b in (2 * d, -2 * d, 0):
            factor = PuiseuxSeries(field, INF, {0: {0: 1}, 24 * n: {b: -1}})
            out = (out * factor).truncate(trunc)
        n += 1
    return out


def theta_sum(d, trunc, field=QQ):
    """The same factor via the triple-product sum: sparse, used as an oracle."""
    slices = {}
    n = 0
    while 3 * (2 * n + 1) ** 2 <= trunc:
        w = 2 * n + 1
        sign = 1 if n % 2 == 0 else -1
        slices[3 * w * w] = {w * d: sign, -w * d: -sign}
        n += 1
    return PuiseuxSeries(field, trunc, slices)


class BabyBlock:
    """Laurent polynomial prod_i (zeta^(d_i/2) - zeta^(-d_i/2)).

    Stored as {b: int} with b counting half-powers of zeta.
    """

    __slots__ = ("poly",)

    def __init__(self, poly):
        self.poly = lp_norm(dict(poly))

    @classmethod
    def from_tuple(cls, thetas):
        poly = {0: 1}
        for d in thetas:
            poly = lp_mul(poly, {d: 1, -d: -1})
        return cls(poly)

    def at_zeta_squared(self):
        """The same polynomial evaluated at zeta^2."""
        return BabyBlock({2 * b: c for b, c in self.poly.items()})

    def divides(self, other):
        return lp_divides(self.poly, other.poly)

    def degree(self):
        return max(self.poly) if self.poly else None

    def __eq__(self, other):
        return isinstance(other, BabyBlock) and self.poly == other.poly

    def __repr__(self):
        return f"<BabyBlock deg={self.degree()} terms={len(self.poly)}>"


def baby(block_or_tuple):
    """Baby block of a ThetaBlock or a plain d-tuple."""
    thetas = (block_or_tuple.thetas if isinstance(block_or_tuple, ThetaBlock)
              else tuple(block_or_tuple))
    return BabyBlock.from_tuple(thetas)


def baby_divides(b1, b2):
    """Exact Laurent divisibility b1 | b2."""
    return b1.divides(b2)


_EXPAND_CACHE = {}
_CUSP_CACHE = {}


def _nearest_odd(x):
    """Odd integer closest to the rational x; ties take the lower one."""
    o = 2 * ((x - 1) // 2) + 1
    return o if x - o <= o + 2 - x else o + 2


def _disc_tube(eta_power, ds):
    """Nonzero coefficients in the disc <= 0 region of eta^a * prod theta(d).

    With u_i = 2s_i + 1 the theta ladders place sign prod (-1)^s_i at
    S = sum u_i^2, D = sum d_i u_i, where 24n = 3S + a + 24j and r = D/2,
    so disc = 4nm - r^2 = (m/2)S - D^2/4 + m(a + 24j)/6.  The quadratic
    (m/2)S - D^2/4 is (m/2) * dist(u, R*d)^2, nonnegative, so for a > -24
    only the bare j = 0 ladder reaches disc <= 0 and it must lie within
    distance sqrt(-a/3) of the line R*d.  Sweeping nearest-odd points along
    the line (with +-2 corrections) enumerates that tube completely; class
    invariance puts a representative of every singular class below row
    m/4, which bounds the sweep.  Returns {(S, D): coefficient}.
    """
    a, l = eta_power, len(ds)
    assert a <= 0 and a > -24 and l >= 1
    twom = sum(d * d for d in ds)
    m = twom // 2
    tube = Fraction(-a, 3)
    # singular classes (disc <= 0, |rho| <= m) have representatives no deeper
    # than row m/4, with equality possible for disc = 0 at rho = m
    rows = m // 4 + 1
    s_cap = (24 * rows - a) // 3
    lam_hi = (s_cap ** 0.5 + float(tube) ** 0.5) / twom ** 0.5 * 1.05 + 1e-9
    cuts = {Fraction(0)}
    for d in set(ds):
        cuts.update(Fraction(k, 2 * d) for k in range(1, int(lam_hi * 2 * d) + 2))
    cuts = sorted(cuts)
    seen = set()
    groups = {}

    def visit(u):
        s_tot = sum(x * x for x in u)
        d_tot = sum(x * d for x, d in zip(u, ds))
        if d_tot < 0 or s_tot > s_cap:
            return
        # D = 0 pairs u with -u inside one group: count the pair once
        u = u if d_tot > 0 else max(u, tuple(-x for x in u))
        if u in seen:
            return
        seen.add(u)
        if 6 * m * s_tot - 3 * d_tot * d_tot > -2 * a * m:
            return
        sign = 1
        for x in u:
            if ((x - 1) // 2) % 2:
                sign = -sign
        if d_tot == 0:
            if l % 2:
                return
            sign *= 2
        key = (s_tot, d_tot)
        groups[key] = groups.get(key, 0) + sign

    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        base = tuple(_nearest_odd(mid * d) for d in ds)
        # depth-first +-2 corrections with the exact line-distance prune
        stack = [((), 0, 0, 0)]
        while stack:
            prefix, s_p, b_p, c_p = stack.pop()
            i = len(prefix)
            if i == l:
                visit(prefix)
                continue
            for du in (0, -2, 2):
                x = base[i] + du
                s_n = s_p + x * x
                b_n = b_p + x * ds[i]
                c_n = c_p + ds[i] * ds[i]
                # unrestricted min over lam of sum (x_j - lam d_j)^2 so far,
                # a lower bound for every completion
                if 3 * (s_n * c_n - b_n * b_n) <= -a * c_n and s_n <= s_cap:
                    stack.append((prefix + (x,), s_n, b_n, c_n))
    return {k: v for k, v in groups.items() if v}


@dataclass(frozen=True)
class ThetaBlock:
    eta_power: int
    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(sorted(self.thetas)))
        a, ds = self.eta_power, self.thetas
        if any(d < 1 for d in ds):
            raise InadmissibleShape(f"theta indices must be >= 1: {ds}")
        if (a + 3 * len(ds)) % 24 != 0:
            raise InadmissibleShape(
                f"q-order (a + 3l)/24 not integral for a={a}, l={len(ds)}")
        if sum(ds) % 2 != 0:
            raise InadmissibleShape(f"sum of theta indices must be even: {ds}")

    @property
    def weight(self):
        return (self.eta_power + len(self.thetas)) // 2

    @property
    def index(self):
        return sum(d * d for d in self.thetas) // 2

    @property
    def q_order(self):
        return (self.eta_power + 3 * len(self.thetas)) // 24

    def baby(self):
        return BabyBlock.from_tuple(self.thetas)

    def __mul__(self, other):
        return ThetaBlock(self.eta_power + other.eta_power,
                          self.thetas + other.thetas)

    def label(self):
        return f"eta^{self.eta_power}*th[{','.join(map(str, self.thetas))}]"

    def is_cusp(self):
        """Exact test for holomorphy: admissible blocks always transform
        correctly, but a nonpositive eta power can leave coefficients of
        discriminant <= 0 deep in the expansion (the block is then weak,
        and the weak ones outnumber the holomorphic ones).  Decided by the
        disc <= 0 tube sums; see _disc_tube.  Cached per block.
        """
        key = (self.eta_power, self.thetas)
        hit = _CUSP_CACHE.get(key)
        if hit is None:
            if not self.thetas:
                hit = self.eta_power > 0
            elif self.eta_power > 0:
                hit = True
            elif self.eta_power > -24:
                hit = not _disc_tube(self.eta_power, self.thetas)
            else:
                hit = self._cusp_by_scan()
            _CUSP_CACHE[key] = hit
        return hit

    def _cusp_by_scan(self):
        """Holomorphy by brute expansion; the oracle for is_cusp.

        Cauchy-Schwarz bounds every discriminant below by a*index/6, so a
        singular class has a representative with |r| <= index, hence with
        row <= index/4; scanning that far is exhaustive.
        """
        m = self.index
        rows = m // 4 + 1
        s = self.expand(24 * rows + 23)
        return all(4 * (e // 24) * m > (b // 2) ** 2 for e, b, _ in s.support())

    def expand(self, trunc, field=QQ):
        """Exact expansion to q-exponent trunc/24 (cached per block)."""
        key = (self.eta_power, self.thetas, field.name)
        hit = _EXPAND_CACHE.get(key)
        if hit is not None and hit.trunc >= trunc:
            return hit.truncate(trunc)
        a = self.eta_power
        # margin so that eta^a and the theta product both reach trunc
        t_in = trunc + abs(a) + 2
        if a >= 0:
            out = eta(t_in, field).pow(a) if a else PuiseuxSeries.one(field, t_in)
        else:
            out = eta(t_in, field).pow(a)
        for d in self.thetas:
            out = out * theta(d, t_in, field)
        assert out.trunc >= trunc, (self, out.trunc, trunc)
        out = out.truncate(trunc)
        _EXPAND_CACHE[key] = out
        return out


def search(weight, index, l):
    """All admissible d-tuples for eta^(2*weight-l) * theta blocks of the index.

    Exhaustive depth-first enumeration of nondecreasing tuples with
    sum d_i^2 = 2*index and even sum, in lexicographic order.
    """
    if (weight + l) % 12 != 0:
        raise InadmissibleShape(
            f"no integral q-order: weight={weight} needs l == {-weight % 12} mod 12")
    a = 2 * weight - l
    target = 2 * index
    found = []
    stack = [0] * l

    def rec(pos, lo, remaining, parity):
        if pos == l:
            if remaining == 0 and parity == 0:
                found.append(ThetaBlock(a, tuple(stack)))
            return
        parts = l - pos
        # nondecreasing: every later part is >= d, so d^2 * parts <= remaining
        hi = isqrt(remaining // parts)
        for d in range(lo, hi + 1):
            rest = remaining - d * d
            if rest < (parts - 1) * d * d:
                continue
            stack[pos] = d
            rec(pos + 1, d, rest, (parity + d) % 2)

    rec(0, 1, target, 0)
    return found
