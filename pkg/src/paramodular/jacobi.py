"""Jacobi form fragments: finitely many complete q-slices of a Jacobi form.

A fragment of weight k and index m stores coefficients c(n, r) for all n up to
an explicit n_max; absent keys inside that window are genuine zeros, anything
beyond raises InsufficientCoverage.  Construction validates symmetry
c(n, r) = (-1)^k c(n, -r), invariance on classes (4nm - r^2, r mod 2m), and
vanishing of the singular part for cusp fragments.
"""

from fractions import Fraction
from importlib.resources import files as _pkg_files
from math import isqrt

from .errors import (ClassInvarianceViolation, CuspidalityViolation,
                     FractionalExponents, InsufficientCoverage, ParseError,
                     RankDeficit, SymmetryViolation, ValidationFailure)
from .etatheta import search
from .fields import GF, QQ
from .linalg import IncrementalRank
from .series import INF


class JacobiFormFragment:
    __slots__ = ("weight", "index", "field", "n_max", "coeffs", "cusp", "label")

    def __init__(self, weight, index, field, n_max, coeffs, cusp=True,
                 label=None, _validated=False):
        self.weight = weight
        self.index = index
        self.field = field
        self.n_max = n_max
        self.coeffs = {k: v for k, v in coeffs.items() if v != field.zero}
        self.cusp = cusp
        self.label = label
        if not _validated:
            self._validate()

    def _validate(self):
        m, k = self.index, self.weight
        sign = -1 if k % 2 else 1
        classes = {}
        for (n, r), v in self.coeffs.items():
            if n < 0:
                raise ValidationFailure(f"negative q-order term at n={n}")
            assert n <= self.n_max
            disc = 4 * n * m - r * r
            if disc <= 0 and self.cusp:
                raise CuspidalityViolation(
                    f"singular coefficient c({n},{r}) = {v} in cusp fragment")
            if disc < 0 and not self.cusp:
                raise ValidationFailure(
                    f"negative discriminant coefficient c({n},{r}) in "
                    f"holomorphic fragment")
            mirror = self.coeffs.get((n, -r), self.field.zero)
            want = self.field.mul(self.field.coerce(sign), v)
            if mirror != want:
                raise SymmetryViolation(
                    f"c({n},{-r}) = {mirror} but (-1)^k c({n},{r}) = {want}")
            key = (disc, r % (2 * m))
            if key in classes and classes[key] != v:
                raise ClassInvarianceViolation(
                    f"class {key}: {classes[key]} vs {v} at c({n},{r})")
            classes.setdefault(key, v)

    @classmethod
    def from_series(cls, series, weight, index, cusp=True, label=None):
        """Adopt a Puiseux series as the Fourier expansion of a Jacobi form."""
        assert series.trunc < INF, "series must carry a finite trunc"
        coeffs = {}
        for a, b, v in series.support():
            if a % 24 != 0:
                raise FractionalExponents(f"q-exponent {a}/24 not integral")
            if b % 2 != 0:
                raise FractionalExponents(f"zeta-exponent {b}/2 not integral")
            coeffs[(a // 24, b // 2)] = v
        return cls(weight, index, series.field, series.trunc // 24, coeffs,
                   cusp=cusp, label=label)

    @classmethod
    def from_block(cls, block, n_max, field=QQ):
        s = block.expand(24 * n_max, field)
        return cls.from_series(s, block.weight, block.index, cusp=True,
                               label=block.label())

    def get(self, n, r):
        """c(n, r); zero when absent, loud when n is past the coverage."""
        if n > self.n_max:
            raise InsufficientCoverage(f"n={n} beyond n_max={self.n_max}")
        return self.coeffs.get((n, r), self.field.zero)

    def value_class(self, n, r):
        """c(n, r) for any index in the class of a covered one.

        Reduces r mod 2m into (-m, m] and recomputes n from the discriminant.
        """
        m = self.index
        rr = (r + m) % (2 * m) - m
        n0 = (4 * n * m - r * r + rr * rr)
        assert n0 % (4 * m) == 0
        n0 //= 4 * m
        return self.get(n0, rr)

    def support_rows(self):
        return sorted({n for (n, _) in self.coeffs})

    def coordinates(self, window):
        """Coefficient vector on a list of (n, r) pairs."""
        return [self.get(n, r) for (n, r) in window]

    def reduce_mod_p(self, p):
        f = GF(p)
        out = {k: f.coerce(v) for k, v in self.coeffs.items()}
        return JacobiFormFragment(self.weight, self.index, f, self.n_max, out,
                                  cusp=self.cusp, label=self.label,
                                  _validated=True)

    def __eq__(self, other):
        return (isinstance(other, JacobiFormFragment)
                and (self.weight, self.index, self.n_max, self.cusp) ==
                    (other.weight, other.index, other.n_max, other.cusp)
                and self.field == other.field and self.coeffs == other.coeffs)

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return (f"<JacobiFormFragment k={self.weight} m={self.index} "
                f"n<={self.n_max}{tag}>")


def coeff_window(index, n_max, n_min=1):
    """All (n, r) with n_min <= n <= n_max and 4 n index - r^2 > 0, sorted."""
    out = []
    for n in range(n_min, n_max + 1):
        rmax = isqrt(4 * n * index - 1)
        for r in range(-rmax, rmax + 1):
            out.append((n, r))
    return out


def v2(phi, n_out=None):
    """Index raising: weight k index m fragment to one of index 2m.

    c'(n, r) = sum over a | gcd(n, r, 2) of a^(k-1) c(2n/a^2, r/a).
    """
    avail = phi.n_max // 2
    if n_out is None:
        n_out = avail
    if n_out > avail:
        raise InsufficientCoverage(
            f"need source slices to 2*{n_out} but n_max={phi.n_max}")
    k = phi.weight
    f = phi.field
    out = {}

    def bump(key, v):
        out[key] = f.add(out.get(key, f.zero), v)

    two = f.coerce(Fraction(2) ** (k - 1))
    for (ns, rs), v in phi.coeffs.items():
        if ns % 2 == 0 and ns // 2 <= n_out:
            bump((ns // 2, rs), v)
        if 2 * ns <= n_out:
            bump((2 * ns, 2 * rs), f.mul(two, v))
    lbl = f"V2({phi.label})" if phi.label else None
    return JacobiFormFragment(k, 2 * phi.index, f, n_out, out, cusp=phi.cusp,
                              label=lbl)


def gritsenko_lift(phi, m_max, n_max=None):
    """Lift a weight-k index-N cusp fragment to a level-N paramodular fragment.

    a(n, r, m) = sum over delta | gcd(n, r, m) of delta^(k-1) c(nm/delta^2,
    r/delta), covered for 1 <= m <= m_max, nm <= phi.n_max, 4nmN - r^2 > 0.
    """
    from .fragments import ParamodularFragment

    assert phi.cusp
    levelN = phi.index
    k = phi.weight
    f = phi.field
    if n_max is None:
        n_max = phi.n_max
    coeffs = {}
    for m in range(1, m_max + 1):
        for n in range(1, min(n_max, phi.n_max // m) + 1):
            rmax = isqrt(4 * n * m * levelN - 1)
            for r in range(-rmax, rmax + 1):
                acc = f.zero
                g = gcd3(n, r, m)
                for delta in divisors(g):
                    c = phi.get(n * m // (delta * delta), r // delta)
                    if c != f.zero:
                        w = f.coerce(Fraction(delta) ** (k - 1))
                        acc = f.add(acc, f.mul(w, c))
                coeffs[(n, r, m)] = acc
    lbl = f"Grit({phi.label})" if phi.label else None
    return ParamodularFragment(levelN, k, f, coeffs, eigen={levelN: 1},
                               label=lbl)


def gcd3(a, b, c):
    from math import gcd
    return gcd(gcd(abs(a), abs(b)), abs(c))


def divisors(n):
    if n == 0:
        return []
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


class DimensionTable:
    """Known dimensions of Jacobi cusp spaces, keyed by (weight, index)."""

    def __init__(self, entries):
        self.entries = dict(entries)

    @classmethod
    def parse(cls, text):
        entries = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(f"want 'weight index dim source': {line!r}",
                                 lineno=lineno)
            k, m, d = (int(parts[i]) for i in range(3))
            entries[(k, m)] = (d, parts[3])
        return cls(entries)

    @classmethod
    def load(cls, path):
        with open(path, encoding="ascii") as fh:
            return cls.parse(fh.read())

    @classmethod
    def default(cls):
        text = _pkg_files("paramodular").joinpath("data/dimensions.txt") \
            .read_text(encoding="ascii")
        return cls.parse(text)

    def has(self, weight, index):
        return (weight, index) in self.entries

    def dim(self, weight, index):
        if (weight, index) not in self.entries:
            raise KeyError(f"no dimension entry for weight {weight} "
                           f"index {index}")
        return self.entries[(weight, index)][0]

    def source(self, weight, index):
        return self.entries[(weight, index)][1]

    def dump(self):
        lines = ["# weight index dim source"]
        for (k, m) in sorted(self.entries):
            d, src = self.entries[(k, m)]
            lines.append(f"{k} {m} {d} {src}")
        return "\n".join(lines) + "\n"


def _candidate_blocks(weight, index, strategies):
    """Deterministic candidate stream for space_basis."""
    out = []
    if "theta-blocks" in strategies:
        for l in range(1, 25):
            if (weight + l) % 12 == 0:
                out.extend(("block", b) for b in search(weight, index, l))
    if "v2-images" in strategies and index % 2 == 0:
        for l in range(1, 25):
            if (weight + l) % 12 == 0:
                out.extend(("v2", b) for b in search(weight, index // 2, l))
    if "block-products" in strategies:
        for l1 in range(1, 13):
            if (weight - 1 + l1) % 12 != 0:
                continue
            for i1 in range(1, index // 2 + 1):
                for b1 in search(weight - 1, i1, l1):
                    for l2 in range(1, 13):
                        if (weight - 1 + l2) % 12 != 0:
                            continue
                        for b2 in search(weight - 1, index - i1, l2):
                            out.append(("product", (b1, b2)))
    return out


class BasisList(list):
    """space_basis result; shortfall marks an unknown table dimension."""

    def __init__(self, frags, shortfall=False):
        super().__init__(frags)
        self.shortfall = shortfall


def space_basis(weight, index, dims=None, strategies=("theta-blocks",),
                n_max=3, field=QQ, patience=None):
    """Greedy rank-complete basis of the Jacobi cusp space from block models.

    Walks the deterministic candidate stream, keeps fragments that increase
    the rank of the coefficient matrix, and stops at the table dimension.
    Rank-increasing candidates are verified holomorphic before being kept
    (admissible blocks with negative eta power can be merely weak, and the
    weak ones are plentiful), so the result is a genuine cusp-space basis.
    Raises RankDeficit (with the shortfall) when the stream runs dry early.

    Without a table entry for (weight, index) the stream is walked to the
    end (or until `patience` consecutive candidates add no rank) and the
    rank-maximal set comes back with its shortfall flag raised, since the
    true dimension is unknown.
    """
    if dims is None:
        dims = DimensionTable.default()
    target = dims.dim(weight, index) if dims.has(weight, index) else None
    window = coeff_window(index, n_max)
    tracker = IncrementalRank(field)
    chosen = []
    skipped = 0
    stale = 0
    for kind, payload in _candidate_blocks(weight, index, strategies):
        if target is not None and tracker.rank() == target:
            break
        if patience is not None and stale >= patience:
            break
        try:
            if kind == "block":
                frag = JacobiFormFragment.from_block(payload, n_max, field)
            elif kind == "v2":
                half = JacobiFormFragment.from_block(payload, 2 * n_max, field)
                frag = v2(half, n_out=n_max)
            else:
                b1, b2 = payload
                frag = JacobiFormFragment.from_block(b1 * b2, n_max, field)
        except (CuspidalityViolation, ValidationFailure):
            skipped += 1
            continue
        vec = frag.coordinates(window)
        if not tracker.independent(vec):
            stale += 1
            continue
        # rank would grow: now pay for the exact holomorphy check.  Only the
        # raw blocks need it; V2 images and products of holomorphic blocks
        # are holomorphic (Cauchy-Schwarz keeps discriminants positive).
        if kind == "product":
            holomorphic = payload[0].is_cusp() and payload[1].is_cusp()
        else:
            holomorphic = payload.is_cusp()
        if not holomorphic:
            skipped += 1
            stale += 1
            continue
        added = tracker.add(vec)
        assert added
        chosen.append(frag)
        stale = 0
    if target is None:
        return BasisList(chosen, shortfall=True)
    if len(chosen) < target:
        raise RankDeficit(
            f"found {len(chosen)} of {target} independent cusp fragments "
            f"for weight {weight} index {index} (skipped {skipped} non-cusp)",
            found=len(chosen), target=target)
    return BasisList(chosen)
