"""Involution-consistency systems on truncated Fourier-Jacobi data.

Unknowns are coordinates with respect to per-slice Jacobi cusp bases (slice j
carries index j*level); each row imposes one Atkin-Lehner eigen relation
a(t) = eps * a(t') between coefficient indices that both fit the depth and
determinant budget.  The kernel collects every truncated expansion compatible
with the chosen eigenvalues, so genuine eigenforms land inside it and its
dimension bounds the truncated eigenspace from above.

Elimination over Q is fraction-free; long mod-p runs can checkpoint their
echelon state to disk and resume.
"""

import os
from fractions import Fraction
from math import gcd, isqrt

from .errors import (CoverageGap, DetmaxInadmissible, EmptySlice,
                     InsufficientCoverage, ValidationFailure)
from .fields import QQ, same_field
from .fragments import ALMatrix, ParamodularFragment
from . import linalg


class SparseMatrix:
    """Constraint rows as {column: value} dicts with a fixed column count.

    Rows are kept canonical: no stored zeros, no empty rows, and each row
    scaled to a primitive normal form (integer content 1 over Q, leading
    entry 1 mod p) so that duplicate constraints collapse and the trivially
    satisfied ones vanish.
    """

    def __init__(self, ncols, field=QQ):
        assert ncols >= 0
        self.ncols = ncols
        self.field = field
        self.rows = []
        self._seen = set()

    @property
    def nrows(self):
        return len(self.rows)

    def add_row(self, entries):
        """Canonicalize and append; returns False for zero or duplicate rows."""
        row = self._canonical(entries)
        if row is None:
            return False
        key = tuple(sorted(row.items()))
        if key in self._seen:
            return False
        self._seen.add(key)
        self.rows.append(row)
        return True

    def _canonical(self, entries):
        f = self.field
        clean = {}
        for c, v in entries.items():
            assert 0 <= c < self.ncols
            v = f.coerce(v)
            if v != f.zero:
                clean[c] = v
        if not clean:
            return None
        lead = min(clean)
        if f is QQ:
            den = 1
            for v in clean.values():
                den = den * Fraction(v).denominator // gcd(
                    den, Fraction(v).denominator)
            ints = {c: int(Fraction(v) * den) for c, v in clean.items()}
            g = 0
            for v in ints.values():
                g = gcd(g, v)
            if ints[lead] < 0:
                g = -g
            return {c: v // g for c, v in ints.items()}
        scale = f.inv(clean[lead])
        return {c: f.mul(scale, v) for c, v in clean.items()}

    def dense(self):
        return linalg.dense_from_dicts(self.rows, self.ncols)

    def dumps(self):
        head = f"rows={self.nrows} cols={self.ncols} field={self.field.name}"
        lines = [head]
        for r in self.rows:
            lines.append(" ".join(f"{c}:{r[c]}" for c in sorted(r)))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return (f"<SparseMatrix {self.nrows}x{self.ncols} "
                f"over {self.field.name}>")


def kernel(mat):
    """Exact right-kernel basis of a SparseMatrix, deterministic order."""
    return linalg.kernel(mat.dense(), mat.ncols, mat.field)


class IntegralLattice:
    """A finite list of integer vectors spanning a sublattice of Z^ambient.

    Dependent input vectors are dropped at construction, so the stored list
    is always a basis of the rational span.
    """

    def __init__(self, vectors, ambient=None):
        vectors = [[int(x) for x in v] for v in vectors]
        if ambient is None:
            assert vectors, "ambient dimension required for the empty lattice"
            ambient = len(vectors[0])
        self.ambient = ambient
        tracker = linalg.IncrementalRank(QQ)
        self.vectors = []
        for v in vectors:
            assert len(v) == ambient
            if tracker.add(v):
                self.vectors.append(v)

    def rank(self):
        return len(self.vectors)

    def __repr__(self):
        return f"<IntegralLattice rank {self.rank()} in Z^{self.ambient}>"


def saturate(lattice):
    """The saturation (Q-span intersected with Z^ambient), same rank."""
    if not lattice.vectors:
        return IntegralLattice([], lattice.ambient)
    sat = linalg.saturate(lattice.vectors, lattice.ambient)
    out = IntegralLattice(sat, lattice.ambient)
    assert out.rank() == lattice.rank()
    return out


def rank_mod_p(lattice, p):
    """Rank of the mod-p reductions of the lattice basis."""
    if not lattice.vectors:
        return 0
    return linalg.rank_mod_p(lattice.vectors, p)


class RestrictionProblem:
    """Eigen-symmetry cut of depth-many Fourier-Jacobi slices.

    eigen maps exact divisors c of the level to signs; c = level is the
    Fricke involution (n,r,m) -> (m,-r,n).  detmax is the determinant
    budget: rows only relate indices t with det(t) <= detmax, tracked as
    det4 = 4*n*m*level - r^2 <= 4*detmax.
    """

    def __init__(self, level, depth, detmax, eigen, field=QQ, weight=2):
        if level < 1 or depth < 1:
            raise ValidationFailure(f"level {level}, depth {depth}")
        detmax = Fraction(detmax)
        if detmax <= 0:
            raise ValidationFailure(f"determinant budget {detmax} <= 0")
        if not eigen:
            raise ValidationFailure("empty eigenvalue assignment")
        for c, e in eigen.items():
            if c <= 1 or level % c != 0 or gcd(c, level // c) != 1:
                raise ValidationFailure(
                    f"{c} is not an exact divisor > 1 of {level}")
            if e not in (1, -1):
                raise ValidationFailure(f"eigenvalue {e} at divisor {c}")
        self.level = level
        self.weight = weight
        self.depth = depth
        self.detmax = detmax
        self.cap4 = int(4 * detmax)
        self.eigen = dict(sorted(eigen.items()))
        self.field = field

    def involutions(self):
        return [(ALMatrix(c, self.level), e) for c, e in self.eigen.items()]

    def eigen_string(self):
        return "".join("+" if e > 0 else "-" for e in self.eigen.values())

    def __repr__(self):
        return (f"<RestrictionProblem N={self.level} d={self.depth} "
                f"detmax={self.detmax} v={self.eigen_string()} "
                f"over {self.field.name}>")


def _check_bases(prob, bases):
    if len(bases) != prob.depth:
        raise ValidationFailure(
            f"{len(bases)} slice bases for depth {prob.depth}")
    for j, B in enumerate(bases, start=1):
        if not B:
            raise EmptySlice(f"no basis fragments for slice {j}")
        for b in B:
            if b.index != j * prob.level or b.weight != prob.weight:
                raise ValidationFailure(
                    f"slice {j} wants weight {prob.weight} index "
                    f"{j * prob.level}, got {b!r}")
            same_field(b.field, prob.field)


def _coverage(bases, j):
    return min(b.n_max for b in bases[j - 1])


def _slice_window(prob, j, n_hi):
    """Covered (n, r) with r >= 0 and 0 < det4 <= cap4 in slice j."""
    fourm = 4 * j * prob.level
    out = []
    for n in range(1, n_hi + 1):
        top = fourm * n
        r_hi = isqrt(top - 1)
        need = top - prob.cap4
        r_lo = 0 if need <= 0 else isqrt(need - 1) + 1
        out.extend((n, r) for r in range(r_lo, r_hi + 1))
    return out


def verify_detmax(prob, bases):
    """Check each slice basis is injective on its det <= detmax window.

    Full column rank of the covered window matrix means coefficients within
    the budget already determine every basis coordinate, which is the
    admissibility the constraint rows rely on.  Raises DetmaxInadmissible.
    """
    _check_bases(prob, bases)
    for j in range(1, prob.depth + 1):
        B = bases[j - 1]
        window = _slice_window(prob, j, _coverage(bases, j))
        rows = [[b.value_class(n, r) for b in B] for (n, r) in window]
        rk = linalg.rank(rows, prob.field) if rows else 0
        if rk < len(B):
            raise DetmaxInadmissible(
                f"slice {j}: det window rank {rk} < {len(B)} coordinates "
                f"(detmax {prob.detmax}, rows n <= {_coverage(bases, j)})")


def _relation_seeds(prob, bases):
    """Deterministic stream of (t, t', eps) with both endpoints in budget."""
    N, d = prob.level, prob.depth
    for inv, eps in prob.involutions():
        for m in range(1, d + 1):
            fourm = 4 * m * N
            for n in range(1, _coverage(bases, m) + 1):
                top = fourm * n
                r_hi = isqrt(top - 1)
                need = top - prob.cap4
                r_lo = 0 if need <= 0 else isqrt(need - 1) + 1
                for r in range(-r_hi, r_hi + 1):
                    if abs(r) < r_lo:
                        continue
                    t = (n, r, m)
                    tp = inv.apply(t)
                    if tp[2] > d:
                        continue
                    yield t, tp, eps


def _accumulate(prob, bases, offsets, row, t, coef):
    n, r, m = t
    f = prob.field
    base = offsets[m - 1]
    for i, b in enumerate(bases[m - 1]):
        try:
            v = b.value_class(n, r)
        except InsufficientCoverage as exc:
            raise CoverageGap(
                f"slice {m} basis cannot reach (n={n}, r={r}): {exc}") from exc
        if v != f.zero:
            c = base + i
            row[c] = f.add(row.get(c, f.zero), f.mul(coef, v))


def build_system(prob, bases, extra=()):
    """Assemble the eigen-relation rows over the supplied slice bases.

    bases is a list of depth many basis lists, bases[j-1] spanning the cusp
    space of index j*level with rows up to its n_max.  The determinant
    budget is verified first (DetmaxInadmissible), and every surviving seed
    must be evaluable through the bases (CoverageGap).  extra generators
    may yield further (t, t', eps) seeds beyond the involution symmetry;
    they run through the same row builder.
    """
    verify_detmax(prob, bases)
    offsets = []
    total = 0
    for B in bases:
        offsets.append(total)
        total += len(B)
    mat = SparseMatrix(total, prob.field)
    seeds = list(_relation_seeds(prob, bases))
    for gen in extra:
        seeds.extend(gen(prob, bases))
    f = prob.field
    for t, tp, eps in seeds:
        row = {}
        _accumulate(prob, bases, offsets, row, t, f.one)
        _accumulate(prob, bases, offsets, row, tp, f.coerce(-eps))
        mat.add_row(row)
    return mat


def _expansion(prob, bases, vec, tag):
    f = prob.field
    offsets = []
    total = 0
    for B in bases:
        offsets.append(total)
        total += len(B)
    assert len(vec) == total
    coeffs = {}
    for j in range(1, prob.depth + 1):
        B = bases[j - 1]
        fourm = 4 * j * prob.level
        for n in range(1, _coverage(bases, j) + 1):
            for r in range(-isqrt(fourm * n - 1), isqrt(fourm * n - 1) + 1):
                val = f.zero
                for i, b in enumerate(B):
                    x = f.coerce(vec[offsets[j - 1] + i])
                    if x != f.zero:
                        val = f.add(val, f.mul(x, b.get(n, r)))
                coeffs[(n, r, j)] = val
    label = (f"jrmj(N={prob.level}, d={prob.depth}, "
             f"v={prob.eigen_string()})[{tag}]")
    return ParamodularFragment(prob.level, prob.weight, f, coeffs,
                               eigen=dict(prob.eigen), label=label)


def jrmj_basis(prob, bases, extra=()):
    """Kernel of the eigen-relation system as truncated expansions.

    Returns (dimension, fragments); each fragment carries every covered
    coefficient of all depth slices, with the problem's eigen data attached.
    """
    mat = build_system(prob, bases, extra)
    ker = kernel(mat)
    frags = [_expansion(prob, bases, v, i) for i, v in enumerate(ker)]
    return len(ker), frags


class ModPEchelon:
    """Row echelon mod p grown one sparse row at a time, disk-checkpointable.

    Keeps reduced pivot rows (leading entry 1) keyed by pivot column plus a
    count of consumed source rows; an interrupted elimination reloads the
    state and skips what it already ate.  Deterministic for a fixed feed
    order.
    """

    def __init__(self, ncols, p, path=None):
        self.ncols = ncols
        self.p = p
        self.path = path
        self.pivots = {}
        self.consumed = 0

    def rank(self):
        return len(self.pivots)

    def dimension(self):
        return self.ncols - len(self.pivots)

    def reduce(self, row):
        p = self.p
        v = {c: x % p for c, x in row.items() if x % p}
        while v:
            lead = min(v)
            piv = self.pivots.get(lead)
            if piv is None:
                inv = pow(v[lead], -1, p)
                return lead, {c: x * inv % p for c, x in v.items()}
            coef = v[lead]
            for c, x in piv.items():
                nv = (v.get(c, 0) - coef * x) % p
                if nv:
                    v[c] = nv
                else:
                    v.pop(c, None)
        return None, None

    def feed(self, row):
        """Consume one {col: int} row; returns True when the rank grew."""
        lead, red = self.reduce(row)
        self.consumed += 1
        if lead is None:
            return False
        self.pivots[lead] = red
        return True

    def save(self):
        assert self.path is not None
        lines = [f"p={self.p} ncols={self.ncols} consumed={self.consumed} "
                 f"rank={self.rank()}"]
        for lead in sorted(self.pivots):
            row = self.pivots[lead]
            lines.append(" ".join(f"{c}:{row[c]}" for c in sorted(row)))
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, self.path)

    @classmethod
    def load(cls, path):
        with open(path, encoding="ascii") as fh:
            head = dict(kv.split("=") for kv in fh.readline().split())
            state = cls(int(head["ncols"]), int(head["p"]), path=path)
            state.consumed = int(head["consumed"])
            for line in fh:
                row = {}
                for kv in line.split():
                    c, x = kv.split(":")
                    row[int(c)] = int(x)
                state.pivots[min(row)] = row
        return state

    @classmethod
    def resume(cls, ncols, p, path):
        if path is not None and os.path.exists(path):
            state = cls.load(path)
            assert state.ncols == ncols and state.p == p
            return state
        return cls(ncols, p, path=path)


def checkpoint_path(prob, cache_dir=None):
    """Stable checkpoint file name for a mod-p problem, or None."""
    if cache_dir is None:
        cache_dir = os.environ.get("PARAMODULAR_CACHE_DIR")
    if cache_dir is None:
        return None
    assert prob.field is not QQ
    name = (f"jrmj_N{prob.level}_d{prob.depth}_cap{prob.cap4}"
            f"_p{prob.field.p}_v{prob.eigen_string()}.ckpt")
    os.makedirs(cache_dir, exist_ok=True)
    return os.path.join(cache_dir, name)


def jrmj_dimension_mod_p(prob, bases, cache_dir=None, chunk=512,
                         progress=None):
    """Kernel dimension over F_p via chunked, resumable elimination.

    Feeds the deterministic seed stream into a ModPEchelon, checkpointing
    after every chunk rows when a cache directory is configured (argument or
    PARAMODULAR_CACHE_DIR).  Duplicate seeds cost a reduction each but keep
    the consumed-row counter in lockstep with the stream, which is what
    makes resumption sound.
    """
    assert prob.field is not QQ, "use jrmj_basis over Q"
    verify_detmax(prob, bases)
    offsets = []
    total = 0
    for B in bases:
        offsets.append(total)
        total += len(B)
    path = checkpoint_path(prob, cache_dir)
    state = ModPEchelon.resume(total, prob.field.p, path)
    f = prob.field
    pending = 0
    for k, (t, tp, eps) in enumerate(_relation_seeds(prob, bases)):
        if k < state.consumed:
            continue
        row = {}
        _accumulate(prob, bases, offsets, row, t, f.one)
        _accumulate(prob, bases, offsets, row, tp, f.coerce(-eps))
        state.feed(row)
        pending += 1
        if path is not None and pending >= chunk:
            state.save()
            pending = 0
            if progress is not None:
                progress(state)
    if path is not None and pending:
        state.save()
    return state.dimension()
