"""Exact linear algebra: fraction-free elimination over Q, dense elimination
mod p, integer kernels and lattice saturation.

Vectors are plain lists (or dicts {col: val} where noted).  Over Q everything
is cleared to integers rowwise and run through two-step Bareiss elimination
with minimal-magnitude pivoting, so intermediate entries stay determinant
sized.  Mod p the arithmetic is dense numpy int64, valid for p < 2^31.
"""

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import BadPrimeDenominator, Inconsistent, Underdetermined
from .fields import QQ


def dense_from_dicts(rows, ncols):
    out = []
    for r in rows:
        v = [0] * ncols
        for c, x in r.items():
            v[c] = x
        out.append(v)
    return out


def _int_rows(rows):
    """Clear denominators and common factors rowwise; drop zero rows."""
    out = []
    for r in rows:
        den = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        v = [int(Fraction(x) * den) for x in r]
        g = gcd(*v) if any(v) else 0
        if g == 0:
            continue
        out.append([x // g for x in v])
    return out


def bareiss_echelon(rows):
    """Fraction-free row echelon of integer rows.

    Returns (echelon_rows, pivot_cols).  Pivots are chosen with minimal
    absolute value; every division is exact by the Bareiss identity.
    """
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    piv_cols = []
    r0 = 0
    prev = 1
    for c in range(ncols):
        best = None
        for i in range(r0, len(M)):
            v = M[i][c]
            if v != 0 and (best is None or abs(v) < abs(M[best][c])):
                best = i
        if best is None:
            continue
        M[r0], M[best] = M[best], M[r0]
        piv = M[r0][c]
        top = M[r0]
        for i in range(r0 + 1, len(M)):
            vi = M[i][c]
            row = M[i]
            M[i] = [(row[j] * piv - vi * top[j]) // prev for j in range(ncols)]
        prev = piv
        piv_cols.append(c)
        r0 += 1
        if r0 == len(M):
            break
    return M[:r0], piv_cols


def _primitive(vec):
    """Scale a Fraction vector to a primitive integer vector, first nonzero > 0."""
    den = lcm(*(x.denominator for x in vec))
    ints = [int(x * den) for x in vec]
    g = gcd(*ints)
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def rank(rows, field=QQ):
    if field is QQ:
        return len(bareiss_echelon(_int_rows(rows))[0])
    return rank_mod_p(rows, field.p)


def kernel(rows, ncols, field=QQ):
    """Basis of the right kernel {v : M v = 0}, deterministic order.

    Over Q the vectors are primitive integer vectors, one per free column of
    the echelon form; mod p they are reduced vectors with a 1 in the free slot.
    """
    if field is not QQ:
        return kernel_mod_p(rows, ncols, field.p)
    E, piv = bareiss_echelon(_int_rows(rows))
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i in range(len(E) - 1, -1, -1):
            pc = piv[i]
            s = sum(Fraction(E[i][j]) * v[j] for j in range(pc + 1, ncols) if v[j])
            v[pc] = -s / Fraction(E[i][pc])
        basis.append(_primitive(v))
    return basis


def solve(rows, rhs, ncols, field=QQ):
    """Unique solution of M x = rhs.

    Raises Underdetermined when rank(M) < ncols and Inconsistent when rhs is
    outside the column span.
    """
    if field is not QQ:
        return _solve_mod_p(rows, rhs, ncols, field.p)
    aug = _int_rows([list(r) + [y] for r, y in zip(rows, rhs)])
    E, piv = bareiss_echelon(aug)
    if ncols in piv:
        raise Inconsistent("right-hand side outside the span")
    if len(piv) < ncols:
        raise Underdetermined(f"rank {len(piv)} < {ncols} unknowns")
    x = [Fraction(0)] * ncols
    for i in range(len(E) - 1, -1, -1):
        pc = piv[i]
        s = sum(Fraction(E[i][j]) * x[j] for j in range(pc + 1, ncols))
        x[pc] = (Fraction(E[i][ncols]) - s) / E[i][pc]
    return x


def _np_matrix(rows, p):
    M = np.zeros((len(rows), len(rows[0]) if rows else 0), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if isinstance(x, int):
                M[i, j] = x % p
            else:
                f = Fraction(x)
                if f.denominator % p == 0:
                    raise BadPrimeDenominator(f"{f} has no image mod {p}")
                M[i, j] = f.numerator * pow(f.denominator, -1, p) % p
    return M


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form mod p.  Returns (numpy matrix, pivot_cols)."""
    assert p < 2 ** 31, "int64 products overflow beyond 2^31"
    if not rows:
        return np.zeros((0, ncols), dtype=np.int64), []
    M = _np_matrix(rows, p)
    m = M.shape[0]
    r = 0
    piv = []
    for c in range(ncols):
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            M[hit] = (M[hit] - np.outer(col[hit], M[r])) % p
        piv.append(c)
        r += 1
        if r == m:
            break
    return M[:r], piv


def rank_mod_p(rows, p):
    if not rows:
        return 0
    return len(rref_mod_p(rows, len(rows[0]), p)[1])


def kernel_mod_p(rows, ncols, p):
    R, piv = rref_mod_p(rows, ncols, p)
    pivset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = (-int(R[i, f])) % p
        basis.append(v)
    return basis


def _solve_mod_p(rows, rhs, ncols, p):
    aug = [list(r) + [y] for r, y in zip(rows, rhs)]
    R, piv = rref_mod_p(aug, ncols + 1, p)
    if ncols in piv:
        raise Inconsistent("right-hand side outside the span")
    if len(piv) < ncols:
        raise Underdetermined(f"rank {len(piv)} < {ncols} unknowns")
    x = [0] * ncols
    for i, pc in enumerate(piv):
        x[pc] = int(R[i, ncols])
    return x


def integer_kernel(rows, ncols):
    """Basis of {v in Z^ncols : M v = 0} via column reduction of [M; I].

    The result is a basis of the full kernel lattice, hence saturated.
    Deterministic; entries are python ints.
    """
    m = len(rows)
    for r in rows:
        assert all(isinstance(x, int) for x in r), "integer matrix required"
    cols = [[rows[i][j] for i in range(m)] + [1 if t == j else 0
            for t in range(ncols)] for j in range(ncols)]
    c0 = 0
    for r in range(m):
        active = [j for j in range(c0, ncols) if cols[j][r] != 0]
        while len(active) > 1:
            jmin = min(active, key=lambda j: (abs(cols[j][r]), j))
            pivval = cols[jmin][r]
            for j in active:
                if j == jmin:
                    continue
                q = cols[j][r] // pivval
                if q:
                    cols[j] = [x - q * y for x, y in zip(cols[j], cols[jmin])]
            active = [j for j in active if cols[j][r] != 0]
        if active:
            cols[c0], cols[active[0]] = cols[active[0]], cols[c0]
            c0 += 1
    basis = []
    for col in cols[c0:]:
        assert all(x == 0 for x in col[:m])
        v = col[m:]
        lead = next((x for x in v if x != 0), 0)
        basis.append([-x for x in v] if lead < 0 else v)
    return basis


def saturate(rows, ncols):
    """Basis of the saturation (Q-span intersect Z^ncols) of the row lattice."""
    ker = integer_kernel(rows, ncols)
    return integer_kernel(ker, ncols)


class IncrementalRank:
    """Row space grown one vector at a time, reporting rank increases.

    Keeps its own reduced rows over the field; add() returns True when the
    vector was independent of everything seen so far.
    """

    def __init__(self, field=QQ):
        self.field = field
        self.rows = []  # (pivot_col, reduced vector)

    def rank(self):
        return len(self.rows)

    def _reduce(self, vec):
        f = self.field
        v = [f.coerce(x) for x in vec]
        for pc, row in self.rows:
            if v[pc] != f.zero:
                c = f.div(v[pc], row[pc])
                v = [f.sub(a, f.mul(c, b)) for a, b in zip(v, row)]
        pc = next((i for i, x in enumerate(v) if x != f.zero), None)
        return pc, v

    def independent(self, vec):
        """True when vec would increase the rank; commits nothing."""
        return self._reduce(vec)[0] is not None

    def add(self, vec):
        pc, v = self._reduce(vec)
        if pc is None:
            return False
        self.rows.append((pc, v))
        return True
