"""Paramodular Fourier coefficient fragments and involution bookkeeping.

An index is a triple t = (n, r, m) standing for the half-integral matrix
[[n, r/2], [r/2, m*level]]; det4(t) = 4*n*m*level - r^2 is four times its
determinant.  Coefficients are class functions under the integral stabilizer
(unimodular A with lower-left entry divisible by the level, acting by
t -> A t A^T, together with r -> -r for even weight), so fragments store an
explicit coverage {t: value} and match queries through a canonical reduction.

Unlike Jacobi fragments, absence here means unknown, not zero.
"""

from math import gcd, isqrt

from .errors import (CoverageNotClosed, EmptySlice, ImageNotIntegral,
                     InadmissibleShape, InconsistentOrbit,
                     InsufficientCommonCoverage, InsufficientCoverage)
from .fields import GF
from .linalg import rank


def det4(t, level):
    n, r, m = t
    return 4 * n * m * level - r * r


def fricke_index(t):
    n, r, m = t
    return (m, -r, n)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class ALMatrix:
    """Atkin-Lehner involution for an exact divisor c of the level.

    Realized by (1/sqrt(c)) [[alpha*c, beta], [gamma*level, delta*c]] with
    alpha*delta*c - beta*gamma*level/c = 1.  The canonical witness takes
    gamma = delta = 1 and the smallest nonnegative alpha.
    """

    __slots__ = ("level", "c", "alpha", "beta", "gamma", "delta")

    def __init__(self, c, level, witness=None):
        if c < 1 or level % c != 0 or gcd(c, level // c) != 1:
            raise InadmissibleShape(f"{c} is not an exact divisor of {level}")
        self.level, self.c = level, c
        if witness is None:
            witness = self._canonical_witness(c, level)
        self.alpha, self.beta, self.gamma, self.delta = witness
        lhs = self.alpha * self.delta * c - self.beta * self.gamma * (level // c)
        if lhs != 1:
            raise ImageNotIntegral(
                f"witness {witness} fails alpha*delta*c - beta*gamma*level/c = 1")

    @staticmethod
    def _canonical_witness(c, level):
        if c == 1:
            return (1, 0, 0, 1)
        if c == level:
            return (0, -1, 1, 0)
        cofactor = level // c
        u = pow(c, -1, cofactor)
        v = (u * c - 1) // cofactor
        return (u, v, 1, 1)

    def apply(self, t):
        n, r, m = t
        N, c = self.level, self.c
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        n2 = a * a * c * n + a * b * r + b * b * (N // c) * m
        r2 = 2 * a * g * N * n + (2 * a * d * c - 1) * r + 2 * b * d * N * m
        m2 = g * g * (N // c) * n + g * d * r + d * d * c * m
        out = (n2, r2, m2)
        assert det4(out, N) == det4(t, N)
        return out

    def __repr__(self):
        return (f"AL(c={self.c}, level={self.level}, witness="
                f"({self.alpha},{self.beta},{self.gamma},{self.delta}))")


def al_matrix(c, level):
    return ALMatrix(c, level)


def al_index(t, c, level, witness=None):
    return ALMatrix(c, level, witness).apply(t)


def shear_upper(t, level, lam):
    """Stabilizer generator [[1, lam], [0, 1]] acting by t -> A t A^T."""
    n, r, m = t
    return (n + lam * r + lam * lam * m * level, r + 2 * lam * m * level, m)


def shear_lower(t, level, lam):
    """Stabilizer generator [[1, 0], [lam*level, 1]]."""
    n, r, m = t
    return (n, r + 2 * lam * level * n, m + lam * r + lam * lam * level * n)


def _gauss_reduce(A, B, C):
    """Reduce the positive definite form A x^2 + B xy + C y^2.

    Returns (a, b, c, U) with U in SL2(Z) such that the reduced form at w
    equals the input form at w U (row vector times matrix).
    """
    U = [[1, 0], [0, 1]]
    while abs(B) > A or A > C:
        if abs(B) > A:
            k = (A - B) // (2 * A)
            # (w1, w2) -> (w1 + k w2, w2)
            U = [U[0], [k * U[0][0] + U[1][0], k * U[0][1] + U[1][1]]]
            B, C = B + 2 * A * k, A * k * k + B * k + C
        else:
            U = [[-U[1][0], -U[1][1]], list(U[0])]
            A, B, C = C, -B, A
    return A, B, C, U


def _min_with_coprime_y(A, B, C, U, level, seed_w):
    """Minimum of the reduced form over primitive w with gcd(y(wU), level)=1.

    Enumerates w1 >= 0 columns vertex-outward with a live upper bound, so the
    search collapses as soon as any valid short vector is seen.  seed_w must
    be a valid pair (it is the image of the defining slice vector).
    """
    s, t = U[0][1], U[1][1]
    d4 = 4 * A * C - B * B
    best = None
    pairs = []

    def consider(w1, w2):
        nonlocal best, pairs
        if w1 == 0 and w2 == 0:
            return None
        q = A * w1 * w1 + B * w1 * w2 + C * w2 * w2
        if best is not None and q > best:
            return q
        if gcd(w1, w2) == 1 and gcd(w1 * s + w2 * t, level) == 1:
            if best is None or q < best:
                best, pairs = q, [(w1, w2)]
            elif q == best and (w1, w2) not in pairs:
                pairs.append((w1, w2))
        return q

    consider(*seed_w)
    assert best is not None, "seed pair must satisfy the constraints"
    consider(0, 1)
    w1 = 1
    while d4 * w1 * w1 <= 4 * C * best:
        vertex = -(B * w1) // (2 * C)
        for w2 in (vertex, vertex + 1):
            q = consider(w1, w2)
        step = 1
        while True:
            lo = consider(w1, vertex - step)
            hi = consider(w1, vertex + 1 + step)
            if (lo is None or lo > best) and (hi is None or hi > best):
                break
            step += 1
        w1 += 1
    return best, pairs


def canonical_index(t, level):
    """Canonical representative of the stabilizer orbit of t.

    Minimizes the lower-right entry of the Gram matrix over the orbit (the
    values of the form on primitive vectors with first coordinate divisible
    by the level), then folds r into [0, m*level] and takes the smallest.
    Positive definite indices only.
    """
    n, r, m = t
    N = level
    d4 = det4(t, N)
    assert d4 > 0 and n >= 1 and m >= 1, f"positive definite index required: {t}"
    # values f(N x', y)/N form the binary form [nN, r, m] on (x', y);
    # admissible pairs are primitive with y coprime to N
    a, b, c, U = _gauss_reduce(n * N, r, m)
    seed = (-U[1][0], U[0][0])          # (0, 1) pulled back through U
    m_star, wpairs = _min_with_coprime_y(a, b, c, U, N, seed)

    best_r = None
    for (w1, w2) in wpairs:
        xp = w1 * U[0][0] + w2 * U[1][0]
        y = w1 * U[0][1] + w2 * U[1][1]
        x = N * xp
        g, p, q = _xgcd(y, -x)
        assert g == 1 and p * y - q * x == 1
        r2 = 2 * n * p * x + r * (p * y + q * x) + 2 * m * N * q * y
        rho = r2 % (2 * m_star * N)
        if rho > m_star * N:
            rho = 2 * m_star * N - rho
        if best_r is None or rho < best_r:
            best_r = rho
    num = d4 + best_r * best_r
    assert num % (4 * m_star * N) == 0
    return (num // (4 * m_star * N), best_r, m_star)


class ParamodularFragment:
    """Finitely many Fourier coefficients of a paramodular form.

    coeffs is the explicit coverage: stored zero is a known zero, a missing
    index is unknown and raises InsufficientCoverage.  eigen maps exact
    divisors c of the level to recorded involution signs.
    """

    __slots__ = ("level", "weight", "field", "coeffs", "eigen", "label",
                 "_canon")

    def __init__(self, level, weight, field, coeffs, eigen=None, label=None):
        self.level = level
        self.weight = weight
        self.field = field
        self.coeffs = dict(coeffs)
        self.eigen = dict(eigen or {})
        self.label = label
        self._canon = None

    def canonical(self):
        """Coefficients keyed by canonical representatives, consistency-checked."""
        if self._canon is None:
            canon = {}
            for t, v in self.coeffs.items():
                key = canonical_index(t, self.level)
                if key in canon and canon[key] != v:
                    raise InconsistentOrbit(
                        f"orbit of {key}: {canon[key]} vs {v} at {t}")
                canon[key] = v
            self._canon = canon
        return self._canon

    def covered(self, t):
        if t in self.coeffs:
            return True
        return canonical_index(t, self.level) in self.canonical()

    def get(self, t):
        if t in self.coeffs:
            return self.coeffs[t]
        key = canonical_index(t, self.level)
        canon = self.canonical()
        if key not in canon:
            raise InsufficientCoverage(f"index {t} (canonical {key}) not covered")
        return canon[key]

    def fj_slice(self, m):
        """Complete Jacobi rows of the slice q^..., as a fragment of index m*level.

        Row n is complete when every (n, r, m) with det4 > 0 is covered; the
        slice keeps the longest complete initial run of rows.
        """
        from .jacobi import JacobiFormFragment

        N = self.level
        rows = {}
        n = 1
        while True:
            rmax = isqrt(4 * n * m * N - 1)
            try:
                for r in range(-rmax, rmax + 1):
                    rows[(n, r)] = self.get((n, r, m))
            except InsufficientCoverage:
                n -= 1
                break
            n += 1
        if n < 1:
            raise EmptySlice(f"no complete row in slice m={m}")
        return JacobiFormFragment(self.weight, m * N, self.field, n,
                                  {k: v for k, v in rows.items() if k[0] <= n},
                                  cusp=True, label=f"slice{m}({self.label})"
                                  if self.label else None)

    def reduce_mod_p(self, p):
        f = GF(p)
        out = {t: f.coerce(v) for t, v in self.coeffs.items()}
        return ParamodularFragment(self.level, self.weight, f, out,
                                   eigen=self.eigen, label=self.label)

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return (f"<ParamodularFragment level={self.level} k={self.weight} "
                f"#coeffs={len(self.coeffs)}{tag}>")


def polarize(frag, eps2, epsN):
    """Project onto the simultaneous eigenspace for the two involutions.

    The level must be 2*N with N odd; eps2 and epsN are the signs at c = 2
    and c = N.  Every canonical index must have its three involution images
    covered, else CoverageNotClosed.
    """
    L = frag.level
    if L % 2 != 0 or (L // 2) % 2 == 0:
        raise InadmissibleShape(f"level {L} is not 2 * odd")
    assert eps2 in (1, -1) and epsN in (1, -1)
    w2, wN, wF = ALMatrix(2, L), ALMatrix(L // 2, L), ALMatrix(L, L)
    f = frag.field
    canon = frag.canonical()
    quarter = f.inv(f.coerce(4))
    out = {}
    for t, v in canon.items():
        acc = v
        for w, s in ((w2, eps2), (wN, epsN), (wF, eps2 * epsN)):
            u = canonical_index(w.apply(t), L)
            if u not in canon:
                raise CoverageNotClosed(
                    f"image {u} of {t} under c={w.c} not covered")
            term = canon[u] if s == 1 else f.neg(canon[u])
            acc = f.add(acc, term)
        out[t] = f.mul(quarter, acc)
    return ParamodularFragment(L, frag.weight, f, out,
                               eigen={2: eps2, L // 2: epsN},
                               label=f"pol({frag.label})" if frag.label else None)


def _eigen_words(frag):
    out = []
    for c, s in sorted(frag.eigen.items()):
        assert s in (1, -1)
        out.append((ALMatrix(c, frag.level), s))
    return out


def infill(frag, detmax=None):
    """Close the coverage under the recorded involution signs.

    Propagates known values along eigen words until stable.  With detmax
    given, also scans every canonical class with det4 <= 4*detmax and pins
    forced zeros: classes mapped to themselves by a sign -1 word.
    """
    N = frag.level
    f = frag.field
    words = _eigen_words(frag)
    values = dict(frag.canonical())
    queue = list(values)
    while queue:
        t = queue.pop()
        v = values[t]
        for w, s in words:
            u = canonical_index(w.apply(t), N)
            vu = v if s == 1 else f.neg(v)
            if u in values:
                if values[u] != vu:
                    raise InconsistentOrbit(
                        f"{u}: {values[u]} vs {vu} via c={w.c} from {t}")
            else:
                values[u] = vu
                queue.append(u)

    if detmax is not None and f.char != 2:
        for t in canonical_universe(N, detmax):
            if t in values:
                continue
            for w, s in words:
                if s == -1 and canonical_index(w.apply(t), N) == t:
                    values[t] = f.zero
                    break
    return ParamodularFragment(N, frag.weight, f, values, eigen=frag.eigen,
                               label=frag.label)


def canonical_universe(level, detmax):
    """All canonical representatives with 0 < det4 <= 4*detmax, sorted.

    A canonical rep has r <= min(n, m) * level, and its slice entry is the
    minimum of a positive integral binary form over pairs dodging at most two
    bad primes, which caps m at (4/3) * 4 * detmax.  Within those bounds the
    scan walks the narrow window of r making det4 land in (0, cap].
    """
    N = level
    cap = 4 * detmax
    out = []
    for m in range(1, (4 * cap) // 3 + 2):
        n = 1
        n_hi = m * N // 4 + cap // (4 * m * N) + 2
        while n <= n_hi:
            fournm = 4 * n * m * N
            r_hi = min(isqrt(fournm - 1), n * N, m * N)
            need = fournm - cap
            r_lo = 0 if need <= 0 else isqrt(need - 1) + 1
            for r in range(r_lo, r_hi + 1):
                t = (n, r, m)
                if canonical_index(t, N) == t:
                    out.append(t)
            n += 1
    return sorted(out)


def prolong(frag, basis):
    """Write frag in the span of basis fragments and extend its coverage.

    Solves for the unique coordinates on the common covered indices; raises
    Underdetermined when the basis does not separate there and Inconsistent
    when frag is outside the span.  Returns (extended fragment, coordinates).
    """
    assert basis, "need at least one basis fragment"
    f = frag.field
    N = frag.level
    for b in basis:
        assert b.level == N and b.field == f and b.weight == frag.weight

    common = sorted(set(frag.canonical()) & _common_keys(basis))
    from .linalg import solve
    rows = [[b.get(t) for b in basis] for t in common]
    rhs = [frag.get(t) for t in common]
    coords = solve(rows, rhs, len(basis), f)
    coords = [f.coerce(x) for x in coords]

    out = dict(frag.canonical())
    for t in sorted(_common_keys(basis)):
        v = f.zero
        for x, b in zip(coords, basis):
            v = f.add(v, f.mul(x, b.get(t)))
        if t in out:
            if out[t] != v:
                raise InconsistentOrbit(
                    f"prolongation disagrees with known value at {t}")
        else:
            out[t] = v
    new = ParamodularFragment(N, frag.weight, f, out, eigen=frag.eigen,
                              label=frag.label)
    return new, coords


def _common_keys(frags):
    keys = None
    for b in frags:
        s = set(b.canonical())
        keys = s if keys is None else keys & s
    return keys or set()


def certify_nonlift(frag, lifts, p=None):
    """True when frag is independent of the given lifts on common coverage.

    Compares ranks with and without frag over F_p (or the common field).
    Needs at least len(lifts) + 1 common canonical indices.
    """
    if p is not None:
        frag = frag.reduce_mod_p(p)
        lifts = [b.reduce_mod_p(p) for b in lifts]
    f = frag.field
    common = sorted(set(frag.canonical()) & _common_keys(lifts)) if lifts \
        else sorted(frag.canonical())
    if len(common) < len(lifts) + 1:
        raise InsufficientCommonCoverage(
            f"{len(common)} common indices for {len(lifts)} lifts")
    rows = [[b.get(t) for t in common] for b in lifts]
    base = rank(rows, f)
    grown = rank(rows + [[frag.get(t) for t in common]], f)
    assert grown in (base, base + 1)
    return grown == base + 1
