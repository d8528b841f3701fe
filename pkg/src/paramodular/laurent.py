"""Sparse Laurent polynomials as plain dicts {exponent: coefficient}.

These are the per-q-slice payloads of PuiseuxSeries and the substance of baby
theta blocks.  Exponents are arbitrary ints (for series slices they count
half-integer zeta powers, so exponent b means zeta^(b/2)).  Zero coefficients
are never stored.
"""

from .errors import NonExactDivision
from .fields import QQ


def lp_norm(poly, field=QQ):
    """Drop zeros and normalize coefficients in place; return the dict."""
    dead = [k for k, v in poly.items() if v == 0]
    for k in dead:
        del poly[k]
    norm = field.normalize
    for k, v in poly.items():
        poly[k] = norm(v)
    return poly


def lp_add(a, b, field=QQ):
    out = dict(a)
    fadd = field.add
    for k, v in b.items():
        w = fadd(out.get(k, 0), v)
        if w == 0:
            out.pop(k, None)
        else:
            out[k] = w
    return out


def lp_neg(a, field=QQ):
    fneg = field.neg
    return {k: fneg(v) for k, v in a.items()}

def lp_scale(a, c, field=QQ):
    if c == 0:
        return {}
    fmul = field.mul
    out = {}
    for k, v in a.items():
        w = fmul(v, c)
        if w != 0:
            out[k] = w
    return out


def lp_mul(a, b, field=QQ):
    """Convolution product; the workhorse of every expansion."""
    if not a or not b:
        return {}
    if len(a) > len(b):  # iterate the shorter one outside
        a, b = b, a
    out = {}
    fmul = field.mul
    fadd = field.add
    bi = list(b.items())
    for k1, v1 in a.items():
        for k2, v2 in bi:
            k = k1 + k2
            w = fadd(out.get(k, 0), fmul(v1, v2))
            if w == 0:
                out.pop(k, None)
            else:
                out[k] = w
    return out


def lp_shift(a, off):
    if off == 0:
        return dict(a)
    return {k + off: v for k, v in a.items()}


def lp_divmod(num, den, field=QQ):
    """Exact-or-remainder Laurent division: num = q*den + rem.

    Returns (quotient, remainder) with the quotient supported on
    [min(num)-min(den), max(num)-max(den)]; whatever cannot be cleared top-down
    within that window is the remainder.
    """
    if not den:
        raise ZeroDivisionError("Laurent division by zero")
    if not num:
        return {}, {}
    dtop = max(den)
    dlow = min(den)
    lead = den[dtop]
    lowest = min(num) - dlow  # minimal quotient exponent if division is exact
    rem = dict(num)
    quo = {}
    fdiv = field.div
    fmul = field.mul
    fsub = field.sub
    while rem:
        top = max(rem)
        k = top - dtop
        if k < lowest:
            break
        c = fdiv(rem[top], lead)
        quo[k] = c
        for dk, dv in den.items():
            kk = k + dk
            w = fsub(rem.get(kk, 0), fmul(c, dv))
            if w == 0:
                rem.pop(kk, None)
            else:
                rem[kk] = w
    return lp_norm(quo, field), lp_norm(rem, field)


def lp_div_exact(num, den, field=QQ, what="slice"):
    quo, rem = lp_divmod(num, den, field)
    if rem:
        raise NonExactDivision(f"nonzero Laurent remainder in {what}")
    return quo


def lp_divides(den, num, field=QQ):
    """True when den divides num exactly (Laurent polynomials)."""
    if not num:
        return True
    if not den:
        return False
    _, rem = lp_divmod(num, den, field)
    return not rem


def lp_pow(a, e, field=QQ):
    assert e >= 0
    out = {0: field.one}
    base = dict(a)
    while e:
        if e & 1:
            out = lp_mul(out, base, field)
        e >>= 1
        if e:
            base = lp_mul(base, base, field)
    return out
