"""Coefficient fields: the rationals and prime fields.

Rational values are plain ints where possible and Fraction otherwise; python's
numeric tower makes the two interoperate, and normalize() collapses integral
Fractions back to int so equality and serialization stay canonical.  Prime
field values are ints in [0, p).
"""

from fractions import Fraction

from .errors import BadPrimeDenominator, FieldMismatch


class RationalField:
    """The field Q.  Singleton QQ below."""

    name = "Q"
    char = 0

    zero = 0
    one = 1

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def sub(x, y):
        return x - y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def neg(x):
        return -x

    @staticmethod
    def inv(x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero in Q")
        q = Fraction(x) ** -1
        return int(q) if q.denominator == 1 else q

    @staticmethod
    def div(x, y):
        if y == 0:
            raise ZeroDivisionError("division by zero in Q")
        q = Fraction(x) / Fraction(y)
        return int(q) if q.denominator == 1 else q

    @staticmethod
    def coerce(x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return int(x) if x.denominator == 1 else x
        raise TypeError(f"cannot coerce {x!r} into Q")

    @staticmethod
    def normalize(x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return int(x)
        return x

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class PrimeField:
    """The field F_p for prime p.  Instances are cached: GF(p) is GF(p)."""

    char = None  # set per instance

    def __init__(self, p):
        assert p >= 2
        self.p = p
        self.char = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError(f"inverse of zero in F_{self.p}")
        return pow(x, -1, self.p)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def coerce(self, x):
        """Map an int or p-integral Fraction into F_p."""
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise BadPrimeDenominator(
                    f"denominator of {x} is divisible by p={self.p}")
            return (x.numerator % self.p) * pow(x.denominator, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {x!r} into F_{self.p}")

    @staticmethod
    def normalize(x):
        return x

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


_GF_CACHE = {}


def GF(p):
    """The prime field F_p (cached)."""
    try:
        return _GF_CACHE[p]
    except KeyError:
        fld = _GF_CACHE[p] = PrimeField(p)
        return fld


def same_field(a, b):
    """Check two field tags agree, else raise FieldMismatch."""
    if a is b or a == b:
        return a
    raise FieldMismatch(f"operands over {a!r} and {b!r}")
