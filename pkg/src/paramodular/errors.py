"""Error taxonomy shared across the package.

Every contract violation raises a subclass of ParamodularError.  The CLI maps
each class to a fixed nonzero exit code (EXIT_CODE below); library callers can
catch the base class or any specific one.
"""


class ParamodularError(Exception):
    """Base class for all library errors."""


# --- series arithmetic -------------------------------------------------------

class FieldMismatch(ParamodularError):
    """Two operands live over different coefficient fields."""


class UnboundedBelow(ParamodularError):
    """An operand has no lowest q-exponent, so the Cauchy product is undefined."""


class DivisionByZero(ParamodularError):
    """Division by the zero series."""


class NonExactDivision(ParamodularError):
    """Slice division left a nonzero Laurent remainder."""

    def __init__(self, msg, slice_index=None):
        super().__init__(msg)
        self.slice_index = slice_index


class NonInvertibleLeadingSlice(ParamodularError):
    """Negative power requested but the leading q-slice is not a unit monomial."""


class BadPrimeDenominator(ParamodularError):
    """A rational coefficient has denominator divisible by the reduction prime."""


# --- shapes and validation ---------------------------------------------------

class InadmissibleShape(ParamodularError):
    """Eta/theta exponent data violates an admissibility constraint."""


class ClassInvarianceViolation(ParamodularError):
    """Coefficients disagree on a single (discriminant, r-class) orbit."""


class SymmetryViolation(ParamodularError):
    """c(n,r) != (-1)^k c(n,-r) somewhere in the covered range."""


class CuspidalityViolation(ParamodularError):
    """A nonzero coefficient sits at non-positive discriminant in a cusp fragment."""


class FractionalExponents(ParamodularError):
    """Series exponents are not integral in (q, zeta) for the requested shape."""


class InsufficientCoverage(ParamodularError):
    """An operator needs source coefficients beyond the covered range."""


class RankDeficit(ParamodularError):
    """A basis search stopped short of the target dimension."""

    def __init__(self, msg, found=None, target=None):
        super().__init__(msg)
        self.found = found
        self.target = target


class ValidationFailure(ParamodularError):
    """A weight-zero candidate failed one of the validity checks."""


class SelfCheckFailure(ParamodularError):
    """A product expansion failed an internal consistency invariant."""


# --- index bookkeeping -------------------------------------------------------

class ImageNotIntegral(ParamodularError):
    """An involution-matrix image of an index left the integral cone."""


class CoverageNotClosed(ParamodularError):
    """Coverage is not closed under the required index orbit."""


class InconsistentOrbit(ParamodularError):
    """Two derivations of the same canonical index disagree."""


class Underdetermined(ParamodularError):
    """Known coefficients do not pin down coordinates uniquely."""


class Inconsistent(ParamodularError):
    """Known coefficients are incompatible with the candidate span."""


class InsufficientCommonCoverage(ParamodularError):
    """Too few shared indices to certify independence."""


class EmptySlice(ParamodularError):
    """A requested Fourier-Jacobi slice has no fully covered rows."""


class CoverageGap(ParamodularError):
    """A needed basis coefficient is missing from the supplied data."""


class DetmaxInadmissible(ParamodularError):
    """A slice basis is not injective on the det <= detmax window."""


# --- storage -----------------------------------------------------------------

class ParseError(ParamodularError):
    """A stored file violates the line format."""

    def __init__(self, msg, lineno=None):
        super().__init__(msg)
        self.lineno = lineno


class HeaderMismatch(ParamodularError):
    """Header metadata contradicts the requested interpretation."""


# Fixed CLI exit codes, one per error class (0 = success, 1 = unexpected,
# 2 = usage, 3 = certified-dependent result).
EXIT_CODE = {
    FieldMismatch: 10,
    UnboundedBelow: 11,
    DivisionByZero: 12,
    NonExactDivision: 13,
    NonInvertibleLeadingSlice: 14,
    BadPrimeDenominator: 15,
    InadmissibleShape: 16,
    ClassInvarianceViolation: 17,
    SymmetryViolation: 18,
    CuspidalityViolation: 19,
    FractionalExponents: 20,
    InsufficientCoverage: 21,
    RankDeficit: 22,
    ValidationFailure: 23,
    SelfCheckFailure: 24,
    ImageNotIntegral: 25,
    CoverageNotClosed: 26,
    InconsistentOrbit: 27,
    Underdetermined: 28,
    Inconsistent: 29,
    InsufficientCommonCoverage: 30,
    EmptySlice: 31,
    CoverageGap: 32,
    DetmaxInadmissible: 33,
    ParseError: 34,
    HeaderMismatch: 35,
}

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_DEPENDENT = 3


def exit_code_for(exc):
    """Exit code for a raised library error (nearest registered ancestor)."""
    for cls in type(exc).__mro__:
        if cls in EXIT_CODE:
            return EXIT_CODE[cls]
    return EXIT_UNEXPECTED
