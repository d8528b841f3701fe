"""Exact arithmetic for paramodular form constructions.

Core layers: Puiseux series over Q or F_p, eta/theta blocks, Jacobi form
fragments with index raising and Gritsenko lifts, weight-zero weakly
holomorphic inputs, Borcherds product expansion, Atkin-Lehner coefficient
bookkeeping, and Jacobi restriction.
"""

from .errors import (ParamodularError, NonExactDivision, InadmissibleShape,
                     RankDeficit, InsufficientCoverage, ValidationFailure)
from .fields import QQ, GF
from .series import PuiseuxSeries, INF
from .etatheta import ThetaBlock, BabyBlock, eta, theta, theta_sum, baby, search

__version__ = "0.1.0"

__all__ = [
    "ParamodularError", "NonExactDivision", "InadmissibleShape", "RankDeficit",
    "InsufficientCoverage", "ValidationFailure",
    "QQ", "GF", "PuiseuxSeries", "INF",
    "ThetaBlock", "BabyBlock", "eta", "theta", "theta_sum", "baby", "search",
    "__version__",
]
