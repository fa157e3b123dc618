"""Algebraic-diversity estimation toolkit.

Full-rank covariance estimation from a single observation via finite-group
actions, with the group-matching metric suite, blind chirp
characterization, single-snapshot MUSIC, colored-noise characterization,
graph-automorphism discovery, a simplified massive-MIMO benchmark, and a
seeded Monte Carlo experiment harness.
"""

__version__ = "0.1.0"

from .estimators import CovEstimate, Observation, group_averaged, pase
from .groups import GroupKind, GroupRep, OrderingStrategy, Permutation, build_group
from .metrics import MismatchReport, mismatch_report

__all__ = [
    "CovEstimate",
    "GroupKind",
    "GroupRep",
    "MismatchReport",
    "Observation",
    "OrderingStrategy",
    "Permutation",
    "__version__",
    "build_group",
    "group_averaged",
    "mismatch_report",
    "pase",
]
