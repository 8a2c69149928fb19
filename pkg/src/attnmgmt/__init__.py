"""Attention management with quadratic payoffs.

Incentive-compatibility checks for information policies shown to a
rationally inattentive agent, the closed-form optimal policy for three
evenly spaced states, and brute-force oracles that verify both.
"""
from .errors import AttentionError
from .ic import order_ic, slope_cutoff
from .optimal3 import Regime, solve, thresholds
from .oracle import Verdict, check_with_oracle, ic_via_oracle
from .policy import InformationPolicy, full_disclosure, no_information, validate_policy
from .quadratic import QuadraticModel
from .search import verify_prop2

__version__ = "0.1.0"

__all__ = [
    "AttentionError",
    "InformationPolicy",
    "QuadraticModel",
    "Regime",
    "Verdict",
    "check_with_oracle",
    "full_disclosure",
    "ic_via_oracle",
    "no_information",
    "order_ic",
    "slope_cutoff",
    "solve",
    "thresholds",
    "validate_policy",
    "verify_prop2",
]
