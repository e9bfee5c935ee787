"""
Concavity Bounds Package

Numerical checks of upper and lower bounds on the concavity of the von Neumann entropy.
"""

__version__ = "1.0.0"

# Import main classes for easy access
from .core.bounds import BoundReport, full_report
from .core.critical_search import CriticalParameterSearch, CriticalParams
from .core.fuzz_campaign import FuzzCampaign, FuzzConfig
from .core.states import DensityMatrix, MixtureProblem, from_bloch

__all__ = [
    "BoundReport",
    "CriticalParameterSearch",
    "CriticalParams",
    "DensityMatrix",
    "FuzzCampaign",
    "FuzzConfig",
    "MixtureProblem",
    "from_bloch",
    "full_report",
]
