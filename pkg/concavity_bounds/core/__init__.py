"""
Core numerics: Hermitian algebra, states, entropies, bounds and campaigns.
"""

from .bounds import BoundReport, full_report
from .critical_search import CriticalParameterSearch, CriticalParams, SearchSettings
from .fuzz_campaign import CampaignReport, FuzzCampaign, FuzzConfig
from .hermitian import HermitianMatrix, SupportPolicy
from .states import DensityMatrix, MixtureProblem

__all__ = [
    "BoundReport",
    "CampaignReport",
    "CriticalParameterSearch",
    "CriticalParams",
    "DensityMatrix",
    "FuzzCampaign",
    "FuzzConfig",
    "HermitianMatrix",
    "MixtureProblem",
    "SearchSettings",
    "SupportPolicy",
    "full_report",
]
