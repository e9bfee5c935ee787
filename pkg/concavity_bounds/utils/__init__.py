"""
Closed-form qubit helpers.
"""

from .math_utils import qubit_mixture_bounds

__all__ = ["qubit_mixture_bounds"]
