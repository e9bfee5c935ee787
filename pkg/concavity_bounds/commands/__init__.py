"""
Command-line surface.
"""

from .harness_command import HarnessCommand, main

__all__ = ["HarnessCommand", "main"]
