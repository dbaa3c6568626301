"""
Exact simulation of strategies for the exclusion game and of the bounds
attached to them.

Bob holds a subset ``y`` of ``m`` positions of Alice's ``n``-bit string ``x``
and wins by naming any ``m``-bit string other than ``x`` restricted to ``y``.
"""

from exlab._jit import JIT_ENABLED
from exlab.game import GameInstance, restrict, is_win
from exlab.protocols import build_strategy, pjo_state, pjo_measure, theta

__all__ = [
    "JIT_ENABLED",
    "GameInstance",
    "restrict",
    "is_win",
    "build_strategy",
    "pjo_state",
    "pjo_measure",
    "theta",
]

__version__ = "0.1.0"
