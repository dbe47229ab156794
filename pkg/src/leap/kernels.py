"""Backend selection for the hot loops.

The compiled ``_core`` extension is used when it imports; set
``LEAP_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

if os.environ.get("LEAP_PURE_PYTHON", "") not in ("", "0"):
    from leap import _core_py as _impl
else:
    try:
        from leap import _core as _impl
    except ImportError:
        from leap import _core_py as _impl

BACKEND = _impl.BACKEND
velocity_update = _impl.velocity_update
adoption_probabilities = _impl.adoption_probabilities
apply_moves = _impl.apply_moves
linear_scores = _impl.linear_scores
softmax = _impl.softmax

__all__ = [
    "BACKEND",
    "velocity_update",
    "adoption_probabilities",
    "apply_moves",
    "linear_scores",
    "softmax",
]
