"""Exact q-polynomial toolkit for hook-difference positivity questions."""

__version__ = "0.1.0"

from qpos.qpoly import Polynomial, first_negative  # noqa: E402
from qpos.qseries import pochhammer, qbinom, qtrinom  # noqa: E402
from qpos.dseries import DParams, d_poly, g_poly, validate, check_symmetry  # noqa: E402

__all__ = [
    "Polynomial", "first_negative", "pochhammer", "qbinom", "qtrinom",
    "DParams", "d_poly", "g_poly", "validate", "check_symmetry",
]
