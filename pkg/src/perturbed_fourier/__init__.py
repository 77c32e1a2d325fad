"""NUDFT, interpolation and quadrature at perturbed equispaced grids.

Nodes ``x_j = (j + delta_j) h`` with ``h = 2 pi / (2N + 1)`` and
``|delta_j| <= alpha < 1/2``. The package measures the conditioning of the
nonuniform DFT on such nodes, interpolates and integrates with it, and checks
the results against closed-form bounds in ``phi(alpha) = 1 - cos(pi alpha) +
sin(pi alpha)``.
"""
__version__ = "0.1.0"

from .bounds import (kadec_condition_bound, mz_frame_bounds, neg_weight_bounds,
                     neg_weight_lower_bound, neg_weight_upper_threshold, phi,
                     weight_abs_sum_bound)
from .estimators import TrigInterpolator, TrigLeastSquares
from .grid import (PerturbedGrid, make_alternating, make_random, make_uniform,
                   validate)
from .mz import discrete_r_mean, frame_constants_exact, lr_norm
from .nudft import NudftOperator, condition_number, kadec_check, solve_inverse
from .oversample import lsq_fit, minnorm_weights, rect_condition
from .quadrature import (compute_weights, exactness_check, integrate,
                         negative_weight_search, stability_measures)
from .trigpoly import TrigPoly, evaluate, interpolate

__all__ = [
    "__version__",
    "PerturbedGrid", "make_uniform", "make_random", "make_alternating", "validate",
    "phi", "kadec_condition_bound", "weight_abs_sum_bound", "mz_frame_bounds",
    "neg_weight_lower_bound", "neg_weight_upper_threshold", "neg_weight_bounds",
    "NudftOperator", "solve_inverse", "condition_number", "kadec_check",
    "TrigPoly", "evaluate", "interpolate",
    "compute_weights", "integrate", "exactness_check", "stability_measures",
    "negative_weight_search",
    "discrete_r_mean", "lr_norm", "frame_constants_exact",
    "lsq_fit", "rect_condition", "minnorm_weights",
    "TrigInterpolator", "TrigLeastSquares",
]
