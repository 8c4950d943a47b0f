"""Exact border-rank lower bounds for order-3 tensors.

Young flattenings and the Griesser subspace test over exact integers, with
every random choice drawn from an explicit seed.
"""

from .constructions import (
    LambdaSource, aft_prime_tensor, aft_tensor, graded_tensor, matmul_tensor,
    polymult_truncated,
)
from .tensor3 import Tensor3, load, save
from .youngflat import BoundReport, best_border_rank_lb, border_rank_lb, young_rank

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "LambdaSource", "Tensor3", "aft_prime_tensor", "aft_tensor",
    "best_border_rank_lb", "border_rank_lb", "graded_tensor", "load", "matmul_tensor",
    "polymult_truncated", "save", "young_rank",
]
