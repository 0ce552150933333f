"""Tree augmentation: the 7/4 LP-relative contraction algorithm, its LP, and brute-force checks."""

from .contraction import solve
from .instance import TapInstance, parse_instance, shadow_completion, validate_solution
from .leafcover import LeafWeightConfig, min_weight_exact_cover
from .lpbound import build_cut_model, build_pi_model, solve_lp

__all__ = [
    "TapInstance", "parse_instance", "shadow_completion", "validate_solution", "solve",
    "LeafWeightConfig", "min_weight_exact_cover", "build_pi_model", "build_cut_model", "solve_lp",
]
