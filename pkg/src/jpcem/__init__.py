"""Multi-view sparse-representation classification with jointly estimated
spike-and-slab priors (JPCEM)."""
from .algorithm import (CoefficientMatrix, JpcemConfig, PriorState, jpcem_solve,
                        kappa_update, min_alpha, rho_update, weight_update)
from .classify import (ClassificationResult, classify_multiview,
                       multiview_src_baseline, src_single_baseline)
from .dictionary import Dictionary, build_dictionary, delta_c
from .solver import (AugmentedSystem, WeightedLassoProblem, augment,
                     brute_force_lasso, eval_objective, solve_weighted_lasso)

__version__ = "0.1.0"
