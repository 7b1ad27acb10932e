"""Adaptive and exact confidence bands from wavelet coefficients.

The package builds an orthonormal periodized wavelet basis, represents
functions by their coefficients, simulates three observation models and
assembles sup-norm confidence bands whose resolution and radius are chosen
from the data.
"""
from .adaptive_estimation import (BandParameters, SmoothnessEstimate,
                                  estimate_smoothness, j_ad_hat, j_cl_hat,
                                  j_ex_hat, norm_bracket, threshold_scale)
from .band_engine import (ConfidenceBand, band_constants, band_contains,
                          build_adaptive_band, build_exact_band, radius_r1,
                          radius_r2_r3)
from .function_space import (CoefficientField, SmoothnessClass,
                             adversarial_c1_sequence, holder_norm,
                             is_self_similar, make_density, minimax_pair,
                             prop1_counterexample, sample_pi, truncated_norm)
from .kernels import BACKEND
from .observation_models import (NoisyCoefficients, observe_density,
                                 observe_regression, observe_white_noise,
                                 sup_norm_distance, truncated_estimate)
from .wavelet_core import (FilterBank, ScalingProfile, cascade_evaluate,
                           compute_constants, evaluate_basis_function,
                           load_filter, standard_profile, verify_assumption2)

__version__ = "0.1.0"
