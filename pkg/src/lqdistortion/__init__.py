"""Distortion coefficients of LQ optimal-control model spaces.

Numerical library for linear-quadratic model problems: Hamiltonian
propagation, matrix Riccati equations with limit initial datum,
closed-form constant-curvature coefficients, and verification of the
curvature comparison theorems on Heisenberg, Sasakian and 3-Sasakian
geometry backends.
"""

from .closed_forms import (TwoColumnParams, beta_riemannian, beta_riemannian_sharp,
                           beta_two_column, beta_two_column_k2zero,
                           beta_two_column_resonant, check_g_bound,
                           conjugate_time_single_kappa, conjugate_time_two_column_bound,
                           g_of_z, model_product_beta, sin_ratio)
from .compare import (ComparisonTask, MonotonicityVerdict, beta_from_profile,
                      check_conjugate_free, log_derivative, verify,
                      verify_bakry_emery, verify_mcp_two_column, verify_ricci,
                      verify_sectional)
from .errors import (AmbiguousRootError, ConjugatePointError, HypothesisViolatedError,
                     InvalidDiagramError, PoleError)
from .heisenberg import (HeisenbergCovector, HeisenbergWeight, ball_constants,
                         heisenberg_distance, heisenberg_distortion_direct,
                         heisenberg_exp, heisenberg_n0, heisenberg_profile,
                         heisenberg_rho_shift_bound, jacobian_determinant)
from .lq import (DistortionCurve, HamiltonianPropagation, LQProblem,
                 beta_from_determinant, beta_from_riccati_trace, first_conjugate_time,
                 homogeneity_check, propagate)
from .riccati import (CurvatureProfile, RiccatiSolution, bakry_emery_residual,
                      bakry_emery_transform, comparison_campaign,
                      cross_curvature_terms, level_trace_identity_defect, loewner_leq,
                      min_eig, riccati_comparison_check, solve_riccati_limit,
                      split_blocks, trace_levels, traced_comparison)
from .sasakian import (SasakianData, ThreeSasakianData, THREE_SASAKIAN_K_THRESHOLD,
                       sasakian_be_ricci, sasakian_ricci, sasakian_sharp_bound,
                       three_sasakian_kappas, three_sasakian_mcp_condition,
                       three_sasakian_ricci)
from .young import (NormalityReport, YoungDiagram, diagram_from_rows,
                    geodesic_dimension, is_zelenko_li_normal, kalman_rank,
                    normal_form_matrices, vanishing_order, zelenko_li_table)

__version__ = "0.1.0"
