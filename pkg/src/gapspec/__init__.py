"""Gap spectral sets, reflectionless measures, equilibrium potentials,
Jacobi operators, and numerical verification of eigenvalue inequalities."""

from .errors import (AccuracyError, DomainError, GapspecError, ResourceError,
                     SingularityError, SolverError, ValidationError)
from .gapset import (GapSet, cantor_set, finite_gap_set, infinite_band_set,
                     set_diagnostics)
from .reflmeasure import (ExtremalConfiguration, ReflectionlessMeasure,
                          cauchy_abs_integral, density, gap_log_constant,
                          m_value, refl_estimate_check, sup_torus_bound,
                          total_mass)
from .potential import (EquilibriumMeasure, GreenFunction, green_function,
                        green_sqrt_bound_check, green_value, robin_capacity,
                        solve_equilibrium)
from .jacobi import (JacobiCoeffs, PerturbationSplit, eig_tridiag,
                     eigs_in_interval, gap_eigenvalues, jacobi_eigh,
                     local_spectral_measure, perturbed_section,
                     rank_one_secular, sandwich_trace_norm,
                     split_perturbation, stieltjes_coefficients)
from .ltverify import (BoundReport, band_cantor_estimate_check,
                       birman_schwinger_check, cantor_lemma_products,
                       fit_gap_constants, kato_rhs, s_p, thm1_constant,
                       thm2_constant, verify_green_bound,
                       verify_schatten_bound, verify_trace_class_bound)

__version__ = "0.1.0"
