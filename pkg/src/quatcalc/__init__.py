"""Quaternion calculus engine: HR and generalized HR derivatives, the
calculus rules built on them, mean value and Taylor checks, and the adaptive
filters derived from the conjugate gradient."""

from .derivatives import (DegenerateAxisError, DerivativeSet, EvaluationError,
                          GhrPair, RealPartials, SecondOrderSet,
                          check_chain_rule, check_product_rule,
                          conjugation_relation, differential_consistency,
                          left_ghr, left_hr, real_partials, right_ghr,
                          right_hr, second_order_left, second_order_right)
from .filters import (ExperimentConfig, ExperimentResult, FilterState,
                      QVector, generate_signal, phi_tanh, qlms_state,
                      qlms_step, qngd_state, qngd_step, run_experiment,
                      wl_qlms_state, wl_qlms_step)
from .identities import IdentityRecord, SuiteResult, run_identity_suite
from .quaternion import (AXES, ONE, UNITS, ZERO, MuBasis, PolarForm,
                         Quaternion, components_from_involutions,
                         conjugate_links, format_quaternion, involute,
                         involute_conj, isclose, mu_basis, parse_quaternion,
                         polar, reflect, rotate)
from .sampling import (make_rng, random_pure_unit, random_quaternion,
                       random_unit)
from .tables import (CrossCheck, EntryDerivatives, FamilySpec, TableEntry,
                     as_function, catalogue, conj_gradient, cross_validate,
                     derivative, eval_entry, exp_series_tail_bound)
from .theorems import (DescentTrace, DivergenceError, SegmentCheck, TaylorFit,
                       descent_direction_gap, first_order_error, mvt_left,
                       mvt_error_bound_check, steepest_descent, taylor2_left,
                       taylor_remainder_slope)

__version__ = "0.1.0"
