"""q-hypergeometric integral solutions of the qKZ equation for U_q(sl2).

Evaluation of the weight/phase functions, structured gauge elements with an
exact p-shift calculus, deformed-torus contour quadrature, the screened
free-field closed forms, and difference-equation residual checks.
"""

__version__ = "0.1.0"

from .exceptions import (
    ContourError,
    GenericPositionError,
    PoleEvaluationError,
    QKZError,
)
from .params import ParameterSet, unit_circle_points
from .qseries import c_factor, qpochhammer, qpochhammer_double, rho, theta, xi
from .spinchain import (
    SpinConfig,
    SpinVector,
    flip_all,
    flip_legs,
    kappa_apply,
    permutation_apply,
    r_apply,
    rhat_apply,
    sector_bits,
)
from .tvweights import PointConfig, phase_function, weight_function
from .ellspace import (
    ShiftRatio,
    StructuredW,
    ThetaAtom,
    check_conditions,
    eval_w,
    shift_multiplier,
    solve_default_w,
    w_from_json,
    w_to_json,
)
from .contours import ContourPlan, integrate, t_contour_plan, u_contour_plan
from .freefield import (
    ScreenSignConfig,
    alternating_sign_sum,
    assembled_component,
    correlation_component,
    ope_prefactor,
    screening_sign_sum,
    u_integral_closed,
    u_kernel,
    u_kernel_full,
    vertex_prefactor,
    weight_reduction,
)
from .qkz import (
    QKZReport,
    check_solution,
    default_w,
    freefield_solution,
    kz2_to_kz1,
    qkz_residual,
    solution_ratio,
    transform_exponent_audit,
    tv_solution,
)
