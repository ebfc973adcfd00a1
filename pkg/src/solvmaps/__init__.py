"""Solvable two-variable quadratic recursions in discrete time.

Three equivalent views of one integrable family: a coefficient pair evolving
by squaring (closed-form solvable), the zeros of the corresponding monic
quadratic (solvable through the coefficient route plus root extraction), and
any invertible linear reshaping of the zeros pair (the general six-parameter
quadratic map), optionally shifted by an assigned time-dependent sequence.

Everything runs on either an exact Gaussian-rational backend, where closed
forms are verified bit-for-bit against iteration, or an arbitrary-precision
float backend.
"""

from .numerics import (
    BackendMismatchError,
    DigitBudgetExceededError,
    DomainError,
    ExactScalar,
    FloatScalar,
    Scalar,
    digit_budget,
    exact,
    floating,
    geometric_sum,
    get_digit_budget,
    parse_scalar,
    pow_tower,
    set_digit_budget,
)
from .orbits import OrbitRecord
from .ysystem import (
    YParams,
    YState,
    y1_closed,
    y2_closed,
    y_closed_state,
    y_orbit,
    y_orbit_iterated,
    y_step,
)
from .xsystem import (
    NotAPerfectSquareError,
    RootPair,
    XCoefficients,
    XParams,
    XState,
    delta,
    delta_squared,
    exact_sqrt,
    identity_residual,
    roots_of_monic_quadratic,
    vieta,
    x_coefficients,
    x_orbit_closed,
    x_orbit_iterated,
    x_step,
)
from .zsystem import (
    LinearChange,
    Provenance,
    ShiftExhaustedError,
    ShiftSequence,
    StatePair,
    WCoefficients,
    WState,
    ZParams,
    ZState,
    conjugate_params,
    w_coefficients,
    w_orbit_iterated,
    w_step,
    x_to_z,
    z_orbit_closed,
    z_orbit_iterated,
    z_step,
    z_to_x,
)
from .config import ConfigError, RunConfig, record_dumps, record_loads
from .campaign import CampaignReport, campaign
from .runner import run

__version__ = "0.1.0"
