"""The solvable coefficient system.

Two coupled quadratic recursions in discrete time ell:

    y1' = alpha * y1**2
    y2' = beta**2 * y1**2 * y2 + gamma * y1**4

The first equation closes on its own and is solved by repeated squaring; the
second is linear in y2 once y1 is known, which telescopes into a geometric
sum.  Both admit closed-form evaluation at arbitrary ell, implemented here
alongside plain iteration so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import (
    DomainError,
    Scalar,
    check_time_index,
    geometric_sum,
    one_like,
    pow_tower,
    require_same_backend,
)
from .orbits import OrbitRecord


@dataclass(frozen=True)
class YParams:
    """Parameters (alpha, beta, gamma) of the coefficient system.

    gamma is unconstrained here; the zeros-side correspondence pins it to
    (alpha**2 - beta**2)/4, which xsystem.XParams enforces by construction.
    """

    alpha: Scalar
    beta: Scalar
    gamma: Scalar

    def __post_init__(self):
        require_same_backend(self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class YState:
    y1: Scalar
    y2: Scalar

    def __post_init__(self):
        require_same_backend(self.y1, self.y2)

    @property
    def components(self):
        return (self.y1, self.y2)


def y_step(p: YParams, s: YState) -> YState:
    """One step of the coefficient system."""
    y1_sq = s.y1 * s.y1
    return YState(
        p.alpha * y1_sq,
        p.beta ** 2 * y1_sq * s.y2 + p.gamma * y1_sq * y1_sq,
    )


def y1_closed(alpha: Scalar, y1_0: Scalar, ell: int) -> Scalar:
    """First component after ell steps: alpha**-1 * (alpha*y1_0)**(2**ell).

    Requires alpha != 0 (the formula divides by it); iterate instead when
    alpha is zero.
    """
    check_time_index(ell)
    if alpha.is_zero:
        raise DomainError("closed form needs alpha != 0; use the iterated method")
    return pow_tower(alpha * y1_0, ell) / alpha


def y2_closed(p: YParams, s0: YState, ell: int) -> Scalar:
    """Second component after ell steps.

    Evaluates
        (beta/alpha)**(2*ell) * b**(2**(ell+1) - 2)
            * ( y2_0 + gamma * (alpha*beta)**-2 * G * b**2 )
    with b = alpha*y1_0 and G the geometric sum of (alpha/beta)**2 over ell
    terms.  The degenerate ratio (alpha/beta)**2 == 1 (in particular
    alpha = +-beta) is handled inside geometric_sum, where G collapses to ell.
    Requires alpha != 0 and beta != 0.
    """
    check_time_index(ell)
    if p.alpha.is_zero or p.beta.is_zero:
        raise DomainError("closed form needs alpha != 0 and beta != 0; use the iterated method")
    b = p.alpha * s0.y1
    prefactor = (p.beta / p.alpha) ** (2 * ell) * _tail_power(b, ell)
    g = geometric_sum((p.alpha / p.beta) ** 2, ell)
    bracket = s0.y2 + p.gamma * (p.alpha * p.beta) ** -2 * g * b * b
    return prefactor * bracket


def _tail_power(b: Scalar, ell: int) -> Scalar:
    # b**(2**(ell+1) - 2) as the product of b**(2**s) for s = 1..ell.
    # Total in b: the empty product at ell = 0 gives 1 even for b = 0.
    acc = one_like(b)
    t = b
    for _ in range(ell):
        t = t * t
        acc = acc * t
    return acc


def y_closed_state(p: YParams, s0: YState, ell: int) -> YState:
    """Both components at time ell via the closed forms."""
    return YState(y1_closed(p.alpha, s0.y1, ell), y2_closed(p, s0, ell))


def y_orbit_iterated(p: YParams, s0: YState, horizon: int) -> list[YState]:
    check_time_index(horizon)
    states = [s0]
    for _ in range(horizon):
        states.append(y_step(p, states[-1]))
    return states


def y_orbit(p: YParams, s0: YState, horizon: int, method: str = "iterated") -> OrbitRecord:
    """Orbit s(0..horizon) as a record.

    method "iterated" applies y_step repeatedly; "closed" evaluates the closed
    forms at each time index independently, so every point is a fresh test of
    the formulas rather than a running product.
    """
    check_time_index(horizon)
    if method == "iterated":
        states = y_orbit_iterated(p, s0, horizon)
    elif method == "closed":
        states = [y_closed_state(p, s0, ell) for ell in range(horizon + 1)]
    else:
        raise ValueError(f"unknown orbit method {method!r} (expected 'iterated' or 'closed')")
    return OrbitRecord(
        system="y",
        backend=s0.y1.backend,
        method=method,
        horizon=horizon,
        states=states,
    )
