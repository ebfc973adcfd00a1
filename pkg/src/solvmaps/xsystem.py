"""The zeros-side system: a labeled pair evolving by homogeneous quadratic forms.

The pair (x1, x2) and the coefficient pair (y1, y2) = (-(x1+x2), x1*x2) are
two views of one monic quadratic polynomial: x1, x2 are its zeros, y1, y2 its
coefficients.  When the coefficients evolve by the solvable system in
`ysystem` with gamma = (alpha**2 - beta**2)/4, the zeros themselves satisfy
the polynomial recursion

    x_n' = a1(n)*x1**2 + a2(n)*x2**2 + a3(n)*x1*x2,      n = 1, 2

with

    a1(n) = -(alpha + (-1)**n * beta)/2
    a2(n) = -(alpha - (-1)**n * beta)/2
    a3(n) = -alpha

obtained by expanding x_n' = -[alpha*(x1+x2)**2 + (-1)**n * beta*(x1**2-x2**2)]/2.
The sign split between a1 and a2 matters: with a2 set equal to a1 the
zeros/coefficients correspondence breaks for beta != 0 (the verification
campaign includes that negative control).

Orbits of the labeled pair are therefore solvable: push the initial pair to
coefficients, evaluate the closed forms, and pull back through the quadratic
formula.  On the exact backend the pull-back exists only when the discriminant
is a perfect square in the Gaussian rationals; `roots_of_monic_quadratic`
raises `NotAPerfectSquareError` otherwise and callers fall back to comparing
symmetric functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mpc, sqrt as mp_sqrt, workprec

from .numerics import (
    ExactScalar,
    FloatScalar,
    Scalar,
    check_time_index,
    lexkey,
    require_same_backend,
)
from .ysystem import YParams, YState, y1_closed, y2_closed


class NotAPerfectSquareError(ArithmeticError):
    """Exact root extraction failed: the discriminant has no Gaussian-rational root."""


@dataclass(frozen=True)
class XParams:
    """Zeros-side parameters (alpha, beta); gamma is derived, never set."""

    alpha: Scalar
    beta: Scalar

    def __post_init__(self):
        require_same_backend(self.alpha, self.beta)

    @property
    def gamma(self) -> Scalar:
        return (self.alpha * self.alpha - self.beta * self.beta) / 4

    def to_y_params(self) -> YParams:
        return YParams(self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class XState:
    """A labeled pair of zeros; the labels are tracked by the iteration."""

    x1: Scalar
    x2: Scalar

    def __post_init__(self):
        require_same_backend(self.x1, self.x2)

    @property
    def components(self):
        return (self.x1, self.x2)

    def swapped(self) -> "XState":
        return XState(self.x2, self.x1)


@dataclass(frozen=True)
class XCoefficients:
    """The six quadratic-form coefficients, one row (a1, a2, a3) per component."""

    rows: tuple

    def coeff(self, n: int, j: int) -> Scalar:
        """a_j for component n, both 1-based."""
        return self.rows[n - 1][j - 1]


class RootPair:
    """An unordered pair of scalars with multiset equality."""

    __slots__ = ("items",)

    def __init__(self, first: Scalar, second: Scalar):
        object.__setattr__(self, "items", (first, second))

    def __setattr__(self, name, value):
        raise AttributeError("RootPair is immutable")

    def sorted_items(self):
        return tuple(sorted(self.items, key=lexkey))

    def __eq__(self, other):
        if isinstance(other, RootPair):
            a, b = self.items
            c, d = other.items
            return (a == c and b == d) or (a == d and b == c)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((lexkey(self.items[0]), lexkey(self.items[1]))))

    def __iter__(self):
        return iter(self.items)

    def __repr__(self):
        return f"RootPair({self.items[0]!r}, {self.items[1]!r})"


def vieta(s: XState) -> YState:
    """Coefficients of the monic quadratic with zeros x1, x2: (-(x1+x2), x1*x2)."""
    return YState(-(s.x1 + s.x2), s.x1 * s.x2)


def _fraction_sqrt(q: Fraction):
    if q < 0:
        return None
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def exact_sqrt(d: ExactScalar) -> ExactScalar:
    """A Gaussian-rational square root of d, if one exists.

    For d = a + b*i a root u + v*i requires u**2 = (a + n)/2 with n = |d|,
    so both n**2 = a**2 + b**2 and (a + n)/2 must be squares of rationals;
    the integer-square-root test on numerators and denominators decides each.
    Raises NotAPerfectSquareError when d is not a perfect square.
    """
    a, b = d.re, d.im
    if b == 0:
        r = _fraction_sqrt(a if a >= 0 else -a)
        if r is None:
            raise NotAPerfectSquareError(f"{d} has no Gaussian-rational square root")
        return ExactScalar(r, 0) if a >= 0 else ExactScalar(0, r)
    n = _fraction_sqrt(a * a + b * b)
    if n is None:
        raise NotAPerfectSquareError(f"{d} has no Gaussian-rational square root")
    u = _fraction_sqrt((a + n) / 2)
    if u is None or u == 0:
        raise NotAPerfectSquareError(f"{d} has no Gaussian-rational square root")
    v = b / (2 * u)
    root = ExactScalar(u, v)
    assert root * root == d
    return root


def roots_of_monic_quadratic(y: YState) -> RootPair:
    """The unordered zeros of z**2 + y1*z + y2.

    Exact backend: requires the discriminant y1**2 - 4*y2 to be a perfect
    square in the Gaussian rationals, else NotAPerfectSquareError.  Float
    backend: always succeeds, using the cancellation-safe form that computes
    the larger-magnitude root first and recovers the other from the product y2.
    """
    disc = y.y1 * y.y1 - 4 * y.y2
    if y.y1.backend == "exact":
        s = exact_sqrt(disc)
        return RootPair((-y.y1 + s) / 2, (-y.y1 - s) / 2)
    prec = min(y.y1.prec, y.y2.prec)
    with workprec(prec):
        b = y.y1.value
        s = mp_sqrt(disc.value)
        # Align the root of the discriminant with y1 so b + s never cancels.
        if (b.real * s.real + b.imag * s.imag) < 0:
            s = -s
        big = -(b + s) / 2
        if big == 0:
            return RootPair(FloatScalar._make(mpc(0), prec), FloatScalar._make(mpc(0), prec))
        other = y.y2.value / big
        return RootPair(FloatScalar._make(big, prec), FloatScalar._make(other, prec))


def x_coefficients(p: XParams) -> XCoefficients:
    """Quadratic-form coefficients of the zeros recursion for parameters p."""
    rows = []
    for n in (1, 2):
        signed_beta = p.beta if n == 2 else -p.beta
        rows.append(
            (
                -(p.alpha + signed_beta) / 2,
                -(p.alpha - signed_beta) / 2,
                -p.alpha,
            )
        )
    return XCoefficients(tuple(rows))


def _apply_row(row, u: Scalar, v: Scalar) -> Scalar:
    a1, a2, a3 = row
    return a1 * u * u + a2 * v * v + a3 * u * v


def x_step(p: XParams, s: XState) -> XState:
    """One labeled step of the zeros recursion."""
    coeffs = x_coefficients(p)
    return XState(
        _apply_row(coeffs.rows[0], s.x1, s.x2),
        _apply_row(coeffs.rows[1], s.x1, s.x2),
    )


def x_orbit_iterated(p: XParams, s0: XState, horizon: int) -> list[XState]:
    check_time_index(horizon)
    states = [s0]
    for _ in range(horizon):
        states.append(x_step(p, states[-1]))
    return states


def delta(p: XParams, s: XState) -> Scalar:
    """The discriminant branch beta*(x1**2 - x2**2) (plus branch, fixed).

    Its square equals delta_squared(p, s); the residual sign freedom is
    absorbed into the component labeling, which swap covariance of x_step
    makes harmless.
    """
    return p.beta * (s.x1 * s.x1 - s.x2 * s.x2)


def delta_squared(p: XParams, s: XState) -> Scalar:
    """The unfactored square of the discriminant branch,

        (x1+x2)**2 * [ (alpha**2 - 4*gamma)*(x1+x2)**2 - 4*beta**2*x1*x2 ],

    an independent route to delta(p, s)**2: with gamma = (alpha**2-beta**2)/4
    the bracket collapses to beta**2*(x1-x2)**2, which is the algebraic content
    of that constraint.
    """
    total = s.x1 + s.x2
    total_sq = total * total
    bracket = (p.alpha * p.alpha - 4 * p.gamma) * total_sq - 4 * p.beta * p.beta * s.x1 * s.x2
    return total_sq * bracket


def identity_residual(s: XState, nxt: XState, y: YState, y_next: YState):
    """Left-hand side of the zeros/coefficients consistency identity,

        (x_n' - x1)(x_n' - x2) + (y1' - y1)*x_n' + (y2' - y2),

    for n = 1, 2.  Exactly zero whenever (s -> nxt, y -> y_next) is a genuine
    simultaneous step of the two systems.
    """
    out = []
    for x_new in (nxt.x1, nxt.x2):
        out.append(
            (x_new - s.x1) * (x_new - s.x2)
            + (y_next.y1 - y.y1) * x_new
            + (y_next.y2 - y.y2)
        )
    return tuple(out)


def x_orbit_closed(p: XParams, s0: XState, ell: int) -> RootPair:
    """The unordered pair of zeros at time ell, computed without iterating.

    Route: vieta to coefficients, closed-form coefficient evolution, root
    extraction.  Inherits alpha, beta != 0 from the closed forms and, on the
    exact backend, the perfect-square requirement from root extraction.
    """
    check_time_index(ell)
    y0 = vieta(s0)
    yp = p.to_y_params()
    y_ell = YState(y1_closed(p.alpha, y0.y1, ell), y2_closed(yp, y0, ell))
    return roots_of_monic_quadratic(y_ell)
