"""Shared draw helpers and hypothesis strategies for the test suite.

Random rationals follow the documented replay scheme: numerators uniform in
[-9, 9], denominators uniform in [1, 9], redrawing while a value that must be
nonzero is zero.
"""

from fractions import Fraction

from hypothesis import strategies as st

from solvmaps.numerics import ExactScalar
from solvmaps.xsystem import XParams, XState
from solvmaps.ysystem import YParams, YState
from solvmaps.zsystem import LinearChange


def fraction(rng, nonzero=False) -> Fraction:
    num = rng.randint(-9, 9)
    while nonzero and num == 0:
        num = rng.randint(-9, 9)
    return Fraction(num, rng.randint(1, 9))


def scalar(rng, nonzero=False) -> ExactScalar:
    while True:
        s = ExactScalar(fraction(rng), fraction(rng))
        if not nonzero or not s.is_zero:
            return s


def x_state(rng) -> XState:
    return XState(scalar(rng), scalar(rng))


def y_state(rng) -> YState:
    return YState(scalar(rng), scalar(rng))


def x_params(rng) -> XParams:
    return XParams(scalar(rng, nonzero=True), scalar(rng, nonzero=True))


def y_params(rng) -> YParams:
    return YParams(scalar(rng, nonzero=True), scalar(rng, nonzero=True), scalar(rng))


def linear_change(rng) -> LinearChange:
    while True:
        entries = [scalar(rng) for _ in range(4)]
        det = entries[0] * entries[3] - entries[1] * entries[2]
        if not det.is_zero:
            return LinearChange(*entries)


small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9))
exact_scalars = st.builds(ExactScalar, small_fractions, small_fractions)
nonzero_exact_scalars = exact_scalars.filter(lambda s: not s.is_zero)
exact_x_states = st.builds(XState, exact_scalars, exact_scalars)
exact_y_states = st.builds(YState, exact_scalars, exact_scalars)
exact_x_params = st.builds(XParams, nonzero_exact_scalars, nonzero_exact_scalars)
exact_y_params = st.builds(YParams, nonzero_exact_scalars, nonzero_exact_scalars, exact_scalars)
