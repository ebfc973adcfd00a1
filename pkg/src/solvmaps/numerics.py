"""Backend-tagged complex scalars and the two kernels used by the closed forms.

Two interchangeable scalar backends share one arithmetic interface:

* exact -- Gaussian rationals.  Real and imaginary parts are
  `fractions.Fraction`, so add/sub/mul/div and integer powers are closed and
  bit-exact; no rounding ever happens.
* float -- arbitrary-precision complex floats on top of mpmath.  Every value
  carries its working precision in bits; binary operations round to the
  smaller precision of the two operands.

Mixing backends in one operation raises `BackendMismatchError`.  Converting
exact -> float is explicit and total (`ExactScalar.to_float`); there is no
conversion in the other direction.

Exact results can grow doubly exponentially (squaring recursions), so exact
arithmetic is guarded by a configurable decimal-digit budget; exceeding it
raises `DigitBudgetExceededError` instead of silently grinding to a halt.

The two kernels:

* `pow_tower(b, ell)`  -> b**(2**ell), by `ell` successive squarings, never
  materializing the exponent.
* `geometric_sum(r, ell)` -> sum of r**s for s = 0..ell-1, with the ratio-one
  degeneracy returning ell (the limit of (r**ell - 1)/(r - 1)) and the empty
  sum at ell = 0 returning 0.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from fractions import Fraction
from typing import Union

from mpmath import mpc, mpf, workprec


class BackendMismatchError(TypeError):
    """Raised when an operation mixes exact and float scalars."""


class DigitBudgetExceededError(OverflowError):
    """Raised when an exact result outgrows the decimal-digit budget."""


class DomainError(ValueError):
    """Raised when an input is outside the mathematical domain of an operation."""


DEFAULT_PRECISION = 53
DEFAULT_DIGIT_BUDGET = 10**6

# Factor k in the float-backend ratio-one test |r - 1| <= k * eps * |r|,
# where eps = 2**(1 - precision).
RATIO_ONE_EPS_FACTOR = 8

_BITS_PER_DECIMAL_DIGIT = math.log2(10)

_digit_budget = DEFAULT_DIGIT_BUDGET
_budget_bits = int(DEFAULT_DIGIT_BUDGET * _BITS_PER_DECIMAL_DIGIT) + 1


def set_digit_budget(digits: int) -> None:
    """Set the global decimal-digit budget for exact arithmetic results."""
    global _digit_budget, _budget_bits
    if digits < 1:
        raise ValueError("digit budget must be a positive integer")
    _digit_budget = int(digits)
    _budget_bits = int(digits * _BITS_PER_DECIMAL_DIGIT) + 1


def get_digit_budget() -> int:
    return _digit_budget


@contextmanager
def digit_budget(digits: int):
    """Temporarily override the digit budget (restores the old value on exit)."""
    old = _digit_budget
    set_digit_budget(digits)
    try:
        yield
    finally:
        set_digit_budget(old)


def _guard(re_part: Fraction, im_part: Fraction) -> None:
    bits = max(
        re_part.numerator.bit_length(),
        re_part.denominator.bit_length(),
        im_part.numerator.bit_length(),
        im_part.denominator.bit_length(),
    )
    if bits > _budget_bits:
        raise DigitBudgetExceededError(
            f"exact result needs about {int(bits / _BITS_PER_DECIMAL_DIGIT)} decimal digits, "
            f"over the budget of {_digit_budget}; raise it with set_digit_budget() "
            f"or the --digit-budget flag"
        )


class ExactScalar:
    """A Gaussian rational: complex number with Fraction real and imaginary parts.

    Immutable.  All arithmetic is exact; equality and hashing are value-based.
    """

    __slots__ = ("re", "im")
    backend = "exact"

    def __init__(self, re_part=0, im_part=0):
        object.__setattr__(self, "re", Fraction(re_part))
        object.__setattr__(self, "im", Fraction(im_part))

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def _make(cls, re_part: Fraction, im_part: Fraction) -> "ExactScalar":
        _guard(re_part, im_part)
        out = object.__new__(cls)
        object.__setattr__(out, "re", re_part)
        object.__setattr__(out, "im", im_part)
        return out

    def _coerce(self, other):
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other)
        if isinstance(other, FloatScalar):
            raise BackendMismatchError(
                "cannot mix exact and float scalars; convert explicitly with to_float()"
            )
        return None

    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExactScalar._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExactScalar._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExactScalar._make(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division of exact scalar by zero")
        return ExactScalar._make(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return ExactScalar._make(-self.re, -self.im)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            if self.is_zero:
                raise ZeroDivisionError("zero has no negative powers")
            return (ExactScalar(1) / self) ** (-exponent)
        # 0**0 = 1 by the empty-product convention the closed forms rely on.
        result = ExactScalar(1)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, ExactScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def to_float(self, precision: int = DEFAULT_PRECISION) -> "FloatScalar":
        """Round this Gaussian rational to a float scalar of the given precision."""
        with workprec(precision):
            re_f = mpf(self.re.numerator) / mpf(self.re.denominator)
            im_f = mpf(self.im.numerator) / mpf(self.im.denominator)
            return FloatScalar(mpc(re_f, im_f), precision)

    def serialize(self) -> str:
        sign = "-" if self.im < 0 else "+"
        return (
            f"{self.re.numerator}/{self.re.denominator}"
            f"{sign}{abs(self.im.numerator)}/{self.im.denominator}i"
        )

    def __str__(self):
        return self.serialize()

    def __repr__(self):
        return f"ExactScalar({self.re!r}, {self.im!r})"


class FloatScalar:
    """A complex floating value with an explicit binary precision.

    Arithmetic between two float scalars rounds to the smaller of the two
    precisions.  Equality compares values only, not precision.
    """

    __slots__ = ("value", "prec")
    backend = "float"

    def __init__(self, value=0, prec: int = DEFAULT_PRECISION):
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        with workprec(prec):
            object.__setattr__(self, "value", mpc(value))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("FloatScalar is immutable")

    @classmethod
    def _make(cls, value: mpc, prec: int) -> "FloatScalar":
        out = object.__new__(cls)
        object.__setattr__(out, "value", value)
        object.__setattr__(out, "prec", prec)
        return out

    def _coerce(self, other):
        if isinstance(other, FloatScalar):
            return other
        if isinstance(other, (int, float)):
            return FloatScalar(other, self.prec)
        if isinstance(other, ExactScalar):
            raise BackendMismatchError(
                "cannot mix exact and float scalars; convert explicitly with to_float()"
            )
        return None

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def eps(self) -> mpf:
        """Unit roundoff at this scalar's precision."""
        return mpf(2) ** (1 - self.prec)

    def _binary(self, other, op):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self.prec, other.prec)
        with workprec(prec):
            return FloatScalar._make(op(self.value, other.value), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division of float scalar by zero")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        with workprec(self.prec):
            return FloatScalar._make(-self.value, self.prec)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and self.is_zero:
            raise ZeroDivisionError("zero has no negative powers")
        with workprec(self.prec):
            if exponent == 0:
                return FloatScalar._make(mpc(1), self.prec)
            return FloatScalar._make(self.value ** exponent, self.prec)

    def __eq__(self, other):
        if isinstance(other, FloatScalar):
            return self.value == other.value
        if isinstance(other, (int, float)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __abs__(self) -> mpf:
        with workprec(self.prec):
            return abs(self.value)

    def serialize(self) -> str:
        digits = int(self.prec / _BITS_PER_DECIMAL_DIGIT) + 3
        re_s = _sci(self.value.real, digits)
        im_s = _sci(abs(self.value.imag), digits)
        sign = "-" if self.value.imag < 0 else "+"
        return f"{re_s}{sign}{im_s}i"

    def __str__(self):
        return self.serialize()

    def __repr__(self):
        return f"FloatScalar({self.value!r}, prec={self.prec})"


Scalar = Union[ExactScalar, FloatScalar]


def _sci(x: mpf, digits: int) -> str:
    from mpmath import nstr

    return nstr(x, digits, min_fixed=1, max_fixed=0)


def exact(re_part=0, im_part=0) -> ExactScalar:
    """Convenience constructor for exact scalars from ints, Fractions or strings."""
    return ExactScalar(Fraction(re_part), Fraction(im_part))


def floating(re_part=0, im_part=0, prec: int = DEFAULT_PRECISION) -> FloatScalar:
    """Convenience constructor for float scalars; accepts ints, floats,
    decimal strings and Fractions (rounded once, at the target precision)."""
    with workprec(prec):
        return FloatScalar(mpc(_to_mpf(re_part), _to_mpf(im_part)), prec)


def _to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / mpf(x.denominator)
    return mpf(x)


def zero_like(template: Scalar) -> Scalar:
    if template.backend == "exact":
        return ExactScalar(0)
    return FloatScalar(0, template.prec)


def one_like(template: Scalar) -> Scalar:
    if template.backend == "exact":
        return ExactScalar(1)
    return FloatScalar(1, template.prec)


def int_like(n: int, template: Scalar) -> Scalar:
    """The integer n as a scalar on the same backend (and precision) as template."""
    if template.backend == "exact":
        return ExactScalar(n)
    return FloatScalar(n, template.prec)


def lexkey(s: Scalar):
    """Sort key (real, imaginary) used to pick canonical orderings of unordered pairs."""
    if s.backend == "exact":
        return (s.re, s.im)
    return (s.value.real, s.value.imag)


def same_backend(*scalars: Scalar) -> bool:
    tags = {s.backend for s in scalars}
    return len(tags) <= 1


def require_same_backend(*scalars: Scalar) -> None:
    if not same_backend(*scalars):
        raise BackendMismatchError("all components must live on one backend")


def check_time_index(ell: int) -> None:
    if not isinstance(ell, int) or isinstance(ell, bool) or ell < 0:
        raise ValueError(f"discrete time index must be a non-negative integer, got {ell!r}")


def pow_tower(base: Scalar, ell: int) -> Scalar:
    """base**(2**ell) by ell successive squarings.

    The exponent is never materialized; exact growth is stopped by the digit
    budget with a DigitBudgetExceededError.
    """
    check_time_index(ell)
    acc = base
    for _ in range(ell):
        acc = acc * acc
    return acc


def geometric_sum(r: Scalar, ell: int) -> Scalar:
    """Sum of r**s for s = 0 .. ell-1.

    Returns 0 for ell = 0 (empty sum).  When r equals one -- exactly on the
    exact backend, within RATIO_ONE_EPS_FACTOR units of roundoff on the float
    backend -- the degenerate limit ell is returned instead of evaluating the
    0/0 ratio form (r**ell - 1)/(r - 1).
    """
    check_time_index(ell)
    one = one_like(r)
    if _is_ratio_one(r):
        return int_like(ell, r)
    return (r ** ell - one) / (r - one)


def _is_ratio_one(r: Scalar) -> bool:
    if r.backend == "exact":
        return r.re == 1 and r.im == 0
    with workprec(r.prec):
        return abs(r.value - 1) <= RATIO_ONE_EPS_FACTOR * r.eps * abs(r.value)


_UNSIGNED = r"(?:\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_SCALAR_RE = re.compile(
    rf"^(?P<re>[+-]?{_UNSIGNED})(?P<im>[+-]{_UNSIGNED})i$"
    rf"|^(?P<im_only>[+-]?{_UNSIGNED})i$"
    rf"|^(?P<re_only>[+-]?{_UNSIGNED})$"
)


def parse_scalar(text: str, backend: str = "exact", prec: int = DEFAULT_PRECISION) -> Scalar:
    """Parse a scalar from its string form.

    Accepts the canonical exact form "p/q+r/si", the float scientific form,
    and relaxed variants: a lone real part, a lone imaginary part ending in
    "i", integers, fractions, and decimal/scientific notation for either part.
    Decimal text parsed onto the exact backend is converted exactly (0.25 is
    1/4), never through binary floating point.
    """
    cleaned = text.strip().replace(" ", "")
    m = _SCALAR_RE.match(cleaned)
    if not m:
        raise ValueError(f"cannot parse scalar from {text!r}")
    if m.group("re") is not None:
        re_text, im_text = m.group("re"), m.group("im")
    elif m.group("im_only") is not None:
        re_text, im_text = "0", m.group("im_only")
    else:
        re_text, im_text = m.group("re_only"), "0"

    if backend == "exact":
        return ExactScalar(Fraction(re_text), Fraction(im_text))
    if backend == "float":
        with workprec(prec):
            return FloatScalar(mpc(_parse_mpf(re_text), _parse_mpf(im_text)), prec)
    raise ValueError(f"unknown backend {backend!r} (expected 'exact' or 'float')")


def _parse_mpf(token: str) -> mpf:
    if "/" in token:
        num, den = token.split("/")
        return mpf(num) / mpf(den)
    return mpf(token)
