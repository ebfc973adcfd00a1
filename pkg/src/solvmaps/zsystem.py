"""The conjugated six-parameter system and its time-dependent-shift extension.

An invertible linear change of variables z = A.x turns the zeros recursion
into the general quadratic map

    z_n' = a[n][1]*z1**2 + a[n][2]*z2**2 + a[n][3]*z1*z2,    n = 1, 2,

whose six coefficients are explicit degree-two expressions in the entries of
A (weighted by det(A)**-2) and the underlying (alpha, beta).  Parameters
built that way keep their provenance, because recovering (A, alpha, beta)
from six arbitrary coefficients is out of scope here: closed-form solving is
available exactly when the provenance is present, iteration always.

Shifting the dependent variables by an assigned sequence f(ell) produces the
inhomogeneous system on w = z - f, with time-dependent linear coefficients
g and inhomogeneity h read off by substituting z = w + f into the quadratic
map.  Shift sequences are finite tables or affine/geometric rules; querying
past the end of a table is an error, not an extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .numerics import (
    DomainError,
    Scalar,
    check_time_index,
    int_like,
    lexkey,
    require_same_backend,
)
from .xsystem import RootPair, XParams, XState, x_coefficients, x_orbit_closed


class ShiftExhaustedError(IndexError):
    """A finite shift table was queried past its last entry."""


@dataclass(frozen=True)
class LinearChange:
    """An invertible 2x2 change of variables z = A.x."""

    a11: Scalar
    a12: Scalar
    a21: Scalar
    a22: Scalar

    def __post_init__(self):
        require_same_backend(self.a11, self.a12, self.a21, self.a22)
        if self.det.is_zero:
            raise DomainError("change of variables must be invertible (determinant is zero)")

    @property
    def det(self) -> Scalar:
        return self.a11 * self.a22 - self.a12 * self.a21


@dataclass(frozen=True)
class ZState:
    z1: Scalar
    z2: Scalar

    def __post_init__(self):
        require_same_backend(self.z1, self.z2)

    @property
    def components(self):
        return (self.z1, self.z2)


@dataclass(frozen=True)
class WState:
    w1: Scalar
    w2: Scalar

    def __post_init__(self):
        require_same_backend(self.w1, self.w2)

    @property
    def components(self):
        return (self.w1, self.w2)


@dataclass(frozen=True)
class Provenance:
    """The generating data of conjugated parameters."""

    alpha: Scalar
    beta: Scalar
    change: LinearChange


@dataclass(frozen=True)
class ZParams:
    """Six quadratic-map coefficients, one row (a_n1, a_n2, a_n3) per component.

    provenance records the (alpha, beta, A) the coefficients were derived
    from, when they were; user-supplied raw coefficients have none and only
    support iteration.
    """

    rows: tuple
    provenance: Optional[Provenance] = None

    @classmethod
    def from_rows(cls, rows) -> "ZParams":
        rows = tuple(tuple(row) for row in rows)
        if len(rows) != 2 or any(len(row) != 3 for row in rows):
            raise ValueError("coefficient table must be 2 rows of 3 scalars")
        require_same_backend(*[c for row in rows for c in row])
        return cls(rows)

    def coeff(self, n: int, j: int) -> Scalar:
        """a[n][j], both indices 1-based."""
        return self.rows[n - 1][j - 1]


class StatePair:
    """An unordered pair of states with multiset equality and membership."""

    __slots__ = ("items",)

    def __init__(self, first, second):
        object.__setattr__(self, "items", (first, second))

    def __setattr__(self, name, value):
        raise AttributeError("StatePair is immutable")

    def __contains__(self, state):
        return state == self.items[0] or state == self.items[1]

    def __eq__(self, other):
        if isinstance(other, StatePair):
            a, b = self.items
            c, d = other.items
            return (a == c and b == d) or (a == d and b == c)
        return NotImplemented

    def __iter__(self):
        return iter(self.items)

    def sorted_items(self):
        return tuple(sorted(self.items, key=lambda s: tuple(lexkey(c) for c in s.components)))

    def __repr__(self):
        return f"StatePair({self.items[0]!r}, {self.items[1]!r})"


def conjugate_params(change: LinearChange, alpha: Scalar, beta: Scalar) -> ZParams:
    """Coefficients of the conjugated map z -> A.step(A**-1 z), with provenance.

    Expanding that composition gives, per component n, weights of z1**2,
    z2**2 and z1*z2 that are det**-2 times quadratic combinations of the A
    entries against the zeros-side coefficient rows.
    """
    xc = x_coefficients(XParams(alpha, beta))
    d_inv_sq = change.det ** -2
    a = change
    rows = []
    for n in (1, 2):
        an1, an2 = (a.a11, a.a12) if n == 1 else (a.a21, a.a22)
        # Mixes of the two zeros-side rows, one per monomial coefficient.
        b1 = an1 * xc.coeff(1, 1) + an2 * xc.coeff(2, 1)
        b2 = an1 * xc.coeff(1, 2) + an2 * xc.coeff(2, 2)
        b3 = an1 * xc.coeff(1, 3) + an2 * xc.coeff(2, 3)
        rows.append(
            (
                d_inv_sq * (a.a22 * a.a22 * b1 + a.a21 * a.a21 * b2 - a.a22 * a.a21 * b3),
                d_inv_sq * (a.a12 * a.a12 * b1 + a.a11 * a.a11 * b2 - a.a11 * a.a12 * b3),
                d_inv_sq
                * (
                    -2 * a.a12 * a.a22 * b1
                    - 2 * a.a21 * a.a11 * b2
                    + (a.a11 * a.a22 + a.a12 * a.a21) * b3
                ),
            )
        )
    return ZParams(tuple(rows), Provenance(alpha, beta, change))


def _apply_row(row, u: Scalar, v: Scalar) -> Scalar:
    a1, a2, a3 = row
    return a1 * u * u + a2 * v * v + a3 * u * v


def z_step(p: ZParams, s: ZState) -> ZState:
    """One step of the six-parameter quadratic map."""
    return ZState(
        _apply_row(p.rows[0], s.z1, s.z2),
        _apply_row(p.rows[1], s.z1, s.z2),
    )


def z_orbit_iterated(p: ZParams, s0: ZState, horizon: int) -> list[ZState]:
    check_time_index(horizon)
    states = [s0]
    for _ in range(horizon):
        states.append(z_step(p, states[-1]))
    return states


def x_to_z(change: LinearChange, s: XState) -> ZState:
    return ZState(
        change.a11 * s.x1 + change.a12 * s.x2,
        change.a21 * s.x1 + change.a22 * s.x2,
    )


def z_to_x(change: LinearChange, s: ZState) -> XState:
    d = change.det
    return XState(
        (change.a22 * s.z1 - change.a12 * s.z2) / d,
        (-change.a21 * s.z1 + change.a11 * s.z2) / d,
    )


def z_orbit_closed(p: ZParams, s0: ZState, ell: int) -> StatePair:
    """The closed-form image multiset at time ell.

    Pulls s0 back to zeros coordinates, evaluates the closed zeros orbit, and
    pushes the unordered root pair forward through A under both labelings.
    The iterated state at time ell is always a member of the returned pair.
    Requires provenance; raw coefficient tables only support iteration.
    """
    check_time_index(ell)
    if p.provenance is None:
        raise DomainError(
            "closed-form solving needs parameters with provenance "
            "(built by conjugate_params); raw coefficients support iteration only"
        )
    prov = p.provenance
    x0 = z_to_x(prov.change, s0)
    roots = x_orbit_closed(XParams(prov.alpha, prov.beta), x0, ell)
    r, s = roots.items
    return StatePair(
        x_to_z(prov.change, XState(r, s)),
        x_to_z(prov.change, XState(s, r)),
    )


class ShiftSequence:
    """The assigned shift f(ell) = (f1, f2): a finite table or a closed rule.

    Rules keep runs reproducible and serializable; arbitrary callables are
    deliberately not accepted at this boundary.
    """

    __slots__ = ("kind", "data")

    def __init__(self, kind: str, data: tuple):
        if kind not in ("table", "affine", "geometric"):
            raise ValueError(f"unknown shift kind {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("ShiftSequence is immutable")

    @classmethod
    def from_table(cls, pairs) -> "ShiftSequence":
        table = tuple((f1, f2) for f1, f2 in pairs)
        if not table:
            raise ValueError("shift table must have at least one entry")
        require_same_backend(*[c for pair in table for c in pair])
        return cls("table", table)

    @classmethod
    def affine(cls, start, increment) -> "ShiftSequence":
        """f_n(ell) = start_n + increment_n * ell."""
        require_same_backend(*start, *increment)
        return cls("affine", (tuple(start), tuple(increment)))

    @classmethod
    def geometric(cls, start, ratio) -> "ShiftSequence":
        """f_n(ell) = start_n * ratio_n**ell."""
        require_same_backend(*start, *ratio)
        return cls("geometric", (tuple(start), tuple(ratio)))

    @property
    def table_length(self) -> Optional[int]:
        return len(self.data) if self.kind == "table" else None

    def at(self, ell: int):
        check_time_index(ell)
        if self.kind == "table":
            if ell >= len(self.data):
                raise ShiftExhaustedError(
                    f"shift table of length {len(self.data)} has no entry for time {ell} "
                    f"(one extra entry past the horizon is needed for the inhomogeneity)"
                )
            return self.data[ell]
        start, second = self.data
        if self.kind == "affine":
            return tuple(c0 + d * int_like(ell, c0) for c0, d in zip(start, second))
        return tuple(c0 * r ** ell for c0, r in zip(start, second))

    def __eq__(self, other):
        if isinstance(other, ShiftSequence):
            return self.kind == other.kind and self.data == other.data
        return NotImplemented

    def __repr__(self):
        return f"ShiftSequence({self.kind!r}, ...)"


@dataclass(frozen=True)
class WCoefficients:
    """Time-dependent coefficients of the shifted system at one time index:
    linear weights g[n][1], g[n][2] and inhomogeneity h[n], rows indexed by n."""

    g: tuple
    h: tuple

    def g_coeff(self, n: int, j: int) -> Scalar:
        return self.g[n - 1][j - 1]

    def h_coeff(self, n: int) -> Scalar:
        return self.h[n - 1]


def w_coefficients(p: ZParams, f: ShiftSequence, ell: int) -> WCoefficients:
    """Coefficients of the shifted step at time ell.

    Substituting z = w + f into the quadratic map gives
        g[n][1] = 2*a[n][1]*f1 + a[n][3]*f2
        g[n][2] = 2*a[n][2]*f2 + a[n][3]*f1
        h[n]    = a[n][1]*f1**2 + a[n][2]*f2**2 + a[n][3]*f1*f2 - f_n(ell+1),
    so the inhomogeneity needs the shift one step past ell.
    """
    check_time_index(ell)
    f1, f2 = f.at(ell)
    f_next = f.at(ell + 1)
    g_rows = []
    h_entries = []
    for n in (1, 2):
        a1, a2, a3 = p.rows[n - 1]
        g_rows.append((2 * a1 * f1 + a3 * f2, 2 * a2 * f2 + a3 * f1))
        h_entries.append(a1 * f1 * f1 + a2 * f2 * f2 + a3 * f1 * f2 - f_next[n - 1])
    return WCoefficients(tuple(g_rows), tuple(h_entries))


def w_step(p: ZParams, f: ShiftSequence, ell: int, s: WState) -> WState:
    """One step of the shifted system at time ell.

    Tracks w(ell) = z(ell) - f(ell) whenever z evolves by z_step from
    z(0) = w(0) + f(0).
    """
    coeffs = w_coefficients(p, f, ell)
    out = []
    for n in (1, 2):
        quad = _apply_row(p.rows[n - 1], s.w1, s.w2)
        g1, g2 = coeffs.g[n - 1]
        out.append(quad + g1 * s.w1 + g2 * s.w2 + coeffs.h[n - 1])
    return WState(out[0], out[1])


def w_orbit_iterated(p: ZParams, f: ShiftSequence, s0: WState, horizon: int) -> list[WState]:
    check_time_index(horizon)
    states = [s0]
    for ell in range(horizon):
        states.append(w_step(p, f, ell, states[-1]))
    return states
