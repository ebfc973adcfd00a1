"""Seeded randomized verification campaigns on the exact backend.

Every invariant the library promises is checked here against brute force:
closed forms against step-by-step iteration, factored discriminants against
their unfactored squares, conjugated orbits against explicitly transformed
ones, shifted orbits against shifted unshifted ones.  All checks are
bit-exact; there are no tolerances anywhere in this module.

Instances are drawn reproducibly: every rational component has its numerator
uniform in [-9, 9] and its denominator uniform in [1, 9], redrawing when a
quantity must be nonzero (alpha, beta, determinants).  A fixed seed gives a
byte-identical report, and the first failing instance of each invariant is
serialized in full so it can be replayed anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import yaml

from .numerics import ExactScalar
from .xsystem import (
    NotAPerfectSquareError,
    RootPair,
    XParams,
    XState,
    delta,
    delta_squared,
    identity_residual,
    vieta,
    x_orbit_closed,
    x_orbit_iterated,
    x_step,
)
from .ysystem import YParams, YState, y_closed_state, y_orbit_iterated, y_step
from .zsystem import (
    LinearChange,
    ShiftSequence,
    WState,
    ZState,
    conjugate_params,
    w_orbit_iterated,
    x_to_z,
    z_orbit_closed,
    z_orbit_iterated,
    z_step,
    z_to_x,
)
from . import numerics
from .numerics import geometric_sum, pow_tower


def _fraction(rng, nonzero=False) -> Fraction:
    num = rng.randint(-9, 9)
    while nonzero and num == 0:
        num = rng.randint(-9, 9)
    return Fraction(num, rng.randint(1, 9))


def _scalar(rng) -> ExactScalar:
    return ExactScalar(_fraction(rng), _fraction(rng))


def _nonzero_scalar(rng) -> ExactScalar:
    while True:
        s = _scalar(rng)
        if not s.is_zero:
            return s


def _x_state(rng) -> XState:
    return XState(_scalar(rng), _scalar(rng))


def _change(rng) -> LinearChange:
    while True:
        entries = [_scalar(rng) for _ in range(4)]
        d = entries[0] * entries[3] - entries[1] * entries[2]
        if not d.is_zero:
            return LinearChange(*entries)


# -- individual invariants ---------------------------------------------------
# Each check draws its own instance, returns (ok, instance) with the instance
# fully serialized for replay.


def _check_pow_tower(rng, ell_max):
    b = _scalar(rng)
    ell = rng.randint(0, min(ell_max, 6))
    naive = ExactScalar(1)
    for _ in range(2 ** ell):
        naive = naive * b
    ok = pow_tower(b, ell) == naive
    return ok, {"base": str(b), "ell": ell}


def _check_geometric_closed_form(rng, ell_max):
    r = _scalar(rng)
    if r == ExactScalar(1):
        r = r + 1
    ell = rng.randint(0, 30)
    ok = geometric_sum(r, ell) * (r - 1) + 1 == r ** ell
    return ok, {"ratio": str(r), "ell": ell}


def _check_geometric_recurrence(rng, ell_max):
    r = ExactScalar(1) if rng.random() < 0.2 else _scalar(rng)
    ell = rng.randint(0, 30)
    ok = geometric_sum(r, ell + 1) == geometric_sum(r, ell) * r + 1
    return ok, {"ratio": str(r), "ell": ell}


def _draw_y_instance(rng, trial):
    alpha = _nonzero_scalar(rng)
    if trial % 5 == 0:
        beta = alpha
    elif trial % 5 == 2:
        beta = -alpha
    else:
        beta = _nonzero_scalar(rng)
    gamma = _scalar(rng)
    s0 = YState(_scalar(rng), _scalar(rng))
    return YParams(alpha, beta, gamma), s0


def _check_y_closed(rng, ell_max, trial=0):
    p, s0 = _draw_y_instance(rng, trial)
    iterated = y_orbit_iterated(p, s0, ell_max)
    ok = all(
        y_closed_state(p, s0, ell) == iterated[ell] for ell in range(ell_max + 1)
    )
    return ok, _y_instance_mapping(p, s0, ell_max)


def _y_instance_mapping(p, s0, ell):
    return {
        "alpha": str(p.alpha),
        "beta": str(p.beta),
        "gamma": str(p.gamma),
        "y1_0": str(s0.y1),
        "y2_0": str(s0.y2),
        "ell": ell,
    }


def _check_y_semigroup(rng, ell_max):
    p, s0 = _draw_y_instance(rng, rng.randint(0, 4))
    total = min(ell_max, 8)
    ell1 = rng.randint(0, total)
    ell2 = total - ell1
    direct = y_closed_state(p, s0, ell1 + ell2)
    relayed = y_closed_state(p, y_closed_state(p, s0, ell1), ell2)
    ok = direct == relayed
    mapping = _y_instance_mapping(p, s0, total)
    mapping.update({"ell1": ell1, "ell2": ell2})
    return ok, mapping


def _draw_x_instance(rng):
    return XParams(_nonzero_scalar(rng), _nonzero_scalar(rng)), _x_state(rng)


def _x_instance_mapping(p, s0, ell):
    return {
        "alpha": str(p.alpha),
        "beta": str(p.beta),
        "x1_0": str(s0.x1),
        "x2_0": str(s0.x2),
        "ell": ell,
    }


def _check_conjugacy(rng, ell_max):
    p, s0 = _draw_x_instance(rng)
    yp = p.to_y_params()
    xs = x_orbit_iterated(p, s0, ell_max)
    ys = y_orbit_iterated(yp, vieta(s0), ell_max)
    ok = all(vieta(x) == y for x, y in zip(xs, ys))
    return ok, _x_instance_mapping(p, s0, ell_max)


def _check_identity_residual(rng, ell_max):
    p, s0 = _draw_x_instance(rng)
    xs = x_orbit_iterated(p, s0, ell_max)
    zero = ExactScalar(0)
    ok = True
    for s, nxt in zip(xs, xs[1:]):
        r1, r2 = identity_residual(s, nxt, vieta(s), vieta(nxt))
        if r1 != zero or r2 != zero:
            ok = False
            break
    return ok, _x_instance_mapping(p, s0, ell_max)


def _check_delta(rng, ell_max):
    p = XParams(_scalar(rng), _scalar(rng))
    s = _x_state(rng)
    d = delta(p, s)
    ok = d * d == delta_squared(p, s)
    return ok, _x_instance_mapping(p, s, 0)


def _check_swap_covariance(rng, ell_max):
    p, s = _draw_x_instance(rng)
    stepped = x_step(p, s)
    swapped = x_step(p, s.swapped())
    ok = swapped == XState(stepped.x2, stepped.x1)
    return ok, _x_instance_mapping(p, s, 1)


def _check_x_closed_orbit(rng, ell_max):
    p, s0 = _draw_x_instance(rng)
    ell = rng.randint(0, ell_max)
    final = x_orbit_iterated(p, s0, ell)[-1]
    try:
        roots = x_orbit_closed(p, s0, ell)
        ok = roots == RootPair(final.x1, final.x2)
    except NotAPerfectSquareError:
        # No Gaussian-rational root pair; the symmetric functions must still
        # agree exactly.
        yp = p.to_y_params()
        ok = vieta(final) == y_closed_state(yp, vieta(s0), ell)
    return ok, _x_instance_mapping(p, s0, ell)


def _draw_z_instance(rng):
    alpha = _nonzero_scalar(rng)
    beta = _nonzero_scalar(rng)
    change = _change(rng)
    return conjugate_params(change, alpha, beta)


def _z_instance_mapping(p, state, ell):
    prov = p.provenance
    a = prov.change
    return {
        "alpha": str(prov.alpha),
        "beta": str(prov.beta),
        "change": [[str(a.a11), str(a.a12)], [str(a.a21), str(a.a22)]],
        "state": [str(c) for c in state.components],
        "ell": ell,
    }


def _check_z_pointwise(rng, ell_max):
    p = _draw_z_instance(rng)
    x = _x_state(rng)
    prov = p.provenance
    xp = XParams(prov.alpha, prov.beta)
    z_next = z_step(p, x_to_z(prov.change, x))
    ok = z_to_x(prov.change, z_next) == x_step(xp, x)
    return ok, _z_instance_mapping(p, x_to_z(prov.change, x), 1)


def _check_z_orbit(rng, ell_max):
    p = _draw_z_instance(rng)
    x0 = _x_state(rng)
    prov = p.provenance
    xp = XParams(prov.alpha, prov.beta)
    zs = z_orbit_iterated(p, x_to_z(prov.change, x0), ell_max)
    xs = x_orbit_iterated(xp, x0, ell_max)
    ok = all(z == x_to_z(prov.change, x) for z, x in zip(zs, xs))
    return ok, _z_instance_mapping(p, zs[0], ell_max)


def _check_z_closed_orbit(rng, ell_max):
    p = _draw_z_instance(rng)
    z0 = ZState(_scalar(rng), _scalar(rng))
    ell = rng.randint(0, ell_max)
    final = z_orbit_iterated(p, z0, ell)[-1]
    prov = p.provenance
    try:
        ok = final in z_orbit_closed(p, z0, ell)
    except NotAPerfectSquareError:
        yp = XParams(prov.alpha, prov.beta).to_y_params()
        y_ell = y_closed_state(yp, vieta(z_to_x(prov.change, z0)), ell)
        ok = vieta(z_to_x(prov.change, final)) == y_ell
    return ok, _z_instance_mapping(p, z0, ell)


def _check_w_shift(rng, ell_max):
    p = _draw_z_instance(rng)
    table = [(_scalar(rng), _scalar(rng)) for _ in range(ell_max + 1)]
    shift = ShiftSequence.from_table(table)
    z0 = ZState(_scalar(rng), _scalar(rng))
    horizon = ell_max - 1  # the last step reads the shift one past the horizon
    zs = z_orbit_iterated(p, z0, horizon)
    w0 = WState(z0.z1 - table[0][0], z0.z2 - table[0][1])
    ws = w_orbit_iterated(p, shift, w0, horizon)
    ok = all(
        w == WState(z.z1 - table[ell][0], z.z2 - table[ell][1])
        for ell, (w, z) in enumerate(zip(ws, zs))
    )
    mapping = _z_instance_mapping(p, z0, horizon)
    mapping["shift_table"] = [[str(f1), str(f2)] for f1, f2 in table]
    return ok, mapping


def _check_w_zero_shift(rng, ell_max):
    p = _draw_z_instance(rng)
    zero = ExactScalar(0)
    shift = ShiftSequence.affine((zero, zero), (zero, zero))
    z0 = ZState(_scalar(rng), _scalar(rng))
    zs = z_orbit_iterated(p, z0, ell_max)
    ws = w_orbit_iterated(p, shift, WState(z0.z1, z0.z2), ell_max)
    ok = all(w.components == z.components for w, z in zip(ws, zs))
    return ok, _z_instance_mapping(p, z0, ell_max)


_INVARIANTS: list[tuple[str, Callable]] = [
    ("pow-tower-naive-product", _check_pow_tower),
    ("geometric-sum-closed-form", _check_geometric_closed_form),
    ("geometric-sum-recurrence", _check_geometric_recurrence),
    ("y-closed-equals-iterated", _check_y_closed),
    ("y-semigroup", _check_y_semigroup),
    ("x-y-conjugacy", _check_conjugacy),
    ("x-identity-residual", _check_identity_residual),
    ("x-delta-consistency", _check_delta),
    ("x-swap-covariance", _check_swap_covariance),
    ("x-closed-orbit-roots", _check_x_closed_orbit),
    ("z-conjugation-pointwise", _check_z_pointwise),
    ("z-orbit-conjugacy", _check_z_orbit),
    ("z-closed-orbit", _check_z_closed_orbit),
    ("w-shift-consistency", _check_w_shift),
    ("w-zero-shift", _check_w_zero_shift),
]


@dataclass
class InvariantResult:
    name: str
    passed: int
    failed: int
    first_failure: Optional[dict] = None
    first_failure_trial: Optional[int] = None


@dataclass
class CampaignReport:
    seed: int
    trials: int
    ell_max: int
    results: list

    @property
    def all_passed(self) -> bool:
        return all(r.failed == 0 for r in self.results)

    def to_text(self) -> str:
        width = max(len(r.name) for r in self.results)
        lines = [
            f"campaign seed={self.seed} trials={self.trials} ell-max={self.ell_max}",
            f"{'invariant'.ljust(width)}  pass  fail",
        ]
        for r in self.results:
            lines.append(f"{r.name.ljust(width)}  {r.passed:4d}  {r.failed:4d}")
        lines.append(
            "all invariants passed" if self.all_passed else "INVARIANT FAILURES DETECTED"
        )
        for r in self.results:
            if r.first_failure is not None:
                lines.append("")
                lines.append(f"first failure of {r.name} (trial {r.first_failure_trial}):")
                block = yaml.safe_dump(r.first_failure, sort_keys=True).rstrip("\n")
                lines.extend("  " + line for line in block.split("\n"))
        return "\n".join(lines) + "\n"


def campaign(seed: int, trials: int, ell_max: int = 6) -> CampaignReport:
    """Run every invariant `trials` times and report pass/fail counts.

    Property failures are report content, never exceptions; only invalid
    arguments raise.  Fixed arguments give a byte-identical report.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if ell_max < 1:
        raise ValueError("ell_max must be at least 1")
    results = []
    for name, check in _INVARIANTS:
        rng = random.Random(f"{seed}:{name}")
        result = InvariantResult(name=name, passed=0, failed=0)
        for trial in range(trials):
            if check is _check_y_closed:
                ok, instance = check(rng, ell_max, trial)
            else:
                ok, instance = check(rng, ell_max)
            if ok:
                result.passed += 1
            else:
                result.failed += 1
                if result.first_failure is None:
                    result.first_failure = instance
                    result.first_failure_trial = trial
        results.append(result)
    return CampaignReport(seed=seed, trials=trials, ell_max=ell_max, results=results)
