"""Execute a run configuration and assemble the orbit record.

method "iterated" applies the one-step map; "closed" evaluates the
closed-form solution independently at each time index; "both" does both and
summarizes their agreement (bit-exact equality on the exact backend, a
maximum relative error against the tolerances on the float backend).

On the exact backend the closed route through root extraction can fail at a
time index whose discriminant is not a perfect square; with method "both"
those indices fall back to comparing symmetric functions (the coefficient
pair), with method "closed" the failure propagates, directing the caller to
"both" or to the float backend.
"""

from __future__ import annotations

from mpmath import workprec

from .config import RunConfig
from .numerics import DomainError, digit_budget
from .orbits import OrbitRecord
from .xsystem import (
    NotAPerfectSquareError,
    XParams,
    XState,
    identity_residual,
    vieta,
    x_orbit_iterated,
    x_step,
)
from .ysystem import YState, y_closed_state, y_orbit_iterated
from .zsystem import (
    WState,
    ZState,
    StatePair,
    x_to_z,
    z_orbit_iterated,
    z_to_x,
    w_orbit_iterated,
)


def run(config: RunConfig) -> OrbitRecord:
    """Run a validated configuration to an orbit record.

    Deterministic for a fixed configuration: no clocks, no global state
    beyond the digit budget, which is scoped to the call.
    """
    config.validate()
    with digit_budget(config.digit_budget):
        handler = {"y": _run_y, "x": _run_x, "z": _run_z, "w": _run_w}[config.system]
        return handler(config)


def _want(config, which):
    return config.method in (which, "both")


def _run_y(config: RunConfig) -> OrbitRecord:
    p, s0, horizon = config.params, config.initial_state, config.horizon
    states = closed = None
    if _want(config, "iterated"):
        states = y_orbit_iterated(p, s0, horizon)
    if _want(config, "closed"):
        closed = [(y_closed_state(p, s0, ell),) for ell in range(horizon + 1)]
    summary = None
    if config.method == "both":
        if config.backend == "exact":
            summary = {
                "exact_equal": all(s == entry[0] for s, entry in zip(states, closed))
            }
        else:
            errs = [_state_error(entry[0], s) for s, entry in zip(states, closed)]
            summary = _float_summary(errs, config)
    if config.method == "closed":
        # The coefficient-system closed form stays labeled, so it doubles as
        # the state sequence.
        states = [entry[0] for entry in closed]
        closed = None
    return OrbitRecord(
        system="y",
        backend=config.backend,
        method=config.method,
        horizon=horizon,
        states=states,
        closed_states=closed,
        summary=summary,
    )


def _run_x(config: RunConfig) -> OrbitRecord:
    p, s0, horizon = config.params, config.initial_state, config.horizon
    states = closed = residuals = None
    if _want(config, "iterated"):
        states = x_orbit_iterated(p, s0, horizon)
        residuals = _x_residuals(states)
    failures = 0
    y_closed_values = None
    if _want(config, "closed"):
        yp = p.to_y_params()
        y0 = vieta(s0)
        closed = []
        y_closed_values = []
        for ell in range(horizon + 1):
            y_ell = y_closed_state(yp, y0, ell)
            y_closed_values.append(y_ell)
            try:
                roots = _roots_state(p, s0, ell)
                closed.append((XState(*roots),))
            except NotAPerfectSquareError:
                if config.method == "closed":
                    raise
                failures += 1
                closed.append(None)
    summary = None
    if config.method == "both":
        summary = _pair_summary(
            config,
            states,
            closed,
            y_closed_values,
            to_coefficients=vieta,
        )
        if failures:
            summary["root_extraction_failures"] = failures
    if config.method == "closed":
        states = [entry[0] for entry in closed]
        closed = None
        residuals = None
    return OrbitRecord(
        system="x",
        backend=config.backend,
        method=config.method,
        horizon=horizon,
        states=states,
        closed_states=closed,
        residuals=residuals,
        summary=summary,
    )


def _roots_state(p: XParams, s0: XState, ell: int):
    from .xsystem import x_orbit_closed

    roots = x_orbit_closed(p, s0, ell)
    return roots.sorted_items()


def _x_residuals(states):
    residuals = []
    coeffs = [vieta(s) for s in states]
    for s, nxt, y, y_next in zip(states, states[1:], coeffs, coeffs[1:]):
        residuals.append(identity_residual(s, nxt, y, y_next))
    return residuals


def _run_z(config: RunConfig) -> OrbitRecord:
    p, s0, horizon = config.params, config.initial_state, config.horizon
    states = closed = residuals = None
    if _want(config, "iterated"):
        states = z_orbit_iterated(p, s0, horizon)
        if p.provenance is not None:
            residuals = _z_residuals(p, states)
    failures = 0
    y_closed_values = None
    if _want(config, "closed"):
        closed, y_closed_values, failures = _z_closed_entries(
            config, p, s0, horizon, shift=None
        )
    summary = None
    if config.method == "both":
        prov = p.provenance
        summary = _pair_summary(
            config,
            states,
            closed,
            y_closed_values,
            to_coefficients=lambda s: vieta(z_to_x(prov.change, s)),
        )
        if failures:
            summary["root_extraction_failures"] = failures
    if config.method == "closed":
        states = None
        residuals = None
    return OrbitRecord(
        system="z",
        backend=config.backend,
        method=config.method,
        horizon=horizon,
        states=states,
        closed_states=closed,
        residuals=residuals,
        summary=summary,
    )


def _z_residuals(p, states):
    xs = [z_to_x(p.provenance.change, s) for s in states]
    residuals = []
    coeffs = [vieta(x) for x in xs]
    for x, nxt, y, y_next in zip(xs, xs[1:], coeffs, coeffs[1:]):
        residuals.append(identity_residual(x, nxt, y, y_next))
    return residuals


def _z_closed_entries(config, p, s0, horizon, shift):
    """Closed-form candidate states per time index for z (shift None) or w."""
    prov = p.provenance
    if prov is None:
        raise DomainError(
            "closed-form solving needs parameters with provenance "
            "(alpha, beta, change); raw coefficients support iteration only"
        )
    xp = XParams(prov.alpha, prov.beta)
    if shift is None:
        z0 = s0
    else:
        f0 = shift.at(0)
        z0 = ZState(s0.w1 + f0[0], s0.w2 + f0[1])
    x0 = z_to_x(prov.change, z0)
    y0 = vieta(x0)
    yp = xp.to_y_params()
    entries = []
    y_values = []
    failures = 0
    for ell in range(horizon + 1):
        y_ell = y_closed_state(yp, y0, ell)
        y_values.append(y_ell)
        try:
            from .xsystem import roots_of_monic_quadratic

            roots = roots_of_monic_quadratic(y_ell)
        except NotAPerfectSquareError:
            if config.method == "closed":
                raise
            failures += 1
            entries.append(None)
            continue
        r, s = roots.items
        candidates = StatePair(
            x_to_z(prov.change, XState(r, s)),
            x_to_z(prov.change, XState(s, r)),
        )
        if shift is not None:
            f_ell = shift.at(ell)
            candidates = StatePair(
                *(WState(c.z1 - f_ell[0], c.z2 - f_ell[1]) for c in candidates)
            )
        entries.append(candidates.sorted_items())
    return entries, y_values, failures


def _run_w(config: RunConfig) -> OrbitRecord:
    p, s0, horizon = config.params, config.initial_state, config.horizon
    shift = config.shift
    states = closed = None
    if _want(config, "iterated"):
        states = w_orbit_iterated(p, shift, s0, horizon)
    failures = 0
    y_closed_values = None
    if _want(config, "closed"):
        closed, y_closed_values, failures = _z_closed_entries(
            config, p, s0, horizon, shift=shift
        )
    summary = None
    if config.method == "both":
        prov = p.provenance

        def to_coefficients(s, ell):
            f_ell = shift.at(ell)
            z = ZState(s.w1 + f_ell[0], s.w2 + f_ell[1])
            return vieta(z_to_x(prov.change, z))

        summary = _pair_summary(
            config,
            states,
            closed,
            y_closed_values,
            to_coefficients=to_coefficients,
            time_dependent=True,
        )
        if failures:
            summary["root_extraction_failures"] = failures
    if config.method == "closed":
        states = None
    return OrbitRecord(
        system="w",
        backend=config.backend,
        method=config.method,
        horizon=horizon,
        states=states,
        closed_states=closed,
        summary=summary,
    )


# -- comparison summaries ---------------------------------------------------


def _pair_summary(config, states, closed, y_closed_values, to_coefficients, time_dependent=False):
    """Compare an iterated labeled orbit against closed-form candidate entries.

    A None closed entry (failed exact root extraction) falls back to checking
    that the iterated state has the closed-form symmetric functions.
    """
    if config.backend == "exact":
        equal = True
        symmetric_ok = True
        for ell, (s, entry) in enumerate(zip(states, closed)):
            if entry is None:
                y = to_coefficients(s, ell) if time_dependent else to_coefficients(s)
                if y != y_closed_values[ell]:
                    symmetric_ok = False
                    equal = False
                continue
            if len(entry) == 1:
                ok = _multiset_state_eq(entry[0], s)
            else:
                ok = any(candidate == s for candidate in entry)
            if not ok:
                equal = False
        summary = {"exact_equal": equal}
        if any(entry is None for entry in closed):
            summary["symmetric_functions_match"] = symmetric_ok
        return summary

    errs = []
    for s, entry in zip(states, closed):
        if entry is None:
            continue
        if len(entry) == 1:
            errs.append(_multiset_error(entry[0], s))
        else:
            errs.append(min(_state_error(candidate, s) for candidate in entry))
    return _float_summary(errs, config)


def _multiset_state_eq(candidate, state) -> bool:
    a, b = candidate.components
    c, d = state.components
    return (a == c and b == d) or (a == d and b == c)


def _state_error(approx, ref):
    """Componentwise (deviation, reference magnitude) pairs, worst first."""
    pairs = [_component_error(a, r) for a, r in zip(approx.components, ref.components)]
    return max(pairs, key=_rel_key)


def _multiset_error(candidate, state):
    a, b = candidate.components
    c, d = state.components
    direct = max(_component_error(a, c), _component_error(b, d), key=_rel_key)
    crossed = max(_component_error(a, d), _component_error(b, c), key=_rel_key)
    return min(direct, crossed, key=_rel_key)


def _component_error(approx, ref):
    prec = min(approx.prec, ref.prec)
    with workprec(prec + 10):
        return (abs(approx.value - ref.value), abs(ref.value))


def _rel_key(pair):
    diff, mag = pair
    return diff / mag if mag > 0 else diff


def _float_summary(errs, config):
    """Worst relative deviation plus a per-component tolerance verdict
    (|approx - ref| <= abs_tol + rel_tol*|ref| must hold everywhere)."""
    max_rel = max((_rel_key(e) for e in errs), default=0)
    within = all(
        diff <= config.abs_tol + config.rel_tol * mag for diff, mag in errs
    )
    return {"max_rel_error": float(max_rel), "within_tolerance": bool(within)}
