"""Run configurations and record serialization.

One human-writable YAML document describes a run: which system, which
backend (and precision), parameters, initial state, horizon, method, seed
and digit budget.  Parsing is strict and errors name the offending field;
serialization is canonical (sorted keys, canonical scalar strings) so that
identical configs and records produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

from .numerics import (
    DEFAULT_DIGIT_BUDGET,
    DEFAULT_PRECISION,
    Scalar,
    parse_scalar,
)
from .orbits import OrbitRecord
from .xsystem import XParams, XState
from .ysystem import YParams, YState
from .zsystem import (
    LinearChange,
    Provenance,
    ShiftSequence,
    WState,
    ZParams,
    ZState,
    conjugate_params,
)

SYSTEMS = ("y", "x", "z", "w")
METHODS = ("iterated", "closed", "both")
DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12

_STATE_TYPES = {"y": YState, "x": XState, "z": ZState, "w": WState}


class ConfigError(ValueError):
    """A run configuration failed validation."""


@dataclass
class RunConfig:
    system: str
    params: object
    initial_state: object
    backend: str = "exact"
    precision: int = DEFAULT_PRECISION
    method: str = "iterated"
    horizon: int = 0
    seed: int = 0
    digit_budget: int = DEFAULT_DIGIT_BUDGET
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    shift: Optional[ShiftSequence] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if self.backend not in ("exact", "float"):
            raise ConfigError(f"backend must be 'exact' or 'float', got {self.backend!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not isinstance(self.horizon, int) or self.horizon < 0:
            raise ConfigError(f"horizon must be a non-negative integer, got {self.horizon!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.digit_budget < 1:
            raise ConfigError("digit_budget must be positive")
        if self.precision < 2:
            raise ConfigError("precision must be at least 2 bits")

        expected_state = _STATE_TYPES[self.system]
        if not isinstance(self.initial_state, expected_state):
            raise ConfigError(
                f"initial state for system {self.system!r} must be {expected_state.__name__}"
            )
        expected_params = {"y": YParams, "x": XParams, "z": ZParams, "w": ZParams}[self.system]
        if not isinstance(self.params, expected_params):
            raise ConfigError(
                f"parameters for system {self.system!r} must be {expected_params.__name__}"
            )

        if self.system == "w":
            if self.shift is None:
                raise ConfigError("system 'w' needs a shift sequence")
            length = self.shift.table_length
            if length is not None and length < self.horizon + 1:
                raise ConfigError(
                    f"shift table of length {length} cannot cover horizon {self.horizon} "
                    f"(needs at least {self.horizon + 1} entries)"
                )
        elif self.shift is not None:
            raise ConfigError("only system 'w' takes a shift sequence")

        if self.method in ("closed", "both"):
            self._validate_closed()

    def _validate_closed(self) -> None:
        if self.system == "y":
            alpha, beta = self.params.alpha, self.params.beta
        elif self.system == "x":
            alpha, beta = self.params.alpha, self.params.beta
        else:
            if self.params.provenance is None:
                raise ConfigError(
                    f"method {self.method!r} on system {self.system!r} needs parameters "
                    "with provenance (alpha, beta, change); raw coefficients iterate only"
                )
            alpha, beta = self.params.provenance.alpha, self.params.provenance.beta
        if alpha.is_zero or beta.is_zero:
            raise ConfigError(
                f"method {self.method!r} needs alpha != 0 and beta != 0; "
                "use method 'iterated' for degenerate parameters"
            )

    # -- serialization ----------------------------------------------------

    def to_mapping(self) -> dict:
        out = {
            "system": self.system,
            "backend": self.backend,
            "precision": self.precision,
            "method": self.method,
            "horizon": self.horizon,
            "seed": self.seed,
            "digit_budget": self.digit_budget,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "parameters": self._params_mapping(),
            "initial_state": [str(c) for c in self.initial_state.components],
        }
        if self.shift is not None:
            out["shift"] = _shift_to_mapping(self.shift)
        return out

    def _params_mapping(self) -> dict:
        p = self.params
        if self.system == "y":
            return {"alpha": str(p.alpha), "beta": str(p.beta), "gamma": str(p.gamma)}
        if self.system == "x":
            return {"alpha": str(p.alpha), "beta": str(p.beta)}
        if p.provenance is not None:
            prov = p.provenance
            a = prov.change
            return {
                "alpha": str(prov.alpha),
                "beta": str(prov.beta),
                "change": [[str(a.a11), str(a.a12)], [str(a.a21), str(a.a22)]],
            }
        return {"coefficients": [[str(c) for c in row] for row in p.rows]}

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_mapping(), sort_keys=True)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        if not isinstance(mapping, dict):
            raise ConfigError("run configuration must be a mapping")
        known = {
            "system", "backend", "precision", "method", "horizon", "seed",
            "digit_budget", "rel_tol", "abs_tol", "parameters", "initial_state", "shift",
        }
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields: {sorted(unknown)}")
        for required in ("system", "parameters", "initial_state"):
            if required not in mapping:
                raise ConfigError(f"missing required field {required!r}")

        system = mapping["system"]
        if system not in SYSTEMS:
            raise ConfigError(f"system must be one of {SYSTEMS}, got {system!r}")
        backend = mapping.get("backend", "exact")
        precision = mapping.get("precision", DEFAULT_PRECISION)

        def scalar(text, where):
            try:
                return parse_scalar(str(text), backend, precision)
            except ValueError as exc:
                raise ConfigError(f"bad scalar in {where}: {exc}") from exc

        params = _params_from_mapping(system, mapping["parameters"], scalar)
        state_raw = mapping["initial_state"]
        if not isinstance(state_raw, (list, tuple)) or len(state_raw) != 2:
            raise ConfigError("initial_state must be a list of two scalars")
        state = _STATE_TYPES[system](
            scalar(state_raw[0], "initial_state"), scalar(state_raw[1], "initial_state")
        )
        shift = None
        if mapping.get("shift") is not None:
            shift = _shift_from_mapping(mapping["shift"], scalar)
        return cls(
            system=system,
            params=params,
            initial_state=state,
            backend=backend,
            precision=precision,
            method=mapping.get("method", "iterated"),
            horizon=mapping.get("horizon", 0),
            seed=mapping.get("seed", 0),
            digit_budget=mapping.get("digit_budget", DEFAULT_DIGIT_BUDGET),
            rel_tol=mapping.get("rel_tol", DEFAULT_REL_TOL),
            abs_tol=mapping.get("abs_tol", DEFAULT_ABS_TOL),
            shift=shift,
        )

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            mapping = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"configuration is not valid YAML: {exc}") from exc
        return cls.from_mapping(mapping)


def _params_from_mapping(system, mapping, scalar):
    if not isinstance(mapping, dict):
        raise ConfigError("parameters must be a mapping")
    if system == "y":
        _require_keys(mapping, {"alpha", "beta", "gamma"}, "y-system parameters")
        return YParams(
            scalar(mapping["alpha"], "alpha"),
            scalar(mapping["beta"], "beta"),
            scalar(mapping["gamma"], "gamma"),
        )
    if system == "x":
        _require_keys(mapping, {"alpha", "beta"}, "x-system parameters")
        return XParams(scalar(mapping["alpha"], "alpha"), scalar(mapping["beta"], "beta"))
    if "coefficients" in mapping:
        _require_keys(mapping, {"coefficients"}, f"{system}-system parameters")
        rows = mapping["coefficients"]
        if not isinstance(rows, list) or len(rows) != 2 or any(len(r) != 3 for r in rows):
            raise ConfigError("coefficients must be 2 rows of 3 scalars")
        return ZParams.from_rows(
            [[scalar(c, "coefficients") for c in row] for row in rows]
        )
    _require_keys(mapping, {"alpha", "beta", "change"}, f"{system}-system parameters")
    rows = mapping["change"]
    if not isinstance(rows, list) or len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ConfigError("change must be a 2x2 matrix of scalars")
    change = LinearChange(
        scalar(rows[0][0], "change"),
        scalar(rows[0][1], "change"),
        scalar(rows[1][0], "change"),
        scalar(rows[1][1], "change"),
    )
    return conjugate_params(change, scalar(mapping["alpha"], "alpha"), scalar(mapping["beta"], "beta"))


def _require_keys(mapping, keys, where):
    if set(mapping) != keys:
        raise ConfigError(f"{where} must have exactly the keys {sorted(keys)}, got {sorted(mapping)}")


def _shift_to_mapping(shift: ShiftSequence) -> dict:
    if shift.kind == "table":
        return {"kind": "table", "table": [[str(f1), str(f2)] for f1, f2 in shift.data]}
    start, second = shift.data
    key = "increment" if shift.kind == "affine" else "ratio"
    return {
        "kind": shift.kind,
        "start": [str(c) for c in start],
        key: [str(c) for c in second],
    }


def _shift_from_mapping(mapping, scalar) -> ShiftSequence:
    if not isinstance(mapping, dict) or "kind" not in mapping:
        raise ConfigError("shift must be a mapping with a 'kind'")
    kind = mapping["kind"]
    if kind == "table":
        if "table" not in mapping:
            raise ConfigError("table shift needs a 'table' of [f1, f2] pairs")
        pairs = [
            (scalar(f1, "shift table"), scalar(f2, "shift table"))
            for f1, f2 in mapping["table"]
        ]
        return ShiftSequence.from_table(pairs)
    if kind in ("affine", "geometric"):
        key = "increment" if kind == "affine" else "ratio"
        if "start" not in mapping or key not in mapping:
            raise ConfigError(f"{kind} shift needs 'start' and '{key}'")
        start = [scalar(c, "shift start") for c in mapping["start"]]
        second = [scalar(c, f"shift {key}") for c in mapping[key]]
        if len(start) != 2 or len(second) != 2:
            raise ConfigError("shift rule entries must have two components")
        ctor = ShiftSequence.affine if kind == "affine" else ShiftSequence.geometric
        return ctor(start, second)
    raise ConfigError(f"unknown shift kind {kind!r}")


# -- orbit record serialization -------------------------------------------


def record_to_mapping(record: OrbitRecord) -> dict:
    out = {
        "system": record.system,
        "backend": record.backend,
        "method": record.method,
        "horizon": record.horizon,
    }
    if record.states is not None:
        out["states"] = [[str(c) for c in s.components] for s in record.states]
    if record.closed_states is not None:
        out["closed_states"] = [
            None if entry is None else [[str(c) for c in s.components] for s in entry]
            for entry in record.closed_states
        ]
    if record.residuals is not None:
        out["residuals"] = [[str(r1), str(r2)] for r1, r2 in record.residuals]
    if record.summary is not None:
        out["summary"] = dict(record.summary)
    return out


def record_dumps(record: OrbitRecord) -> str:
    return yaml.safe_dump(record_to_mapping(record), sort_keys=True)


def record_from_mapping(mapping: dict, precision: int = DEFAULT_PRECISION) -> OrbitRecord:
    if not isinstance(mapping, dict):
        raise ConfigError("orbit record must be a mapping")
    for required in ("system", "backend", "method", "horizon"):
        if required not in mapping:
            raise ConfigError(f"orbit record is missing {required!r}")
    system = mapping["system"]
    if system not in SYSTEMS:
        raise ConfigError(f"orbit record has unknown system {system!r}")
    backend = mapping["backend"]
    state_type = _STATE_TYPES[system]

    def scalar(text):
        return parse_scalar(str(text), backend, precision)

    def state(parts):
        if len(parts) != 2:
            raise ConfigError("each state must have two components")
        return state_type(scalar(parts[0]), scalar(parts[1]))

    states = None
    if mapping.get("states") is not None:
        states = [state(parts) for parts in mapping["states"]]
    closed_states = None
    if mapping.get("closed_states") is not None:
        closed_states = [
            None if entry is None else tuple(state(parts) for parts in entry)
            for entry in mapping["closed_states"]
        ]
    residuals = None
    if mapping.get("residuals") is not None:
        residuals = [(scalar(r1), scalar(r2)) for r1, r2 in mapping["residuals"]]
    return OrbitRecord(
        system=system,
        backend=backend,
        method=mapping["method"],
        horizon=mapping["horizon"],
        states=states,
        closed_states=closed_states,
        residuals=residuals,
        summary=mapping.get("summary"),
    )


def record_loads(text: str, precision: int = DEFAULT_PRECISION) -> OrbitRecord:
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"orbit record is not valid YAML: {exc}") from exc
    return record_from_mapping(mapping, precision)


def record_csv_rows(record: OrbitRecord):
    """Header and rows for the CSV export: one row per time index, decimal
    columns for each state component, residual columns when present."""
    header = ["ell", "re_1", "im_1", "re_2", "im_2"]
    if record.residuals is not None:
        header += ["residual_1_re", "residual_1_im", "residual_2_re", "residual_2_im"]
    rows = []
    states = record.primary_states()
    for ell, s in enumerate(states):
        row = [str(ell)]
        for c in s.components:
            row.extend(_csv_parts(c))
        if record.residuals is not None:
            if ell < len(record.residuals):
                for r in record.residuals[ell]:
                    row.extend(_csv_parts(r))
            else:
                row.extend([""] * 4)
        rows.append(row)
    return header, rows


def _csv_parts(scalar: Scalar):
    from mpmath import nstr

    if scalar.backend == "exact":
        value = scalar.to_float(DEFAULT_PRECISION).value
        digits = 17
    else:
        value = scalar.value
        digits = int(scalar.prec / 3.3219) + 3
    return (
        nstr(value.real, digits, min_fixed=1, max_fixed=0),
        nstr(value.imag, digits, min_fixed=1, max_fixed=0),
    )
