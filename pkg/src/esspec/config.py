"""Config ingestion: JSON in, validated operator matrix plus knobs out.

Schema (all expressions use the grammar of :mod:`esspec.expr`)::

    {
      "params":  {name: real, ...},
      "entries": {
        "a": [{"power": int>=0, "limit": expr, "perturbation": expr?}, ...],
        "b": [...], "c": [...], "d": [...]          # b, c may be empty
      },
      "grids":      {"x_max"?, "x_points"?, "xi_max"?, "xi_points"?},
      "tolerances": {"margin_tol"?, "decay_tol"?, ...}
    }

Limits must be constant in x and evaluate over params to finite complex
values; the maximal power of an entry defines its order.  Validation errors
carry a JSON-pointer-style path to the offending element.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace

from .ellipticity import SampleGrid
from .expr import ExprSyntaxError, eval_expr, free_params, parse_expr, references_x
from .symbols import CoeffFn, DiffSymbol, OperatorMatrix, ValidationError


class ConfigError(ValueError):
    """Schema or invariant violation, with a JSON-pointer-style location."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


@dataclass(frozen=True)
class Tolerances:
    decay_tol: float = 1e-6
    x_far: float = 50.0
    margin_tol: float = 1e-8
    pole_tol: float = 1e-12
    pole_guard: float = 0.5
    coarse_tol: float = 1e-2
    refine_tol: float = 1e-10
    root_tol: float = 1e-10
    qr_tol: float = 1e-12
    excl_tol: float = 1e-6
    stab_tol: float = 1e-6
    dist_tol: float | None = None


@dataclass(frozen=True)
class GridSpec:
    x_max: float = 50.0
    x_points: int = 201
    xi_max: float = 1e3
    xi_points: int = 200

    def sample_grid(self) -> SampleGrid:
        return SampleGrid.default(x_max=self.x_max, x_points=self.x_points,
                                  xi_max=self.xi_max, xi_points=self.xi_points)


@dataclass
class Config:
    params: dict[str, float]
    operator: OperatorMatrix
    grids: GridSpec = field(default_factory=GridSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)
    raw: dict = field(default_factory=dict)


_ENTRY_KEYS = ("a", "b", "c", "d")


def load_config(path) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON: {err}") from err
    return parse_config(data)


def parse_config(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object")
    unknown = set(data) - {"params", "entries", "grids", "tolerances"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")

    params = _parse_params(data.get("params", {}))
    tolerances = _parse_tolerances(data.get("tolerances", {}))
    grids = _parse_grids(data.get("grids", {}))

    if "entries" not in data:
        raise ConfigError("missing required key 'entries'")
    entries = data["entries"]
    if not isinstance(entries, dict):
        raise ConfigError("must be an object", "/entries")
    missing = [k for k in _ENTRY_KEYS if k not in entries]
    if missing:
        raise ConfigError(f"missing entries {missing}", "/entries")
    unknown = set(entries) - set(_ENTRY_KEYS)
    if unknown:
        raise ConfigError(f"unknown entries {sorted(unknown)}", "/entries")

    symbols = {}
    for name in _ENTRY_KEYS:
        symbols[name] = _parse_entry(entries[name], f"/entries/{name}", params,
                                     tolerances)
    try:
        operator = OperatorMatrix(symbols["a"], symbols["b"], symbols["c"],
                                  symbols["d"], x_far=tolerances.x_far,
                                  decay_tol=tolerances.decay_tol)
    except ValidationError as err:
        raise ConfigError(str(err), "/entries") from err

    return Config(params=params, operator=operator, grids=grids,
                  tolerances=tolerances, raw=data)


def _parse_params(raw) -> dict[str, float]:
    if not isinstance(raw, dict):
        raise ConfigError("must be an object", "/params")
    out = {}
    for name, value in raw.items():
        ptr = f"/params/{name}"
        if not (isinstance(name, str) and name.isidentifier()):
            raise ConfigError("parameter name must be an identifier", ptr)
        if name in ("x", "i", "pi"):
            raise ConfigError("parameter name shadows a builtin constant", ptr)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError("parameter value must be a real number", ptr)
        if value != value or value in (float("inf"), float("-inf")):
            raise ConfigError("parameter value must be finite", ptr)
        out[name] = float(value)
    return out


def _parse_tolerances(raw) -> Tolerances:
    if not isinstance(raw, dict):
        raise ConfigError("must be an object", "/tolerances")
    known = {f.name for f in fields(Tolerances)}
    out = Tolerances()
    for name, value in raw.items():
        ptr = f"/tolerances/{name}"
        if name not in known:
            raise ConfigError(f"unknown tolerance (known: {sorted(known)})", ptr)
        if value is None and name == "dist_tol":
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("tolerance must be a positive number", ptr)
        out = replace(out, **{name: float(value)})
    return out


def _parse_grids(raw) -> GridSpec:
    if not isinstance(raw, dict):
        raise ConfigError("must be an object", "/grids")
    known = {f.name for f in fields(GridSpec)}
    out = GridSpec()
    for name, value in raw.items():
        ptr = f"/grids/{name}"
        if name not in known:
            raise ConfigError(f"unknown grid key (known: {sorted(known)})", ptr)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("grid value must be a positive number", ptr)
        if name.endswith("_points"):
            if int(value) != value or value < 2:
                raise ConfigError("point count must be an integer >= 2", ptr)
            out = replace(out, **{name: int(value)})
        else:
            out = replace(out, **{name: float(value)})
    return out


def _parse_entry(rows, pointer: str, params: dict[str, float],
                 tolerances: Tolerances) -> DiffSymbol:
    if not isinstance(rows, list):
        raise ConfigError("must be an array of {power, limit, perturbation}",
                          pointer)
    terms: dict[int, CoeffFn] = {}
    env = {k: complex(v) for k, v in params.items()}
    for idx, row in enumerate(rows):
        ptr = f"{pointer}/{idx}"
        if not isinstance(row, dict):
            raise ConfigError("must be an object", ptr)
        unknown = set(row) - {"power", "limit", "perturbation"}
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", ptr)
        if "power" not in row or "limit" not in row:
            raise ConfigError("requires 'power' and 'limit'", ptr)
        power = row["power"]
        if isinstance(power, bool) or not isinstance(power, int) or power < 0:
            raise ConfigError("power must be an integer >= 0", f"{ptr}/power")
        if power in terms:
            raise ConfigError(f"duplicate power {power}", f"{ptr}/power")
        limit = _eval_limit(row["limit"], env, f"{ptr}/limit")
        perturbation = None
        if "perturbation" in row and row["perturbation"] is not None:
            perturbation = _parse_bound_expr(row["perturbation"], env,
                                             f"{ptr}/perturbation",
                                             allow_x=True)
        coeff = CoeffFn(limit=limit, perturbation=perturbation, params=env)
        if perturbation is not None:
            try:
                coeff.check_decay(tolerances.x_far, tolerances.decay_tol)
            except ValidationError as err:
                raise ConfigError(str(err), f"{ptr}/perturbation") from err
        terms[power] = coeff
    return DiffSymbol.from_powers(terms)


def _parse_bound_expr(source, env: dict[str, complex], pointer: str,
                      allow_x: bool):
    if not isinstance(source, str):
        raise ConfigError("expression must be a string", pointer)
    try:
        e = parse_expr(source)
    except ExprSyntaxError as err:
        raise ConfigError(f"expression parse error: {err}", pointer) from err
    if not allow_x and references_x(e):
        raise ConfigError("limit must be constant in x", pointer)
    unbound = free_params(e) - set(env)
    if unbound:
        raise ConfigError(f"unbound parameters {sorted(unbound)}", pointer)
    return e


def _eval_limit(source, env: dict[str, complex], pointer: str) -> complex:
    e = _parse_bound_expr(source, env, pointer, allow_x=False)
    value = eval_expr(e, 0.0, env)
    if not (abs(value.real) < float("inf") and abs(value.imag) < float("inf")):
        raise ConfigError("limit does not evaluate to a finite value", pointer)
    return value


def emit_config(config: Config, indent: int = 2) -> str:
    """Serialize back to JSON text; load(emit(c)) is equivalent to c."""
    return json.dumps(config.raw, indent=indent) + "\n"
