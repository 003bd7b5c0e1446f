"""Run and sweep configuration: flat ``key = value`` files (or JSON) plus CLI overrides."""

from __future__ import annotations

import ast
import dataclasses
import json
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .algebra import Couplings, EnsembleSpec
from .errors import DomainError
from .states import LadderState, TimeGrid, fully_excited, ladder_level, semi_excited, w_state

INITIAL_NAMES = ("fully_excited", "semi_excited", "w_state")
FORMATS = ("csv", "json")
SOLVERS = ("diagonal", "full")
AGGREGATES = ("peak_intensity", "peak_time", "has_delay", "emitted_fraction")


class ConfigError(DomainError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi}


def parse_number(text) -> float:
    """Parse a float or a small arithmetic expression such as ``pi/4 + 0.6``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression element {ast.dump(node)}")

    try:
        value = ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc
    return float(value)


def parse_int(text) -> int:
    value = parse_number(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


@dataclass(frozen=True)
class RunConfig:
    n_atoms: int = 8
    chi: float = 0.1
    eta_plus: float = 0.0
    eta_minus: float = 0.0
    q: float = 1.0
    field_intensity: float = 1.0
    initial: str = "fully_excited"
    t_end: float = 200.0
    output_points: int = 201
    output_path: str | None = None
    format: str = "csv"
    solver: str = "diagonal"

    # -- derived objects -------------------------------------------------

    def spec(self) -> EnsembleSpec:
        try:
            return EnsembleSpec(self.n_atoms)
        except DomainError as exc:
            raise ConfigError("n_atoms", str(exc)) from exc

    def couplings(self) -> Couplings:
        """Effective couplings; chi is rescaled by the field intensity."""
        try:
            base = Couplings(self.chi, self.eta_plus, self.eta_minus, self.q)
            return base.scaled(self.field_intensity)
        except DomainError as exc:
            name = next((f for f in ("chi", "q", "field_intensity", "eta_plus", "eta_minus") if f in str(exc)), "couplings")
            raise ConfigError(name, str(exc)) from exc

    def grid(self) -> TimeGrid:
        try:
            return TimeGrid(self.t_end, self.output_points)
        except DomainError as exc:
            name = "output_points" if "output_points" in str(exc) else "t_end"
            raise ConfigError(name, str(exc)) from exc

    def initial_state(self) -> LadderState:
        spec = self.spec()
        text = self.initial.strip()
        try:
            if text == "fully_excited":
                return fully_excited(spec)
            if text == "semi_excited":
                return semi_excited(spec)
            if text == "w_state":
                return w_state(spec)
            if text.startswith("p="):
                values = [parse_number(v) for v in text[2:].split(",")]
                return LadderState(np.array(values)).check(spec)
            if text.startswith("m="):
                text = text[2:]
            return ladder_level(spec, parse_number(text))
        except (DomainError, ValueError) as exc:
            raise ConfigError("initial", str(exc)) from exc

    def validate(self) -> "RunConfig":
        self.spec()
        self.couplings()
        self.grid()
        self.initial_state()
        if self.format not in FORMATS:
            raise ConfigError("format", f"expected one of {FORMATS}, got {self.format!r}")
        if self.solver not in SOLVERS:
            raise ConfigError("solver", f"expected one of {SOLVERS}, got {self.solver!r}")
        return self

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    def to_text(self) -> str:
        lines = ["# dickestark run configuration"]
        for key, value in self.to_dict().items():
            lines.append(f"{key} = {_render(value)}")
        return "\n".join(lines) + "\n"

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def _render(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def coerce(key: str, value):
    """Convert a raw (string or JSON) value to the type of RunConfig field ``key``."""
    if key not in _FIELD_TYPES:
        raise ConfigError(key, "unknown configuration key")
    kind = _FIELD_TYPES[key]
    try:
        if key in ("n_atoms", "output_points"):
            return parse_int(value)
        if kind == "float":
            return parse_number(value)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from exc
    if key == "initial" and isinstance(value, list):
        return "p=" + ",".join(repr(float(v)) for v in value)
    return str(value)


def _parse_text(text: str, source: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    return raw


def read_raw(path) -> dict:
    """Key/value pairs from a config file; JSON is detected by a leading '{'."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "JSON config must be an object")
        flat = {}
        for key, value in data.items():
            if key == "sweep" and isinstance(value, dict):
                flat.update({f"sweep.{k}": v for k, v in value.items()})
            else:
                flat[key] = value
        return flat
    return _parse_text(text, str(path))


def run_config_from(raw: dict, overrides: dict | None = None) -> RunConfig:
    values = {}
    for key, value in {**raw, **(overrides or {})}.items():
        if value is None or key.startswith("sweep.") or key == "aggregate":
            continue
        values[key] = coerce(key, value)
    return RunConfig(**values)


def parse_run_config(text: str) -> RunConfig:
    if text.lstrip().startswith("{"):
        return run_config_from(json.loads(text))
    return run_config_from(_parse_text(text, "<text>"))


# ---------------------------------------------------------------------------
# sweeps


def parse_values(key: str, spec) -> list:
    """Values for a swept parameter: list, 'a,b,c', or inclusive range 'start:stop:step'."""
    if isinstance(spec, (list, tuple)):
        items = list(spec)
    else:
        text = str(spec).strip()
        if ":" in text:
            try:
                start, stop, step = (parse_number(p) for p in text.split(":"))
            except ValueError as exc:
                raise ConfigError(f"sweep.{key}", f"bad range {text!r}: expected start:stop:step") from exc
            if step <= 0 or stop < start:
                raise ConfigError(f"sweep.{key}", f"bad range {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            items = [start + i * step for i in range(count)]
        else:
            items = [v for v in text.split(",") if v.strip()]
    if not items:
        raise ConfigError(f"sweep.{key}", "empty value set")
    return [coerce(key, v) for v in items]


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    parameters: tuple  # ((name, (values...)), ...)
    aggregates: tuple = field(default=())

    def __post_init__(self):
        if not 1 <= len(self.parameters) <= 2:
            raise ConfigError("sweep", f"sweep one or two parameters, got {len(self.parameters)}")
        names = [name for name, _ in self.parameters]
        if len(set(names)) != len(names):
            raise ConfigError("sweep", "a parameter is swept twice")
        for name, values in self.parameters:
            if name not in _FIELD_TYPES or name in ("output_path", "format"):
                raise ConfigError(f"sweep.{name}", "not a sweepable RunConfig parameter")
            if not values:
                raise ConfigError(f"sweep.{name}", "empty value set")
        if not self.aggregates:
            raise ConfigError("aggregate", f"at least one aggregate required, choose from {AGGREGATES}")
        bad = [a for a in self.aggregates if a not in AGGREGATES]
        if bad:
            raise ConfigError("aggregate", f"unknown aggregate(s) {bad}; choose from {AGGREGATES}")

    def combinations(self):
        """Cartesian product in deterministic order (first parameter slowest)."""
        names = [n for n, _ in self.parameters]
        grids = [v for _, v in self.parameters]
        if len(grids) == 1:
            return [{names[0]: v} for v in grids[0]]
        return [{names[0]: a, names[1]: b} for a in grids[0] for b in grids[1]]


def sweep_config_from(raw: dict, overrides: dict, params: list, aggregates) -> SweepConfig:
    base = run_config_from(raw, overrides)
    swept = {k[len("sweep."):]: v for k, v in raw.items() if k.startswith("sweep.")}
    for item in params or ():
        if "=" not in item:
            raise ConfigError("param", f"expected NAME=VALUES, got {item!r}")
        name, values = item.split("=", 1)
        swept[name.strip()] = values
    parameters = tuple((name, tuple(parse_values(name, v))) for name, v in swept.items())
    if aggregates is None:
        aggregates = raw.get("aggregate", "")
    if isinstance(aggregates, str):
        aggregates = [a.strip() for a in aggregates.split(",") if a.strip()]
    return SweepConfig(base, parameters, tuple(aggregates))
