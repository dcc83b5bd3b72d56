"""Run configuration and its flat ``section.key = value`` text format.

Example::

    # comments start with '#'
    equation.p = 3
    equation.N = 1
    equation.q = critical
    grid.r_max = 20
    grid.m = 400
    run.mode = rescaled_full
    run.t_end = 200
    initial.family = gaussian
    initial.amplitude = 20
    initial.width = 3
    initial.radius = 8

Unknown keys, duplicate keys and malformed values are errors.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from .profiles import Params

MODES = ("physical", "rescaled_full", "rescaled_autonomous")
FAMILIES = ("barenblatt", "gaussian", "plateau", "annulus", "table")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitialData:
    family: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    radius: float = 1.0
    inner: float = 0.5
    outer: float = 2.0
    A: float = 1.0
    path: str | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"initial.family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "barenblatt" and not self.A > 0:
            raise ConfigError("initial.A must be positive")
        if self.family in ("gaussian", "plateau", "annulus") and not self.amplitude > 0:
            raise ConfigError("initial.amplitude must be positive")
        if self.family == "gaussian" and not (self.width > 0 and self.radius > 0):
            raise ConfigError("gaussian data needs positive width and radius")
        if self.family == "plateau" and not 0 <= self.radius < self.outer:
            raise ConfigError("plateau data needs 0 <= radius < outer")
        if self.family == "annulus" and not 0 <= self.inner < self.outer:
            raise ConfigError("annulus data needs 0 <= inner < outer")
        if self.family == "table" and not self.path:
            raise ConfigError("table data needs initial.path")


@dataclass(frozen=True)
class RunConfig:
    p: float = 3.0
    N: int = 1
    q: float | None = None  # None selects the critical exponent
    mode: str = "physical"
    absorption: float = 1.0
    r_max: float = 10.0
    m: int = 400
    t_start: float | None = None
    t_end: float = 1.0
    safety: float = 0.4
    initial: InitialData = field(default_factory=InitialData)
    snapshots: int = 41
    log_spaced: bool = True
    out_dir: str | None = None
    dump_profiles: bool = False
    plots: bool = False
    max_steps: int = 10**9

    def __post_init__(self) -> None:
        self.validate()

    @property
    def params(self) -> Params:
        return Params.critical(self.p, self.N) if self.q is None else Params(self.p, self.N, self.q)

    @property
    def start_time(self) -> float:
        if self.t_start is not None:
            return self.t_start
        return 1.0 if self.mode != "physical" else 0.0

    def validate(self) -> None:
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.mode not in MODES:
            raise ConfigError(f"run.mode must be one of {MODES}, got {self.mode!r}")
        if self.absorption not in (0.0, 1.0):
            raise ConfigError("equation.absorption must be 0 or 1")
        if not self.r_max > 0 or self.m < 16:
            raise ConfigError("grid needs r_max > 0 and m >= 16")
        if self.mode != "physical" and self.start_time < 1:
            raise ConfigError("rescaled runs start at s >= 1")
        if self.start_time < 0 or self.t_end < self.start_time:
            raise ConfigError("need 0 <= start time <= run.t_end")
        if not 0 < self.safety <= 1:
            raise ConfigError("run.safety must lie in (0, 1]")
        if self.snapshots < 1:
            raise ConfigError("output.snapshots must be >= 1")
        self.initial.validate()

    def with_(self, **changes: Any) -> "RunConfig":
        init_changes = {k[len("initial."):]: v for k, v in changes.items() if k.startswith("initial.")}
        top = {k: v for k, v in changes.items() if not k.startswith("initial.")}
        if init_changes:
            top["initial"] = replace(self.initial, **init_changes)
        return replace(self, **top)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# key in the text format -> (RunConfig attribute, parser)
def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _q(text: str) -> float | None:
    return None if text.lower() == "critical" else float(text)


def _str(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    return text


KEYS: dict[str, tuple[str, Any]] = {
    "equation.p": ("p", float),
    "equation.N": ("N", _int),
    "equation.q": ("q", _q),
    "equation.absorption": ("absorption", float),
    "grid.r_max": ("r_max", float),
    "grid.m": ("m", _int),
    "run.mode": ("mode", _str),
    "run.t_start": ("t_start", float),
    "run.t_end": ("t_end", float),
    "run.safety": ("safety", float),
    "run.max_steps": ("max_steps", _int),
    "output.snapshots": ("snapshots", _int),
    "output.log_spaced": ("log_spaced", _bool),
    "output.dir": ("out_dir", _str),
    "output.profiles": ("dump_profiles", _bool),
    "output.plots": ("plots", _bool),
}
INITIAL_KEYS: dict[str, Any] = {
    "family": _str,
    "amplitude": float,
    "width": float,
    "radius": float,
    "inner": float,
    "outer": float,
    "A": float,
    "path": _str,
}
for _name, _parser in INITIAL_KEYS.items():
    KEYS[f"initial.{_name}"] = (f"initial.{_name}", _parser)


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    seen: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        attr, parser = KEYS[key]
        try:
            seen[key] = (attr, parser(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    changes = dict(seen.values())
    return (base or RunConfig()).with_(**changes)


def load_config(path: str | Path) -> RunConfig:
    return parse_config_text(Path(path).read_text())


def dump_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config_text` (every key written explicitly)."""
    lines = []
    for key, (attr, _) in KEYS.items():
        if attr.startswith("initial."):
            value = getattr(config.initial, attr[len("initial."):])
        else:
            value = getattr(config, attr)
        if value is None:
            if key == "equation.q":
                lines.append(f"{key} = critical")
            continue
        if isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"

