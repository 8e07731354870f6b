"""Run configuration: a flat ``section.key = value`` text format.

Grammar (one statement per line)::

    # comment              blank lines and lines starting with '#' are ignored
    command = map          the only key without a section
    section.key = value    value is a number, a word, or true/false

Trailing ``# ...`` after a value is a comment.  Keys may appear once.
Frequencies are given as f/2pi in MHz and converted to rad/us by
:meth:`RunConfig.spec`; times are in microseconds.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ValidationError
from .evolution import START_STATES, NoiseSpec, RampProtocol
from .manifold import Kind, ManifoldSpec

COMMANDS = ("curvature", "chern", "evolve", "map", "singularities", "validate")
MAP_QUANTITIES = ("curvature", "overlap_ground", "overlap_excited", "fidelity")
FORMATS = ("csv", "svg")
SPANS = {"pi": math.pi, "2pi": 2.0 * math.pi}


@dataclass(frozen=True)
class ManifoldConfig:
    kind: str = "torus"
    delta1_over_2pi_mhz: float = 1.735
    delta2_over_delta1: float = 0.0
    omega1_over_2pi_mhz: float = 1.735


@dataclass(frozen=True)
class ProtocolConfig:
    tau_us: Optional[float] = None
    theta_span: Optional[str] = None  # defaults to the kind's full range
    phi: float = 0.0
    start_state: str = "instantaneous"


@dataclass(frozen=True)
class NoiseConfig:
    t1_us: Optional[float] = None
    t2_star_us: Optional[float] = None
    paper_literal_sigma_minus: bool = False


@dataclass(frozen=True)
class SweepConfig:
    delta2_min: float = -2.0
    delta2_max: float = 2.0
    n: int = 101


@dataclass(frozen=True)
class NumericsConfig:
    dt_us: Optional[float] = None  # None: step rule from the evolution module
    n_theta: int = 201
    n_quad: int = 256


@dataclass(frozen=True)
class MapConfig:
    quantity: str = "curvature"
    threshold: float = 5.0


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None  # file name inside --out; default <command>.<format>
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    command: str
    manifold: ManifoldConfig = field(default_factory=ManifoldConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    sweep: Optional[SweepConfig] = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    map: MapConfig = field(default_factory=MapConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def spec(self) -> ManifoldSpec:
        m = self.manifold
        return ManifoldSpec.from_mhz(Kind(m.kind), m.delta1_over_2pi_mhz, m.delta2_over_delta1, m.omega1_over_2pi_mhz)

    def protocol_obj(self) -> RampProtocol:
        p = self.protocol
        span = SPANS[p.theta_span] if p.theta_span else self.spec().theta_range
        return RampProtocol(0.0, span, p.tau_us, p.phi, p.start_state)

    def noise_obj(self) -> Optional[NoiseSpec]:
        n = self.noise
        if n.t1_us is None:
            return None
        return NoiseSpec(n.t1_us, n.t2_star_us, n.paper_literal_sigma_minus)

    def sweep_range(self):
        s = self.sweep
        return (s.delta2_min, s.delta2_max, s.n)

    @property
    def output_name(self) -> str:
        return self.output.path or f"{self.command}.{self.output.format}"


_SECTIONS = {
    "manifold": ManifoldConfig,
    "protocol": ProtocolConfig,
    "noise": NoiseConfig,
    "sweep": SweepConfig,
    "numerics": NumericsConfig,
    "map": MapConfig,
    "output": OutputConfig,
}
# declared type of every key (str, float, int, bool)
_TYPES = {
    "manifold.kind": str,
    "manifold.delta1_over_2pi_mhz": float,
    "manifold.delta2_over_delta1": float,
    "manifold.omega1_over_2pi_mhz": float,
    "protocol.tau_us": float,
    "protocol.theta_span": str,
    "protocol.phi": float,
    "protocol.start_state": str,
    "noise.t1_us": float,
    "noise.t2_star_us": float,
    "noise.paper_literal_sigma_minus": bool,
    "sweep.delta2_min": float,
    "sweep.delta2_max": float,
    "sweep.n": int,
    "numerics.dt_us": float,
    "numerics.n_theta": int,
    "numerics.n_quad": int,
    "map.quantity": str,
    "map.threshold": float,
    "output.path": str,
    "output.format": str,
}
KNOWN_KEYS = ("command",) + tuple(_TYPES)


def _coerce(key, raw):
    kind = _TYPES[key]
    if kind is str:
        return raw
    if kind is bool:
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise ValidationError(key, f"expected true/false, got {raw!r}")
    try:
        value = int(raw) if kind is int else float(raw)
    except ValueError:
        raise ValidationError(key, f"expected {kind.__name__}, got {raw!r}") from None
    if kind is float and not math.isfinite(value):
        raise ValidationError(key, "must be finite")
    return value


def _tokenize(text):
    seen = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"expected 'key = value', got {stripped!r}", lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ParseError("empty key or value", lineno)
        if key in seen:
            raise ParseError(f"duplicate key {key!r} (first on line {seen[key][1]})", lineno)
        seen[key] = (value, lineno)
    return seen


def parse_config(text: str) -> RunConfig:
    entries = _tokenize(text)
    for key in entries:
        if key not in KNOWN_KEYS:
            raise ValidationError(key, "unknown key")
    if "command" not in entries:
        raise ValidationError("command", "missing")
    values = {k: _coerce(k, v) for k, (v, _) in entries.items() if k != "command"}
    sections = {}
    for name, cls in _SECTIONS.items():
        given = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith(name + ".")}
        if name == "sweep" and not given:
            sections[name] = None
            continue
        sections[name] = cls(**given)
    config = RunConfig(command=entries["command"][0], **sections)
    validate_config(config)
    return config


def _positive(field_name, value):
    if value is not None and not value > 0:
        raise ValidationError(field_name, f"must be positive, got {value!r}")


def validate_config(config: RunConfig) -> None:
    if config.command not in COMMANDS:
        raise ValidationError("command", f"must be one of {COMMANDS}")
    m, p, n, num = config.manifold, config.protocol, config.noise, config.numerics
    if m.kind not in (k.value for k in Kind):
        raise ValidationError("manifold.kind", "must be sphere or torus")
    _positive("manifold.delta1_over_2pi_mhz", m.delta1_over_2pi_mhz)
    _positive("manifold.omega1_over_2pi_mhz", m.omega1_over_2pi_mhz)
    _positive("protocol.tau_us", p.tau_us)
    if p.theta_span is not None and p.theta_span not in SPANS:
        raise ValidationError("protocol.theta_span", "must be pi or 2pi")
    if p.phi != 0.0:
        raise ValidationError("protocol.phi", "only phi = 0 ramps are supported")
    if p.start_state not in START_STATES:
        raise ValidationError("protocol.start_state", f"must be one of {START_STATES}")
    _positive("noise.t1_us", n.t1_us)
    _positive("noise.t2_star_us", n.t2_star_us)
    if (n.t1_us is None) != (n.t2_star_us is None):
        missing = "noise.t2_star_us" if n.t2_star_us is None else "noise.t1_us"
        raise ValidationError(missing, "t1_us and t2_star_us must be given together")
    if n.t1_us is not None and n.t2_star_us > 2.0 * n.t1_us:
        raise ValidationError("noise.t2_star_us", "must not exceed 2 * t1_us")
    _positive("numerics.dt_us", num.dt_us)
    if num.n_theta < 3:
        raise ValidationError("numerics.n_theta", "need at least 3 theta samples")
    if num.n_quad < 8:
        raise ValidationError("numerics.n_quad", "need at least 8 quadrature nodes")
    if config.sweep is not None:
        s = config.sweep
        if s.n < 3:
            raise ValidationError("sweep.n", "need at least 3 sweep points")
        if not s.delta2_max > s.delta2_min:
            raise ValidationError("sweep.delta2_max", "must exceed sweep.delta2_min")
    if config.map.quantity not in MAP_QUANTITIES:
        raise ValidationError("map.quantity", f"must be one of {MAP_QUANTITIES}")
    _positive("map.threshold", config.map.threshold)
    if config.output.format not in FORMATS:
        raise ValidationError("output.format", "must be csv or svg")
    if config.output.path is not None and ("/" in config.output.path or config.output.path in (".", "..")):
        raise ValidationError("output.path", "must be a bare file name")

    needs_tau = config.command in ("curvature", "chern", "evolve") or (
        config.command == "map" and config.map.quantity in ("curvature", "fidelity")
    )
    if needs_tau and p.tau_us is None:
        raise ValidationError("protocol.tau_us", "required for this command")
    if config.command in ("map", "singularities") and m.kind != Kind.TORUS.value:
        raise ValidationError("manifold.kind", "maps are defined for the torus")
    if config.output.format == "svg" and config.command not in ("map", "singularities"):
        raise ValidationError("output.format", "svg output is only available for maps")
    if config.command == "singularities" and config.output.format != "csv":
        raise ValidationError("output.format", "singularities are written as csv")
    if config.command in ("map", "singularities") and config.sweep is None:
        raise ValidationError("sweep.n", "maps need a sweep section")


def _render_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config`; omits fields left at their defaults."""
    lines = [f"command = {config.command}"]
    for name, cls in _SECTIONS.items():
        section = getattr(config, name)
        if section is None:
            continue
        default = cls()
        entries = [
            (f.name, getattr(section, f.name))
            for f in dataclasses.fields(section)
            if getattr(section, f.name) != getattr(default, f.name) or name == "sweep"
        ]
        if entries:
            lines.append("")
            lines.extend(f"{name}.{k} = {_render_value(v)}" for k, v in entries)
    return "\n".join(lines) + "\n"
