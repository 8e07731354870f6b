import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvtrack.config import (
    COMMANDS,
    ManifoldConfig,
    MapConfig,
    NoiseConfig,
    NumericsConfig,
    OutputConfig,
    ProtocolConfig,
    RunConfig,
    SweepConfig,
    parse_config,
    render_config,
    validate_config,
)
from curvtrack.errors import ConfigError, ParseError, ValidationError
from curvtrack.manifold import Kind

FIG2C = """\
command = curvature
manifold.kind = torus
manifold.delta1_over_2pi_mhz = 1.735
manifold.delta2_over_delta1 = 0.0
manifold.omega1_over_2pi_mhz = 1.735
protocol.tau_us = 1.0
"""


def test_mhz_conversion():
    config = parse_config(FIG2C)
    spec = config.spec()
    assert spec.kind is Kind.TORUS
    assert spec.delta1 == pytest.approx(2 * math.pi * 1.735)
    assert spec.omega1 == pytest.approx(2 * math.pi * 1.735)
    assert spec.delta2 == 0.0
    proto = config.protocol_obj()
    assert proto.theta_end == pytest.approx(2 * math.pi) and proto.tau == 1.0


def test_defaults():
    config = parse_config(FIG2C)
    assert config.numerics.n_theta == 201 and config.numerics.dt_us is None
    assert config.noise_obj() is None
    assert config.output_name == "curvature.csv"
    assert config.sweep is None


def test_comments_and_blank_lines():
    text = "# header\n\ncommand = chern  # trailing\nprotocol.tau_us = 2.5\n"
    assert parse_config(text).protocol.tau_us == 2.5


def test_missing_tau():
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2C.replace("protocol.tau_us = 1.0\n", ""))
    assert info.value.field == "protocol.tau_us"


def test_t2_exceeding_twice_t1():
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2C + "noise.t1_us = 10\nnoise.t2_star_us = 25\n")
    assert info.value.field == "noise.t2_star_us"


def test_noise_needs_both_times():
    with pytest.raises(ValidationError):
        parse_config(FIG2C + "noise.t1_us = 10\n")


def test_unknown_key():
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2C + "manifold.radius = 3\n")
    assert info.value.field == "manifold.radius"


def test_duplicate_key_reports_line():
    with pytest.raises(ParseError) as info:
        parse_config(FIG2C + "protocol.tau_us = 2.0\n")
    assert info.value.line == 7
    assert "line 7" in str(info.value)


def test_malformed_line():
    with pytest.raises(ParseError) as info:
        parse_config("command = chern\nthis has no equals sign\n")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "extra, field",
    [
        ("manifold.delta1_over_2pi_mhz = -1", "manifold.delta1_over_2pi_mhz"),
        ("manifold.kind = cylinder", "manifold.kind"),
        ("protocol.phi = 0.5", "protocol.phi"),
        ("protocol.theta_span = 3pi", "protocol.theta_span"),
        ("numerics.n_theta = 2", "numerics.n_theta"),
        ("numerics.n_theta = many", "numerics.n_theta"),
        ("output.format = png", "output.format"),
        ("output.format = svg", "output.format"),
        ("output.path = ../escape.csv", "output.path"),
        ("protocol.tau_us = nan", "protocol.tau_us"),
    ],
)
def test_invalid_fields(extra, field):
    key = extra.split("=")[0].strip()
    kept = [line for line in FIG2C.splitlines() if not line.startswith(key + " ")]
    with pytest.raises(ValidationError) as info:
        parse_config("\n".join(kept + [extra]) + "\n")
    assert info.value.field == field


def test_maps_need_torus_and_sweep():
    base = "command = map\nmap.quantity = overlap_ground\n"
    with pytest.raises(ValidationError):
        parse_config(base)
    with pytest.raises(ValidationError):
        parse_config(base + "manifold.kind = sphere\nsweep.n = 11\n")
    assert parse_config(base + "sweep.n = 11\n").sweep_range() == (-2.0, 2.0, 11)


def test_missing_command():
    with pytest.raises(ConfigError):
        parse_config("protocol.tau_us = 1\n")


def test_shipped_figure_configs_parse():
    from curvtrack import figures

    for name, text in figures.ACCEPTANCE_RUNS.items():
        config = parse_config(text)
        assert config.output_name.startswith(name.split("_")[0])


finite = st.floats(0.01, 100.0, allow_nan=False)


@st.composite
def run_configs(draw):
    command = draw(st.sampled_from([c for c in COMMANDS if c != "validate"]))
    kind = "torus" if command in ("map", "singularities") else draw(st.sampled_from(["sphere", "torus"]))
    manifold = ManifoldConfig(kind, draw(finite), draw(st.floats(-5, 5)), draw(finite))
    protocol = ProtocolConfig(
        draw(finite),
        draw(st.sampled_from([None, "pi", "2pi"])),
        0.0,
        draw(st.sampled_from(["instantaneous", "bare"])),
    )
    noise = NoiseConfig()
    if draw(st.booleans()):
        t1 = draw(finite)
        noise = NoiseConfig(t1, draw(st.floats(0.01, 2 * t1)), draw(st.booleans()))
    sweep = None
    if command in ("map", "singularities") or draw(st.booleans()):
        lo = draw(st.floats(-5, 4))
        sweep = SweepConfig(lo, lo + draw(st.floats(0.1, 5)), draw(st.integers(3, 300)))
    numerics = NumericsConfig(draw(st.one_of(st.none(), finite)), draw(st.integers(3, 500)), draw(st.integers(8, 512)))
    quantity = draw(st.sampled_from(["curvature", "overlap_ground", "overlap_excited", "fidelity"]))
    fmt = draw(st.sampled_from(["csv", "svg"])) if command == "map" else "csv"
    path = draw(st.one_of(st.none(), st.from_regex(r"[a-z][a-z0-9_]{0,10}\.(csv|svg)", fullmatch=True)))
    config = RunConfig(command, manifold, protocol, noise, sweep, numerics, MapConfig(quantity, draw(finite)), OutputConfig(path, fmt))
    validate_config(config)
    return config


@given(run_configs())
def test_render_round_trip(config):
    assert parse_config(render_config(config)) == config
