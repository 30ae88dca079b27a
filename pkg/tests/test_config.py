import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrris.config import (
    ExperimentConfig,
    dbm_to_watts,
    default_config,
    parse_config,
    serialize_config,
    watts_to_dbm,
)
from hrris.errors import ParseError

# ------------------------------------------------------------------ defaults


def test_empty_config_gives_reference_defaults():
    config = parse_config("")
    assert config == ExperimentConfig() == default_config()
    assert config.experiment == "custom"
    assert config.n_tx == 4 and config.n_rx == 2 and config.n_eve == 2
    assert config.n_elements == 40 and config.n_active == 2
    assert config.p_max_dbm == 10.0
    assert config.n_paths == 3
    assert config.csi_error_std == 0.1
    assert config.noise_dbm == -80.0
    assert 20.0 in config.power_sweep_dbm
    assert config.power_sweep_dbm == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    assert config.distance_sweep_m[0] == 40.0 and config.distance_sweep_m[-1] == 140.0
    assert config.n_trials == 200
    assert config.pso_particles == 20 and config.pso_iters == 30
    assert config.pso_penalty == 1e3
    assert config.pso_kappa1 == config.pso_kappa2 == 2.05
    assert config.tx_position == (0.0, 0.0)
    assert config.surface_position == (80.0, 2.0)
    assert config.rx_position == (90.0, 0.0)
    assert config.eve_position == (100.0, 0.0)


def test_dbm_conversions():
    assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-12)
    # Thermal floor at the reference bandwidth and noise figure:
    # -174 + 10*log10(251.2e6) + 10 = -80 dBm.
    assert -174.0 + 10.0 * math.log10(251.2e6) + 10.0 == pytest.approx(-80.0, abs=2e-3)
    assert dbm_to_watts(-80.0) == pytest.approx(1e-11, rel=1e-12)
    assert watts_to_dbm(dbm_to_watts(17.3)) == pytest.approx(17.3, rel=1e-12)
    with pytest.raises(ValueError):
        watts_to_dbm(0.0)


# ------------------------------------------------------------------- parsing


def test_overrides_comments_and_blanks():
    text = """
    # sweep a small grid
    experiment = fig3

    surface.n = 16
    surface.k = 4          # first four elements active
    mc.n_trials = 5
    sweep.power_dbm = 20
    output.plots = false
    """
    config = parse_config(text)
    assert config.experiment == "fig3"
    assert config.n_elements == 16 and config.n_active == 4
    assert config.n_trials == 5
    assert config.power_sweep_dbm == (20.0,)
    assert config.plots is False
    # Untouched keys keep their defaults.
    assert config.n_tx == 4 and config.seed == 1


def test_round_trip_law():
    text = "experiment = fig4\nsurface.n = 16\nmc.seed = 9\nsurface.active = 3, 1\nsurface.k = 2\n"
    config = parse_config(text)
    assert parse_config(serialize_config(config)) == config
    assert parse_config(serialize_config(default_config())) == default_config()


config_strategy = st.builds(
    ExperimentConfig,
    experiment=st.sampled_from(["fig2", "fig3", "fig4", "custom"]),
    n_tx=st.integers(min_value=1, max_value=8),
    n_rx=st.integers(min_value=1, max_value=8),
    n_eve=st.integers(min_value=1, max_value=8),
    n_elements=st.integers(min_value=4, max_value=64),
    n_active=st.integers(min_value=0, max_value=4),
    p_max_dbm=st.floats(min_value=-40.0, max_value=30.0),
    csi_error_std=st.floats(min_value=0.0, max_value=1.0),
    noise_dbm=st.floats(min_value=-120.0, max_value=-40.0),
    power_sweep_dbm=st.lists(
        st.floats(min_value=-10.0, max_value=40.0), min_size=1, max_size=5
    ).map(tuple),
    distance_sweep_m=st.lists(
        st.floats(min_value=1.0, max_value=500.0), min_size=1, max_size=5
    ).map(tuple),
    n_trials=st.integers(min_value=1, max_value=1000),
    seed=st.integers(min_value=0, max_value=2**31),
    output_dir=st.sampled_from(["results", "out", "sweeps/a"]),
    plots=st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(config=config_strategy)
def test_serialize_parse_round_trip_property(config):
    assert parse_config(serialize_config(config)) == config


# -------------------------------------------------------------------- errors


def _parse_error(text: str) -> ParseError:
    with pytest.raises(ParseError) as info:
        parse_config(text)
    return info.value


def test_unknown_key_is_named_with_line():
    err = _parse_error("surface.n = 40\nsurface.m = 7\n")
    assert err.key == "surface.m"
    assert err.line == 2
    assert "surface.m" in str(err)


def test_malformed_line_reports_line_number():
    err = _parse_error("surface.n = 40\njust some words\n")
    assert err.line == 2
    assert err.key is None


def test_duplicate_key_rejected():
    err = _parse_error("mc.seed = 1\nmc.seed = 2\n")
    assert err.key == "mc.seed"
    assert err.line == 2


@pytest.mark.parametrize(
    "text,key",
    [
        ("mc.n_trials = 0", "mc.n_trials"),
        ("antennas.tx = 0", "antennas.tx"),
        ("surface.n = 0", "surface.n"),
        ("surface.k = 41", "surface.k"),
        ("surface.k = -1", "surface.k"),
        ("experiment = fig9", "experiment"),
        ("surface.p_max_dbm = nan", "surface.p_max_dbm"),
        ("noise.power_dbm = inf", "noise.power_dbm"),
        ("mc.n_trials = 2.5", "mc.n_trials"),
        ("sweep.power_dbm = ", "sweep.power_dbm"),
        ("sweep.distance_m = 40, -10", "sweep.distance_m"),
        ("topology.tx = 1, 2, 3", "topology.tx"),
        ("mc.seed = -4", "mc.seed"),
        ("pso.penalty = 0", "pso.penalty"),
        ("output.plots = yes", "output.plots"),
        ("output.dir = ", "output.dir"),
    ],
)
def test_invalid_values_name_their_key(text, key):
    assert _parse_error(text).key == key


def test_kappa_pair_must_exceed_four():
    err = _parse_error("pso.kappa1 = 1.0\npso.kappa2 = 1.0\n")
    assert err.key == "pso.kappa1"


def test_coincident_linked_nodes_rejected():
    err = _parse_error("topology.rx = 0, 0\n")
    assert err.key == "topology.rx"
    # The receiver and eavesdropper share no link, so overlap is legal there.
    config = parse_config("topology.rx = 100, 0\n")
    assert config.rx_position == config.eve_position


# ---------------------------------------------------------------- active set


def test_active_set_is_sorted_and_checked():
    config = parse_config("surface.active = 5, 2\n")
    assert config.active_set == (2, 5)
    assert config.resolved_active_set() == (2, 5)
    assert parse_config("").resolved_active_set() == (0, 1)
    assert _parse_error("surface.active = 1, 2, 3\n").key == "surface.active"
    assert _parse_error("surface.active = 1, 1\n").key == "surface.active"
    assert _parse_error("surface.active = 38, 40\n").key == "surface.active"


# -------------------------------------------------------------- fixed power


def test_fixed_power_rule_for_distance_sweeps():
    assert parse_config("sweep.power_dbm = 14\n").transmit_power_dbm == 14.0
    assert parse_config("").transmit_power_dbm == 20.0


def test_unit_conversion_properties():
    assert parse_config("").noise_power == pytest.approx(1e-11, rel=1e-12)
    assert parse_config("").power_budget == pytest.approx(1e-2, rel=1e-12)
