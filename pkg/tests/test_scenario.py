import pytest

from buoyquad.errors import ConfigError
from buoyquad.scenario import (
    SCENARIO_TYPES,
    default_scenario,
    default_scenario_text,
    load_scenario,
    parse_scenario_text,
)


@pytest.mark.parametrize("stype", SCENARIO_TYPES)
def test_default_text_round_trips(stype):
    sc = parse_scenario_text(default_scenario_text(stype))
    assert sc.type == stype
    assert sc.dt == 0.005
    assert sc.aero.m == pytest.approx(0.1262)


def test_comments_and_blank_lines_ignored(tmp_path):
    text = default_scenario_text("hover")
    decorated = "# leading comment\n\n" + text.replace(
        "aero.m = ", "aero.m =   # inline\naero.m2bad", 1
    )
    # sanity: the undecorated file loads from disk too
    path = tmp_path / "hover.scn"
    path.write_text("# top\n\n" + text + "\n# trailing\n")
    sc = load_scenario(path)
    assert sc.type == "hover"


def test_unknown_key_is_an_error():
    text = default_scenario_text("hover") + "aero.bogus = 1\n"
    with pytest.raises(ConfigError, match="unknown keys: aero.bogus"):
        parse_scenario_text(text)


def test_missing_key_is_an_error():
    text = default_scenario_text("hover")
    stripped = "\n".join(
        line for line in text.splitlines() if not line.startswith("aero.c_d")
    )
    with pytest.raises(ConfigError, match="missing keys: aero.c_d"):
        parse_scenario_text(stripped)


def test_type_specific_keys_are_strict():
    # step.* keys do not belong in a hover scenario
    text = default_scenario_text("hover") + "step.z0 = 1.0\n"
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_scenario_text(text)


def test_bad_values_are_reported_with_key():
    text = default_scenario_text("hover").replace(
        "aero.c_d = ", "aero.c_d = not_a_number # ", 1
    )
    with pytest.raises(ConfigError, match="aero.c_d"):
        parse_scenario_text(text)


def test_duplicate_key_is_an_error():
    text = default_scenario_text("hover") + "aero.m = 0.2\n"
    with pytest.raises(ConfigError, match="duplicate"):
        parse_scenario_text(text)


def test_bad_rotor_id_rejected():
    with pytest.raises(ConfigError, match="rotor"):
        default_scenario("fault_injection", overrides={"fault_injection.rotor": 5})


def test_waypoint_parsing():
    sc = default_scenario("waypoint")
    assert sc.waypoints() == [(0.0, 0.0, 1.5), (2.0, 0.0, 1.5), (2.0, 2.0, 1.5)]
    bad = default_scenario("waypoint", overrides={"waypoint.points": "1,2"})
    with pytest.raises(ConfigError):
        bad.waypoints()


def test_override_unknown_key_rejected():
    with pytest.raises(ConfigError):
        default_scenario_text("hover", overrides={"nope.key": 1})


def test_heading_flag_parses_on_off():
    sc = default_scenario("hover", overrides={"battery.heading_hold": "off"})
    assert sc.heading_hold is False
    sc = default_scenario("hover", overrides={"battery.heading_hold": "on"})
    assert sc.heading_hold is True
