import math

import pytest
from hypothesis import given, strategies as st

from switchsim import (
    Config,
    ConfigError,
    DisturbancePulses,
    InjectDisturbance,
    MoveMotorTo,
    PathSpec,
    SetVelocity,
    Wait,
    parse_config,
    serialize_config,
)


class TestDefaults:
    def test_empty_file_is_reference_config(self):
        assert parse_config("") == Config()

    def test_comments_and_blanks_ignored(self):
        text = "# a comment\n\n[layout]  # trailing\n# another\n"
        assert parse_config(text) == Config()

    def test_partial_override(self):
        cfg = parse_config("[layout]\nswitch_teeth = 16\n")
        assert cfg == Config()
        cfg = parse_config("[layout]\nswitch_teeth = 14\n")
        assert cfg == Config(switch_teeth=14)

    def test_reference_plant_numbers(self):
        plant = Config().plant()
        assert math.degrees(plant.engagement.theta_track) == pytest.approx(19.8, abs=1e-9)
        assert plant.traversal.effective_ratio == pytest.approx(122.6 / 19.8)
        assert plant.motor.profile_accel == pytest.approx(5466.05, abs=0.01)


class TestErrors:
    def assert_errors(self, text, *fragments):
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        message = str(exc.value)
        for fragment in fragments:
            assert fragment in message
        return exc.value

    def test_unknown_section(self):
        err = self.assert_errors("[gears]\nfoo = 1\n", "unknown section")
        assert err.errors[0][0] == 1

    def test_unknown_key_with_line(self):
        err = self.assert_errors("[layout]\ndrive_teeth = 20\nbogus = 3\n", "unknown key")
        assert err.errors[0][0] == 3

    def test_syntax_error(self):
        self.assert_errors("[layout]\ndrive_teeth\n", "expected 'key = value'")

    def test_bad_number(self):
        self.assert_errors("[layout]\ndrive_teeth = many\n", "cannot parse")

    def test_duplicate_key(self):
        self.assert_errors("[sim]\nseed = 1\nseed = 2\n", "duplicate key")

    def test_mixed_modules_names_keys(self):
        text = "[layout]\ndrive_module_mm = 1.0\nswitch_module_mm = 0.8\n"
        err = self.assert_errors(text, "mesh", "drive_module_mm", "switch_module_mm")
        # attributed to the later of the offending lines
        assert any(line == 3 for line, _ in err.errors)

    def test_slip_and_pair_rejected(self):
        self.assert_errors(
            "[traversal]\nslip = 0.7\nmotor_travel_deg = 120\n", "not both"
        )

    def test_accel_and_target_rejected(self):
        self.assert_errors(
            "[motor]\nprofile_accel_deg_s2 = 5000\ntarget_switch_time_ms = 300\n",
            "not both",
        )

    def test_distance_and_travel_rejected(self):
        self.assert_errors(
            "[layout]\ncenter_distance_mm = 34.76\ntrack_travel_deg = 19.8\n",
            "not both",
        )

    def test_geometry_violations_surface(self):
        self.assert_errors(
            "[layout]\ncenter_distance_mm = 100.0\n", "no-engagement"
        )

    def test_slip_range(self):
        self.assert_errors("[traversal]\nslip = 1.5\n", "outside [0, 1)")

    def test_bad_script_command(self):
        self.assert_errors("[script]\nfly_to 30\n", "unrecognized script command")

    def test_content_outside_section(self):
        self.assert_errors("drive_teeth = 20\n", "outside a known section")

    def test_bow_on_linear_rejected(self):
        self.assert_errors(
            "[paths]\nagonist_bow_mm = 3.0\n", "only applies to the curved kind"
        )

    def test_target_below_floor_caught(self):
        self.assert_errors(
            "[motor]\ntarget_switch_time_ms = 100.0\n", "cannot be instantiated"
        )


class TestScript:
    def test_commands_parse(self):
        text = (
            "[script]\n"
            "move_to 225.0\n"
            "set_velocity 360.0\n"
            "wait 0.5\n"
            "disturb disengaged 5.0 0.1\n"
            "disturb_off\n"
        )
        cfg = parse_config(text)
        assert cfg.script == (
            MoveMotorTo(225.0),
            SetVelocity(360.0),
            Wait(0.5),
            InjectDisturbance(DisturbancePulses(target="disengaged", magnitude=5.0, width=0.1)),
            InjectDisturbance(None),
        )


class TestRoundTrip:
    def test_defaults(self):
        cfg = Config()
        assert parse_config(serialize_config(cfg)) == cfg

    def test_customized(self):
        cfg = Config(
            switch_teeth=12,
            drive_module=0.8,
            switch_module=0.8,
            driven_module=0.8,
            driven_half_angle_deg=30.0,
            slip=0.5,
            profile_accel=4800.0,
            control_mode="velocity",
            antagonist=PathSpec(kind="curved", reference_length=310.0, moment_arm=22.0, bow=4.0),
            payout_at_zero_mm=250.0,
            dt_s=0.0005,
            seed=99,
            script=(MoveMotorTo(100.0), Wait(0.25)),
        )
        assert parse_config(serialize_config(cfg)) == cfg

    def test_explicit_center_distance(self):
        cfg = Config(center_distance_mm=34.757014711652)
        assert parse_config(serialize_config(cfg)) == cfg

    def test_tabulated_path(self):
        knots = tuple(
            (float(d), 300.0 - 25.0 * math.radians(d) - 5.0 * math.sin(math.radians(d)))
            for d in range(-90, 91, 30)
        )
        cfg = Config(antagonist=PathSpec(kind="tabulated", knots=knots))
        round_tripped = parse_config(serialize_config(cfg))
        assert round_tripped == cfg
        round_tripped.plant()  # buildable

    def test_per_gear_modules(self):
        cfg = Config(drive_module=0.5, switch_module=0.5, driven_module=0.5)
        text = serialize_config(cfg)
        assert "module_mm = 0.5" in text
        assert parse_config(text) == cfg

    @given(
        teeth=st.integers(min_value=10, max_value=40),
        seed=st.integers(min_value=0, max_value=2**31),
        dt=st.sampled_from([1e-3, 5e-4, 2e-3]),
    )
    def test_round_trip_random(self, teeth, seed, dt):
        cfg = Config(driven_teeth=teeth, seed=seed, dt_s=dt)
        assert parse_config(serialize_config(cfg)) == cfg
