import math
from dataclasses import replace

import pytest

from switchsim import (
    Config,
    DesignConstraints,
    DesignSpace,
    EmptyFeasibleSet,
    GearSpec,
    InvalidDesign,
    SpaceTooLarge,
    evaluate_design,
    optimize,
    run_switching_time,
    solve_center_distance,
)
from switchsim.optimizer import enumerate_layouts

SLIP_REF = 1.0 - 1.8 / (122.6 / 19.8)
PSI_REF = math.radians(9.9)


@pytest.fixture(scope="module")
def motor():
    return Config().plant().motor


def singleton_space(**overrides):
    base = dict(
        drive_teeth=(20,),
        switch_teeth=(16,),
        driven_teeth=(20,),
        modules=(1.0,),
        half_angles=(math.radians(25.0),),
        psi_star_targets=(PSI_REF,),
    )
    base.update(overrides)
    return DesignSpace(**base)


class TestEvaluateDesign:
    def test_reference_time(self, ref_layout, motor):
        result = evaluate_design(ref_layout, SLIP_REF, motor)
        assert result.predicted_t_switch_ms == pytest.approx(302.0, abs=1e-6)
        assert math.degrees(result.theta_track) == pytest.approx(19.8, abs=1e-9)
        assert result.k_eff == pytest.approx(122.6 / 19.8, abs=1e-9)
        assert result.driven_ratio == pytest.approx(1.0)

    def test_zero_slip_triangular_branch(self, ref_layout, motor):
        # Travel shrinks to 1.8 * 19.8 = 35.64 deg, below v^2/a: triangular.
        result = evaluate_design(ref_layout, 0.0, motor)
        travel = 1.8 * 19.8
        assert travel < motor.max_output_speed**2 / motor.profile_accel
        expected_ms = 2000.0 * math.sqrt(travel / motor.profile_accel)
        assert result.predicted_t_switch_ms == pytest.approx(expected_ms, abs=1e-9)
        assert result.predicted_t_switch_ms == pytest.approx(161.5, abs=0.05)

    def test_invalid_layout_rejected(self, ref_layout, motor):
        bad = replace(ref_layout, driven_center_distance=0.0)
        with pytest.raises(InvalidDesign) as exc:
            evaluate_design(bad, SLIP_REF, motor)
        assert not exc.value.report.ok

    def test_matches_simulation_small_switch(self, motor):
        # Resize the switch gear, re-solve D for the same endpoint policy,
        # and check the closed-form prediction against the stepped plant.
        cfg = Config(
            switch_teeth=10, slip=SLIP_REF, profile_accel=motor.profile_accel
        )
        plant = cfg.plant()
        expected_d = solve_center_distance(
            GearSpec(20, 1.0), GearSpec(10, 1.0), GearSpec(20, 1.0),
            math.radians(25.0), PSI_REF,
        )
        assert plant.layout.driven_center_distance == pytest.approx(expected_d)

        result = evaluate_design(plant.layout, SLIP_REF, plant.motor)
        stats = run_switching_time(plant, n_trials=1, jitter=False)
        assert abs(result.predicted_t_switch_ms - stats.mean_up_ms) < 1.0

    def test_module_scale_invariance(self, motor):
        t = {}
        for module in (1.0, 2.0):
            space = singleton_space(modules=(module,))
            result = optimize(space, DesignConstraints(), SLIP_REF, motor)[0]
            t[module] = (
                result.predicted_t_switch_ms,
                result.theta_track,
                result.k_eff,
            )
        assert t[1.0][0] == pytest.approx(t[2.0][0], abs=1e-9)
        assert t[1.0][1] == pytest.approx(t[2.0][1], abs=1e-12)
        assert t[1.0][2] == pytest.approx(t[2.0][2], abs=1e-12)


class TestOptimize:
    def test_singleton_space(self, motor):
        results = optimize(singleton_space(), DesignConstraints(), SLIP_REF, motor)
        assert len(results) == 1
        assert results[0].predicted_t_switch_ms == pytest.approx(302.0, abs=1e-6)

    def test_ranking_matches_independent_rescan(self, motor):
        space = DesignSpace(
            drive_teeth=tuple(range(16, 25, 2)),
            switch_teeth=tuple(range(8, 17, 2)),
            driven_teeth=tuple(range(16, 25, 2)),
            modules=(0.8, 1.0),
            half_angles=(math.radians(20.0), math.radians(30.0)),
            psi_star_targets=(math.radians(6.0), math.radians(10.0)),
            envelope_max_diameter=120.0,
        )
        constraints = DesignConstraints(driven_ratio_min=0.7, driven_ratio_max=1.4)
        ranked = optimize(space, constraints, SLIP_REF, motor)

        # Independent re-scan: plain enumeration, filter, sort.
        rescan = []
        for layout in enumerate_layouts(space):
            try:
                r = evaluate_design(layout, SLIP_REF, motor)
            except InvalidDesign:
                continue
            if r.envelope > 120.0 or not (0.7 <= r.driven_ratio <= 1.4):
                continue
            rescan.append(r)
        rescan.sort(key=lambda r: r.sort_key)

        assert len(ranked) == len(rescan) > 0
        assert [r.layout for r in ranked] == [r.layout for r in rescan]
        best = round(ranked[0].predicted_t_switch_ms, 9)
        assert all(best <= round(r.predicted_t_switch_ms, 9) for r in rescan)

    def test_space_too_large(self, motor):
        space = singleton_space(drive_teeth=tuple(range(8, 30)))
        with pytest.raises(SpaceTooLarge):
            optimize(space, DesignConstraints(cap=10), SLIP_REF, motor)

    def test_empty_feasible_set(self, motor):
        space = singleton_space(envelope_max_diameter=1.0)
        with pytest.raises(EmptyFeasibleSet):
            optimize(space, DesignConstraints(), SLIP_REF, motor)

    def test_deterministic_tie_break(self, motor):
        # Identical ratios/angles across modules tie on time; envelope breaks it.
        space = singleton_space(modules=(1.0, 0.5))
        results = optimize(space, DesignConstraints(), SLIP_REF, motor)
        assert len(results) == 2
        assert results[0].predicted_t_switch_ms == pytest.approx(
            results[1].predicted_t_switch_ms, abs=1e-9
        )
        assert results[0].envelope < results[1].envelope


class TestDesignSpace:
    def test_size(self):
        space = singleton_space(drive_teeth=(16, 20), modules=(0.5, 1.0))
        assert space.size == 4

    def test_rejects_small_teeth(self):
        with pytest.raises(ValueError):
            singleton_space(switch_teeth=(6,))

    def test_rejects_empty_axis(self):
        with pytest.raises(ValueError):
            singleton_space(modules=())

    def test_requires_exactly_one_distance_policy(self):
        with pytest.raises(ValueError):
            singleton_space(center_distances=(34.76,))
        with pytest.raises(ValueError):
            DesignSpace(
                drive_teeth=(20,),
                switch_teeth=(16,),
                driven_teeth=(20,),
                modules=(1.0,),
                half_angles=(math.radians(25.0),),
            )

    def test_center_distance_grid_mode(self, motor):
        space = singleton_space(
            psi_star_targets=None,
            center_distances=(34.757014711652,),
        )
        results = optimize(space, DesignConstraints(), SLIP_REF, motor)
        assert math.degrees(results[0].theta_track) == pytest.approx(19.8, abs=1e-6)
