"""Time-stepped simulation of the single-motor antagonist test rig.

The model is quasi-static: the motor follows its commanded motion profile,
the switch state machine routes motor rotation to at most one spool, winding
the engaged cable moves the joint through that cable's path law, and the
disengaged cable stays taut on its spring-loaded spool at whatever length
its own path dictates. No inertia, elasticity or dynamic friction.

Units: motor angles and speeds in output-shaft degrees; switch/joint angles
in radians; lengths mm; forces N; times s.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, replace

from .errors import NeverEngaged, RangeExceeded, SlackDetected
from .geometry import EngagementSolution, MechanismLayout
from .motion import TrapezoidalProfile
from .paths import CablePath, OutOfRange
from .switching import (
    Event,
    EventKind,
    Side,
    SwitchState,
    TraversalModel,
    step_switch,
)

DEFAULT_DT = 1e-3  # s; resolves 300 ms phenomena to 0.3 %


class ControlMode(enum.Enum):
    PROFILE_POSITION = "position"
    PROFILE_VELOCITY = "velocity"


@dataclass(frozen=True)
class MotorModel:
    """Gearmotor seen at the gearhead output shaft."""

    max_output_speed: float = 720.0    # deg/s (120 rpm)
    gearhead_ratio: float = 43.0
    profile_accel: float = math.inf    # deg/s^2; calibrated in the reference config
    control_mode: ControlMode = ControlMode.PROFILE_POSITION

    def __post_init__(self):
        if not (self.max_output_speed > 0):
            raise ValueError(f"max_output_speed must be positive, got {self.max_output_speed!r}")
        if not (self.profile_accel > 0):
            raise ValueError(f"profile_accel must be positive, got {self.profile_accel!r}")
        if not (self.gearhead_ratio >= 1):
            raise ValueError(f"gearhead_ratio must be >= 1, got {self.gearhead_ratio!r}")


def profile_position_move(motor: MotorModel, delta: float) -> TrapezoidalProfile:
    """Plan a Profile-Position move of ``delta`` output degrees.

    Accelerates at the motor's profile acceleration to at most its speed
    limit, cruises, and decelerates to rest, covering exactly |delta|;
    degenerates to a triangular profile for short moves.
    """
    return TrapezoidalProfile.plan(delta, motor.max_output_speed, motor.profile_accel)


@dataclass(frozen=True)
class SpoolModel:
    """Spring-loaded spool (clock spring merged with the string-pot spring)."""

    spool_radius: float = 10.0           # mm
    spring_preload_torque: float = 5.0   # N*mm at the reference payout
    spring_rate: float = 0.05            # N*mm per deg of unwind
    payout_at_zero: float = 0.0          # mm of payout at zero spring wind-up

    def __post_init__(self):
        if not (self.spool_radius > 0):
            raise ValueError(f"spool_radius must be positive, got {self.spool_radius!r}")
        if not (self.spring_preload_torque > 0):
            raise ValueError("spring_preload_torque must be positive (tension never zero)")

    def tension(self, payout: float) -> float:
        """Cable tension (N) with ``payout`` mm paid out."""
        unwound_deg = math.degrees((payout - self.payout_at_zero) / self.spool_radius)
        return (self.spring_preload_torque + self.spring_rate * unwound_deg) / self.spool_radius


@dataclass(frozen=True)
class PlantConfig:
    """Everything the stepper needs, with the engagement solution precomputed."""

    layout: MechanismLayout
    engagement: EngagementSolution
    traversal: TraversalModel
    motor: MotorModel
    path_plus: CablePath
    path_minus: CablePath
    spool_plus: SpoolModel
    spool_minus: SpoolModel
    dt: float = DEFAULT_DT
    seed: int = 0

    def path(self, side: Side) -> CablePath:
        return self.path_plus if side is Side.PLUS else self.path_minus

    def spool(self, side: Side) -> SpoolModel:
        return self.spool_plus if side is Side.PLUS else self.spool_minus

    @property
    def spool_ratio(self) -> float:
        return self.layout.driven_speed_ratio


@dataclass(frozen=True, slots=True)
class SimState:
    t: float
    motor_angle: float        # deg, output shaft
    switch: SwitchState
    joint_angle: float        # rad, in [-pi/2, +pi/2]
    payout_plus: float        # mm
    payout_minus: float       # mm
    tension_plus: float       # N
    tension_minus: float      # N
    disturbance_plus: float = 0.0   # mm of extra payout injected on this side
    disturbance_minus: float = 0.0


@dataclass(frozen=True, slots=True)
class TimedEvent:
    t: float
    kind: EventKind
    side: Side | None
    psi: float


def _payouts(config: PlantConfig, joint_angle: float, dist_plus: float, dist_minus: float):
    payout_plus = config.path_plus.length(joint_angle) + dist_plus
    payout_minus = config.path_minus.length(-joint_angle) + dist_minus
    return payout_plus, payout_minus


def initial_state(
    config: PlantConfig,
    joint_angle: float = 0.0,
    engaged: Side | None = Side.PLUS,
) -> SimState:
    """Rest state: motor at zero, cables taut at the given joint angle."""
    if engaged is None:
        switch = SwitchState.neutral()
    else:
        switch = SwitchState.engaged(engaged, config.engagement)
    payout_plus, payout_minus = _payouts(config, joint_angle, 0.0, 0.0)
    return SimState(
        t=0.0,
        motor_angle=0.0,
        switch=switch,
        joint_angle=joint_angle,
        payout_plus=payout_plus,
        payout_minus=payout_minus,
        tension_plus=config.spool_plus.tension(payout_plus),
        tension_minus=config.spool_minus.tension(payout_minus),
    )


def step_plant(
    state: SimState,
    config: PlantConfig,
    dt: float,
    motor_delta: float = 0.0,
    disturbance_plus: float | None = None,
    disturbance_minus: float | None = None,
) -> tuple[SimState, list[Event]]:
    """Advance the plant by one step of ``dt`` with the given motor increment.

    Routes ``motor_delta`` (output-shaft degrees) through the switch state
    machine; any resulting spool rotation winds/unwinds the engaged cable,
    the engaged path law is inverted to get the new joint angle, and the
    disengaged payout follows its own law at that angle plus any injected
    disturbance. While traversing or neutral the joint is untouched
    (transparency).

    Raises:
        RangeExceeded: joint driven outside [-pi/2, +pi/2] (timestamped).
        SlackDetected: a tension reached zero (timestamped).
    """
    if not (dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    t1 = state.t + dt
    dist_plus = state.disturbance_plus if disturbance_plus is None else disturbance_plus
    dist_minus = state.disturbance_minus if disturbance_minus is None else disturbance_minus

    switch, events = step_switch(
        state.switch,
        config.traversal,
        config.engagement,
        math.radians(motor_delta),
        spool_ratio=config.spool_ratio,
    )

    joint_angle = state.joint_angle
    spool_rotation = 0.0
    driven_side: Side | None = None
    for event in events:
        if event.kind is EventKind.SPOOL_DRIVEN:
            spool_rotation += event.spool_rotation
            driven_side = event.side
    if driven_side is not None and spool_rotation != 0.0:
        sign = driven_side.sign
        path = config.path(driven_side)
        length0 = path.length(sign * joint_angle)
        length1 = length0 - sign * config.spool(driven_side).spool_radius * spool_rotation
        try:
            joint_angle = sign * path.inverse(length1)
        except OutOfRange as exc:
            raise RangeExceeded(
                f"joint left [-90, +90] deg at t={t1:.6f} s: {exc}"
            ) from exc

    payout_plus, payout_minus = _payouts(config, joint_angle, dist_plus, dist_minus)
    tension_plus = config.spool_plus.tension(payout_plus)
    tension_minus = config.spool_minus.tension(payout_minus)
    if tension_plus <= 0.0 or tension_minus <= 0.0:
        side = "plus" if tension_plus <= 0.0 else "minus"
        raise SlackDetected(f"{side} cable tension reached zero at t={t1:.6f} s")

    new_state = SimState(
        t=t1,
        motor_angle=state.motor_angle + motor_delta,
        switch=switch,
        joint_angle=joint_angle,
        payout_plus=payout_plus,
        payout_minus=payout_minus,
        tension_plus=tension_plus,
        tension_minus=tension_minus,
        disturbance_plus=dist_plus,
        disturbance_minus=dist_minus,
    )
    return new_state, events


# --------------------------------------------------------------------------
# Scripts


@dataclass(frozen=True)
class MoveMotorTo:
    """Profile-Position move to an absolute output-shaft angle (deg)."""

    angle: float


@dataclass(frozen=True)
class SetVelocity:
    """Constant-rate motion (deg/s) until the next command; 0 stops."""

    rate: float


@dataclass(frozen=True)
class Wait:
    """Let the simulation run for ``duration`` seconds."""

    duration: float


@dataclass(frozen=True)
class DisturbancePulses:
    """Random rectangular pulses of extra payout on a target cable.

    target: 'plus', 'minus' (gated to apply only while that side is
        disengaged), 'disengaged' (whichever side(s) currently are), or
        'engaged' (negative control; deliberately corrupts the engaged
        reading).
    """

    target: str = "disengaged"
    magnitude: float = 5.0   # mm
    width: float = 0.05      # s each pulse lasts
    min_gap: float = 0.05    # s between pulses, lower bound
    max_gap: float = 0.25    # s between pulses, upper bound

    def __post_init__(self):
        if self.target not in ("plus", "minus", "engaged", "disengaged"):
            raise ValueError(f"unknown disturbance target {self.target!r}")
        if self.magnitude < 0:
            raise ValueError("disturbance magnitude must be non-negative")
        if not (self.width > 0 and 0 < self.min_gap <= self.max_gap):
            raise ValueError("pulse width and gaps must be positive, min_gap <= max_gap")


@dataclass(frozen=True)
class InjectDisturbance:
    """Start a disturbance signal (non-blocking); ``profile=None`` stops it."""

    profile: DisturbancePulses | None


ScriptCommand = MoveMotorTo | SetVelocity | Wait | InjectDisturbance


class _PulseState:
    """Steps a seeded on/off pulse process; deterministic for a given seed."""

    def __init__(self, profile: DisturbancePulses, seed: int):
        self.profile = profile
        self._rng = random.Random(seed)
        self._remaining = self._rng.uniform(profile.min_gap, profile.max_gap)
        self._on = False

    def step(self, dt: float) -> float:
        self._remaining -= dt
        while self._remaining <= 0.0:
            self._on = not self._on
            if self._on:
                self._remaining += self.profile.width
            else:
                self._remaining += self._rng.uniform(
                    self.profile.min_gap, self.profile.max_gap
                )
        return self.profile.magnitude if self._on else 0.0


# --------------------------------------------------------------------------
# Trace


TRACE_COLUMNS = (
    "t_s",
    "motor_deg",
    "psi_deg",
    "mode",
    "joint_deg",
    "payout_plus_mm",
    "payout_minus_mm",
    "tension_plus_N",
    "tension_minus_N",
)

EVENT_COLUMNS = ("t_s", "kind", "detail")


@dataclass
class Trace:
    """Fixed-step samples plus the engagement event log."""

    dt: float
    rows: list[SimState]
    events: list[TimedEvent]

    def to_csv(self) -> str:
        lines = [",".join(TRACE_COLUMNS)]
        for s in self.rows:
            lines.append(
                ",".join(
                    (
                        repr(s.t),
                        repr(s.motor_angle),
                        repr(math.degrees(s.switch.psi)),
                        s.switch.mode.value,
                        repr(math.degrees(s.joint_angle)),
                        repr(s.payout_plus),
                        repr(s.payout_minus),
                        repr(s.tension_plus),
                        repr(s.tension_minus),
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def events_to_csv(self) -> str:
        lines = [",".join(EVENT_COLUMNS)]
        for e in self.events:
            side = e.side.value if e.side is not None else ""
            detail = f"side={side} psi_deg={math.degrees(e.psi)!r}"
            lines.append(f"{e.t!r},{e.kind.value},{detail}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Simulator


class Simulator:
    """Owns the motor schedule and drives the pure plant stepper.

    Stepping happens on a fixed grid t_k = k*dt. Engagement events are
    timestamped inside a step by inverting the motion profile, so event
    times are exact, not quantized to dt.
    """

    def __init__(
        self,
        config: PlantConfig,
        joint_angle: float = 0.0,
        engaged: Side | None = Side.PLUS,
        record: bool = True,
    ):
        self.config = config
        self.state = initial_state(config, joint_angle, engaged)
        self.record = record
        self.trace = Trace(dt=config.dt, rows=[self.state] if record else [], events=[])
        self._step_index = 0
        self._profile: TrapezoidalProfile | None = None
        self._profile_t0 = 0.0
        self._velocity = 0.0
        self._pulses: _PulseState | None = None
        self._n_injections = 0

    @property
    def t(self) -> float:
        return self._step_index * self.config.dt

    # -- commands ----------------------------------------------------------

    def move_motor_to(self, target: float) -> float:
        """Run a Profile-Position move to ``target`` deg; returns the command time."""
        t_cmd = self.t
        self._velocity = 0.0
        delta = target - self.state.motor_angle
        profile = profile_position_move(self.config.motor, delta)
        self._profile = profile
        self._profile_t0 = t_cmd
        n_steps = math.ceil(profile.duration / self.config.dt - 1e-12)
        for _ in range(max(n_steps, 0)):
            self._step()
        self._profile = None
        return t_cmd

    def set_velocity(self, rate: float) -> None:
        if abs(rate) > self.config.motor.max_output_speed:
            raise ValueError(
                f"velocity {rate!r} deg/s exceeds the modeled limit "
                f"{self.config.motor.max_output_speed} deg/s"
            )
        self._profile = None
        self._velocity = rate

    def wait(self, duration: float) -> None:
        for _ in range(max(round(duration / self.config.dt), 0)):
            self._step()

    def inject(self, profile: DisturbancePulses | None) -> None:
        if profile is None:
            self._pulses = None
            return
        self._n_injections += 1
        self._pulses = _PulseState(profile, self.config.seed + 7919 * self._n_injections)

    def execute(self, command: ScriptCommand) -> None:
        if isinstance(command, MoveMotorTo):
            self.move_motor_to(command.angle)
        elif isinstance(command, SetVelocity):
            self.set_velocity(command.rate)
        elif isinstance(command, Wait):
            self.wait(command.duration)
        elif isinstance(command, InjectDisturbance):
            self.inject(command.profile)
        else:
            raise TypeError(f"unknown script command {command!r}")

    def run_until_engaged(self, side: Side, timeout: float) -> float:
        """Step (velocity mode) until the switch engages ``side``; event time.

        Raises:
            NeverEngaged: timeout elapsed first.
        """
        deadline = self.t + timeout
        start = len(self.trace.events)
        while self.t < deadline:
            self._step()
            for event in self.trace.events[start:]:
                if event.kind is EventKind.ENGAGED and event.side is side:
                    return event.t
            start = len(self.trace.events)
        raise NeverEngaged(
            f"switch did not engage {side.value} within {timeout} s"
        )

    # -- stepping ----------------------------------------------------------

    def _motor_delta(self, t0: float, t1: float) -> float:
        if self._profile is not None:
            return self._profile.position(t1 - self._profile_t0) - self._profile.position(
                t0 - self._profile_t0
            )
        if self._velocity != 0.0:
            return self._velocity * self.config.dt
        return 0.0

    def _disturbances(self, value: float) -> tuple[float, float]:
        """Map the signal value onto (plus, minus) per target and gating."""
        if self._pulses is None or value == 0.0:
            return 0.0, 0.0
        target = self._pulses.profile.target
        engaged = self.state.switch.engaged_side
        plus = minus = 0.0
        if target == "plus":
            plus = value if engaged is not Side.PLUS else 0.0
        elif target == "minus":
            minus = value if engaged is not Side.MINUS else 0.0
        elif target == "disengaged":
            plus = value if engaged is not Side.PLUS else 0.0
            minus = value if engaged is not Side.MINUS else 0.0
        else:  # "engaged": negative control
            if engaged is Side.PLUS:
                plus = value
            elif engaged is Side.MINUS:
                minus = value
        return plus, minus

    def _event_time(self, t0: float, motor_progress: float) -> float:
        progress_deg = abs(math.degrees(motor_progress))
        if self._profile is not None:
            covered = abs(self._profile.position(t0 - self._profile_t0))
            return self._profile_t0 + self._profile.time_at_distance(covered + progress_deg)
        if self._velocity != 0.0:
            return t0 + progress_deg / abs(self._velocity)
        return t0

    def _step(self) -> None:
        dt = self.config.dt
        t0 = self._step_index * dt
        t1 = (self._step_index + 1) * dt
        delta = self._motor_delta(t0, t1)
        signal = self._pulses.step(dt) if self._pulses is not None else 0.0
        dist_plus, dist_minus = self._disturbances(signal)
        state, events = step_plant(
            self.state,
            self.config,
            dt,
            motor_delta=delta,
            disturbance_plus=dist_plus,
            disturbance_minus=dist_minus,
        )
        state = replace(state, t=t1)
        for event in events:
            if event.kind is EventKind.SPOOL_DRIVEN:
                continue
            self.trace.events.append(
                TimedEvent(self._event_time(t0, event.motor_progress), event.kind, event.side, event.psi)
            )
        self.state = state
        self._step_index += 1
        if self.record:
            self.trace.rows.append(state)


def run_script(
    config: PlantConfig,
    script: list[ScriptCommand] | tuple[ScriptCommand, ...],
    duration: float | None = None,
    joint_angle: float = 0.0,
    engaged: Side | None = Side.PLUS,
) -> Trace:
    """Execute script commands in order; identical inputs give bit-identical traces.

    ``duration`` extends the run (with whatever motion mode is active) until
    at least that much simulated time has elapsed.
    """
    sim = Simulator(config, joint_angle=joint_angle, engaged=engaged)
    for command in script:
        sim.execute(command)
    if duration is not None and duration > sim.t:
        sim.wait(duration - sim.t)
    return sim.trace
