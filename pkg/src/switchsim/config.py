"""Line-oriented configuration: parsing, serialization, runtime builders.

Format: ``[section]`` headers, ``key = value`` lines, ``#`` comments.
Unknown sections/keys are rejected with line numbers. Every key is optional;
an empty file yields the full reference configuration. Angles are degrees in
files and radians internally; lengths mm; times s unless the key name says
ms.

The ``[script]`` section is a command list, one command per line::

    move_to 225.0          # Profile-Position move to an absolute angle, deg
    set_velocity 360.0     # constant rate, deg/s (0 stops)
    wait 0.5               # run the clock, s
    disturb disengaged 5.0 # random payout pulses: target magnitude_mm [width_s]
    disturb_off
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, SwitchSimError
from .experiments import calibrate_profile_accel
from .geometry import (
    GearSpec,
    MechanismLayout,
    REFERENCE_TRACK_TRAVEL_DEG,
    solve_center_distance,
    solve_engagement,
    validate_layout,
)
from .paths import CablePath, CurvedPath, LinearPath, TabulatedPath, X_MAX
from .plant import (
    ControlMode,
    DisturbancePulses,
    InjectDisturbance,
    MotorModel,
    MoveMotorTo,
    PlantConfig,
    ScriptCommand,
    SetVelocity,
    SpoolModel,
    Wait,
)
from .switching import TraversalModel, calibrate_slip


@dataclass(frozen=True)
class PathSpec:
    """Raw cable-path parameters as they appear in a config file."""

    kind: str = "linear"                      # linear | curved | tabulated
    reference_length: float = 300.0           # mm at zero pull angle
    moment_arm: float = 25.0                  # mm per rad
    bow: float = 0.0                          # mm (curved only)
    knots: tuple[tuple[float, float], ...] | None = None  # (deg, mm), tabulated only

    def build(self) -> CablePath:
        if self.kind == "linear":
            return LinearPath(self.reference_length, self.moment_arm)
        if self.kind == "curved":
            return CurvedPath(self.reference_length, self.moment_arm, self.bow)
        if self.kind == "tabulated":
            if not self.knots:
                raise ValueError("tabulated path requires knots")
            return TabulatedPath(tuple((math.radians(x), l) for x, l in self.knots))
        raise ValueError(f"unknown path kind {self.kind!r}")


@dataclass(frozen=True)
class Config:
    """Validated configuration; defaults reproduce the reference rig."""

    # [layout]
    drive_teeth: int = 20
    switch_teeth: int = 16
    driven_teeth: int = 20
    drive_module: float = 1.0
    switch_module: float = 1.0
    driven_module: float = 1.0
    driven_half_angle_deg: float = 25.0
    center_distance_mm: float | None = None   # None: solved from track_travel_deg
    track_travel_deg: float = REFERENCE_TRACK_TRAVEL_DEG
    backlash_margin_mm: float = 0.2
    # [traversal]
    slip: float | None = None                 # None: calibrated from the travel pair
    motor_travel_deg: float = 122.6
    revolution_travel_deg: float = 19.8
    # [motor]
    max_output_speed: float = 720.0           # deg/s
    gearhead_ratio: float = 43.0
    profile_accel: float | None = None        # deg/s^2; None: calibrated from target
    target_switch_time_ms: float = 302.0
    control_mode: str = "position"
    # [paths]
    agonist: PathSpec = field(default_factory=PathSpec)
    antagonist: PathSpec = field(default_factory=lambda: PathSpec(kind="curved", bow=5.0))
    # [spools]
    spool_radius_mm: float = 10.0
    spring_preload_nmm: float = 5.0
    spring_rate_nmm_per_deg: float = 0.05
    payout_at_zero_mm: float | None = None    # None: path length at +90 deg
    # [sim]
    dt_s: float = 1e-3
    seed: int = 0
    # [script]
    script: tuple[ScriptCommand, ...] = ()

    # -- builders ------------------------------------------------------------

    def layout(self) -> MechanismLayout:
        driving = GearSpec(self.drive_teeth, self.drive_module)
        switch = GearSpec(self.switch_teeth, self.switch_module)
        driven = GearSpec(self.driven_teeth, self.driven_module)
        if self.center_distance_mm is not None:
            d = self.center_distance_mm
        else:
            d = solve_center_distance(
                driving, switch, driven,
                math.radians(self.driven_half_angle_deg),
                math.radians(self.track_travel_deg / 2.0),
            )
        return MechanismLayout(
            driving=driving,
            switch=switch,
            driven=driven,
            driven_center_distance=d,
            driven_half_angle=math.radians(self.driven_half_angle_deg),
            backlash_margin=self.backlash_margin_mm,
        )

    def traversal(self, layout: MechanismLayout | None = None) -> TraversalModel:
        layout = layout or self.layout()
        carry = 1.0 + layout.switch.pitch_radius / layout.driving.pitch_radius
        if self.slip is not None:
            return TraversalModel(carry_ratio=carry, slip=self.slip)
        return calibrate_slip(self.motor_travel_deg, self.revolution_travel_deg, carry)

    def motor(self, layout: MechanismLayout | None = None) -> MotorModel:
        if self.profile_accel is not None:
            accel = self.profile_accel
        else:
            layout = layout or self.layout()
            travel = math.degrees(
                self.traversal(layout).effective_ratio
                * solve_engagement(layout).theta_track
            )
            accel = calibrate_profile_accel(
                self.target_switch_time_ms / 1000.0, travel, self.max_output_speed
            )
        return MotorModel(
            max_output_speed=self.max_output_speed,
            gearhead_ratio=self.gearhead_ratio,
            profile_accel=accel,
            control_mode=ControlMode(self.control_mode),
        )

    def spool(self, path: CablePath) -> SpoolModel:
        payout_at_zero = self.payout_at_zero_mm
        if payout_at_zero is None:
            payout_at_zero = path.length(X_MAX)  # fully wound end: spring taut over the RoM
        return SpoolModel(
            spool_radius=self.spool_radius_mm,
            spring_preload_torque=self.spring_preload_nmm,
            spring_rate=self.spring_rate_nmm_per_deg,
            payout_at_zero=payout_at_zero,
        )

    def plant(self) -> PlantConfig:
        layout = self.layout()
        path_plus = self.agonist.build()
        path_minus = self.antagonist.build()
        return PlantConfig(
            layout=layout,
            engagement=solve_engagement(layout),
            traversal=self.traversal(layout),
            motor=self.motor(layout),
            path_plus=path_plus,
            path_minus=path_minus,
            spool_plus=self.spool(path_plus),
            spool_minus=self.spool(path_minus),
            dt=self.dt_s,
            seed=self.seed,
        )


# -----------------------------------------------------------------------------
# Parsing

_LAYOUT_KEYS = {
    "drive_teeth": int,
    "switch_teeth": int,
    "driven_teeth": int,
    "module_mm": float,
    "drive_module_mm": float,
    "switch_module_mm": float,
    "driven_module_mm": float,
    "driven_half_angle_deg": float,
    "center_distance_mm": float,
    "track_travel_deg": float,
    "backlash_margin_mm": float,
}
_TRAVERSAL_KEYS = {"slip": float, "motor_travel_deg": float, "revolution_travel_deg": float}
_MOTOR_KEYS = {
    "max_output_speed_deg_s": float,
    "gearhead_ratio": float,
    "profile_accel_deg_s2": float,
    "target_switch_time_ms": float,
    "control_mode": str,
}
_PATH_KEYS = {
    "kind": str,
    "reference_length_mm": float,
    "moment_arm_mm": float,
    "bow_mm": float,
    "knots": str,
}
_SPOOL_KEYS = {
    "spool_radius_mm": float,
    "spring_preload_nmm": float,
    "spring_rate_nmm_per_deg": float,
    "payout_at_zero_mm": float,
}
_SIM_KEYS = {"dt_s": float, "seed": int}

_SECTIONS = ("layout", "traversal", "motor", "paths", "spools", "sim", "script")


def _parse_knots(text: str) -> tuple[tuple[float, float], ...]:
    """'x_deg:length_mm, x_deg:length_mm, ...' pairs."""
    knots = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        angle, _, length = token.partition(":")
        knots.append((float(angle), float(length)))
    return tuple(knots)


def _parse_script_line(line: str) -> ScriptCommand:
    tokens = line.split()
    name, args = tokens[0], tokens[1:]
    if name == "move_to" and len(args) == 1:
        return MoveMotorTo(float(args[0]))
    if name == "set_velocity" and len(args) == 1:
        return SetVelocity(float(args[0]))
    if name == "wait" and len(args) == 1:
        return Wait(float(args[0]))
    if name == "disturb" and len(args) in (2, 3):
        width = float(args[2]) if len(args) == 3 else 0.05
        return InjectDisturbance(
            DisturbancePulses(target=args[0], magnitude=float(args[1]), width=width)
        )
    if name == "disturb_off" and not args:
        return InjectDisturbance(None)
    raise ValueError(f"unrecognized script command {line!r}")


def _serialize_script_command(cmd: ScriptCommand) -> str:
    if isinstance(cmd, MoveMotorTo):
        return f"move_to {cmd.angle!r}"
    if isinstance(cmd, SetVelocity):
        return f"set_velocity {cmd.rate!r}"
    if isinstance(cmd, Wait):
        return f"wait {cmd.duration!r}"
    if isinstance(cmd, InjectDisturbance):
        if cmd.profile is None:
            return "disturb_off"
        p = cmd.profile
        return f"disturb {p.target} {p.magnitude!r} {p.width!r}"
    raise TypeError(f"unknown script command {cmd!r}")


class _Parser:
    def __init__(self, text: str):
        self.errors: list[tuple[int, str]] = []
        self.values: dict[tuple[str, str], object] = {}
        self.lines: dict[tuple[str, str], int] = {}
        self.script: list[ScriptCommand] = []
        self._scan(text)

    def fail(self, line_no: int, message: str) -> None:
        self.errors.append((line_no, message))

    def _key_table(self, section: str):
        if section == "layout":
            return _LAYOUT_KEYS
        if section == "traversal":
            return _TRAVERSAL_KEYS
        if section == "motor":
            return _MOTOR_KEYS
        if section == "paths":
            return None  # handled via prefixes
        if section == "spools":
            return _SPOOL_KEYS
        if section == "sim":
            return _SIM_KEYS
        return None

    def _scan(self, text: str) -> None:
        section: str | None = None
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip().lower()
                if section not in _SECTIONS:
                    self.fail(line_no, f"unknown section [{section}]")
                    section = None
                continue
            if section is None:
                self.fail(line_no, f"content outside a known section: {line!r}")
                continue
            if section == "script":
                try:
                    self.script.append(_parse_script_line(line))
                except ValueError as exc:
                    self.fail(line_no, str(exc))
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep or not key:
                self.fail(line_no, f"expected 'key = value', got {line!r}")
                continue
            self._store(section, key, value, line_no)

    def _store(self, section: str, key: str, value: str, line_no: int) -> None:
        if section == "paths":
            prefix, _, suffix = key.partition("_")
            if prefix not in ("agonist", "antagonist") or suffix not in _PATH_KEYS:
                self.fail(line_no, f"unknown key {key!r} in [paths]")
                return
            caster = _PATH_KEYS[suffix]
        else:
            table = self._key_table(section)
            if key not in table:
                self.fail(line_no, f"unknown key {key!r} in [{section}]")
                return
            caster = table[key]
        if (section, key) in self.values:
            self.fail(line_no, f"duplicate key {key!r} in [{section}]")
            return
        try:
            parsed: object
            if caster is int:
                parsed = int(value)
            elif caster is float:
                parsed = float(value)
            else:
                parsed = value
        except ValueError:
            self.fail(line_no, f"cannot parse {key} value {value!r} as {caster.__name__}")
            return
        self.values[(section, key)] = parsed
        self.lines[(section, key)] = line_no

    # -- assembly ------------------------------------------------------------

    def has(self, section: str, key: str) -> bool:
        return (section, key) in self.values

    def get(self, section: str, key: str, default):
        return self.values.get((section, key), default)

    def line(self, section: str, key: str) -> int:
        return self.lines.get((section, key), 0)

    def path_spec(self, prefix: str, default: PathSpec) -> PathSpec:
        kind = self.get("paths", f"{prefix}_kind", default.kind)
        if kind not in ("linear", "curved", "tabulated"):
            self.fail(self.line("paths", f"{prefix}_kind"), f"unknown path kind {kind!r}")
            return default
        spec = PathSpec(
            kind=kind,
            reference_length=self.get(
                "paths", f"{prefix}_reference_length_mm", default.reference_length
            ),
            moment_arm=self.get("paths", f"{prefix}_moment_arm_mm", default.moment_arm),
            bow=self.get("paths", f"{prefix}_bow_mm", default.bow if kind == "curved" else 0.0),
            knots=None,
        )
        if kind != "curved" and self.has("paths", f"{prefix}_bow_mm"):
            self.fail(
                self.line("paths", f"{prefix}_bow_mm"),
                f"{prefix}_bow_mm only applies to the curved kind",
            )
        if kind == "tabulated":
            if not self.has("paths", f"{prefix}_knots"):
                self.fail(0, f"{prefix}_kind = tabulated requires {prefix}_knots")
            else:
                try:
                    spec = replace(
                        spec, knots=_parse_knots(self.get("paths", f"{prefix}_knots", ""))
                    )
                except ValueError as exc:
                    self.fail(self.line("paths", f"{prefix}_knots"), f"bad knot table: {exc}")
        elif self.has("paths", f"{prefix}_knots"):
            self.fail(
                self.line("paths", f"{prefix}_knots"),
                f"{prefix}_knots only applies to the tabulated kind",
            )
        return spec


def parse_config(text: str) -> Config:
    """Parse and validate a configuration; all keys optional.

    Raises:
        ConfigError: every syntax, unknown-key, range and cross-field
            problem found, each with its line number.
    """
    p = _Parser(text)
    defaults = Config()

    shared_module = p.get("layout", "module_mm", None)
    base_module = shared_module if shared_module is not None else defaults.drive_module

    def module_for(key: str, fallback: float) -> float:
        return p.get("layout", key, base_module if shared_module is not None else fallback)

    cfg = replace(
        defaults,
        drive_teeth=p.get("layout", "drive_teeth", defaults.drive_teeth),
        switch_teeth=p.get("layout", "switch_teeth", defaults.switch_teeth),
        driven_teeth=p.get("layout", "driven_teeth", defaults.driven_teeth),
        drive_module=module_for("drive_module_mm", defaults.drive_module),
        switch_module=module_for("switch_module_mm", defaults.switch_module),
        driven_module=module_for("driven_module_mm", defaults.driven_module),
        driven_half_angle_deg=p.get(
            "layout", "driven_half_angle_deg", defaults.driven_half_angle_deg
        ),
        center_distance_mm=p.get("layout", "center_distance_mm", None),
        track_travel_deg=p.get("layout", "track_travel_deg", defaults.track_travel_deg),
        backlash_margin_mm=p.get("layout", "backlash_margin_mm", defaults.backlash_margin_mm),
        slip=p.get("traversal", "slip", None),
        motor_travel_deg=p.get("traversal", "motor_travel_deg", defaults.motor_travel_deg),
        revolution_travel_deg=p.get(
            "traversal", "revolution_travel_deg", defaults.revolution_travel_deg
        ),
        max_output_speed=p.get("motor", "max_output_speed_deg_s", defaults.max_output_speed),
        gearhead_ratio=p.get("motor", "gearhead_ratio", defaults.gearhead_ratio),
        profile_accel=p.get("motor", "profile_accel_deg_s2", None),
        target_switch_time_ms=p.get(
            "motor", "target_switch_time_ms", defaults.target_switch_time_ms
        ),
        control_mode=p.get("motor", "control_mode", defaults.control_mode),
        agonist=p.path_spec("agonist", defaults.agonist),
        antagonist=p.path_spec("antagonist", defaults.antagonist),
        spool_radius_mm=p.get("spools", "spool_radius_mm", defaults.spool_radius_mm),
        spring_preload_nmm=p.get("spools", "spring_preload_nmm", defaults.spring_preload_nmm),
        spring_rate_nmm_per_deg=p.get(
            "spools", "spring_rate_nmm_per_deg", defaults.spring_rate_nmm_per_deg
        ),
        payout_at_zero_mm=p.get("spools", "payout_at_zero_mm", None),
        dt_s=p.get("sim", "dt_s", defaults.dt_s),
        seed=p.get("sim", "seed", defaults.seed),
        script=tuple(p.script),
    )

    # Contradictory key combinations.
    if p.has("traversal", "slip") and (
        p.has("traversal", "motor_travel_deg") or p.has("traversal", "revolution_travel_deg")
    ):
        p.fail(
            p.line("traversal", "slip"),
            "give either slip or the (motor_travel_deg, revolution_travel_deg) pair, not both",
        )
    if p.has("motor", "profile_accel_deg_s2") and p.has("motor", "target_switch_time_ms"):
        p.fail(
            p.line("motor", "profile_accel_deg_s2"),
            "give either profile_accel_deg_s2 or target_switch_time_ms, not both",
        )
    if p.has("layout", "center_distance_mm") and p.has("layout", "track_travel_deg"):
        p.fail(
            p.line("layout", "center_distance_mm"),
            "give either center_distance_mm or track_travel_deg, not both",
        )

    # Simple range checks with line attribution.
    _check_positive(p, cfg.dt_s, "sim", "dt_s")
    _check_positive(p, cfg.max_output_speed, "motor", "max_output_speed_deg_s")
    _check_positive(p, cfg.spool_radius_mm, "spools", "spool_radius_mm")
    _check_positive(p, cfg.spring_preload_nmm, "spools", "spring_preload_nmm")
    if cfg.control_mode not in ("position", "velocity"):
        p.fail(p.line("motor", "control_mode"), "control_mode must be position or velocity")
    if cfg.slip is not None and not (0.0 <= cfg.slip < 1.0):
        p.fail(p.line("traversal", "slip"), f"slip {cfg.slip} outside [0, 1)")

    # Cross-field geometry validation, delegated to the layout validator.
    if not p.errors:
        try:
            report = validate_layout(cfg.layout())
        except (SwitchSimError, ValueError) as exc:
            p.fail(0, f"layout insoluble: {exc}")
        else:
            for violation in report.violations:
                line = 0
                if violation.rule == "module-mismatch":
                    keys = [
                        k
                        for k in ("drive_module_mm", "switch_module_mm", "driven_module_mm", "module_mm")
                        if p.has("layout", k)
                    ]
                    line = max((p.line("layout", k) for k in keys), default=0)
                    named = ", ".join(keys) or "gear modules"
                    p.fail(line, f"{violation.message} (keys: {named})")
                else:
                    p.fail(line, str(violation))

    if not p.errors:
        try:
            cfg.plant()
        except (SwitchSimError, ValueError) as exc:
            p.fail(0, f"configuration cannot be instantiated: {exc}")

    if p.errors:
        raise ConfigError(sorted(p.errors))
    return cfg


def _check_positive(p: _Parser, value, section: str, key: str) -> None:
    if not (value > 0):
        p.fail(p.line(section, key), f"{key} must be positive, got {value!r}")


# -----------------------------------------------------------------------------
# Serialization


def serialize_config(cfg: Config) -> str:
    """Emit a config file that parses back to an identical Config."""
    out: list[str] = []

    out.append("[layout]")
    out.append(f"drive_teeth = {cfg.drive_teeth}")
    out.append(f"switch_teeth = {cfg.switch_teeth}")
    out.append(f"driven_teeth = {cfg.driven_teeth}")
    if cfg.drive_module == cfg.switch_module == cfg.driven_module:
        out.append(f"module_mm = {cfg.drive_module!r}")
    else:
        out.append(f"drive_module_mm = {cfg.drive_module!r}")
        out.append(f"switch_module_mm = {cfg.switch_module!r}")
        out.append(f"driven_module_mm = {cfg.driven_module!r}")
    out.append(f"driven_half_angle_deg = {cfg.driven_half_angle_deg!r}")
    if cfg.center_distance_mm is not None:
        out.append(f"center_distance_mm = {cfg.center_distance_mm!r}")
    else:
        out.append(f"track_travel_deg = {cfg.track_travel_deg!r}")
    out.append(f"backlash_margin_mm = {cfg.backlash_margin_mm!r}")

    out.append("")
    out.append("[traversal]")
    if cfg.slip is not None:
        out.append(f"slip = {cfg.slip!r}")
    else:
        out.append(f"motor_travel_deg = {cfg.motor_travel_deg!r}")
        out.append(f"revolution_travel_deg = {cfg.revolution_travel_deg!r}")

    out.append("")
    out.append("[motor]")
    out.append(f"max_output_speed_deg_s = {cfg.max_output_speed!r}")
    out.append(f"gearhead_ratio = {cfg.gearhead_ratio!r}")
    if cfg.profile_accel is not None:
        out.append(f"profile_accel_deg_s2 = {cfg.profile_accel!r}")
    else:
        out.append(f"target_switch_time_ms = {cfg.target_switch_time_ms!r}")
    out.append(f"control_mode = {cfg.control_mode}")

    out.append("")
    out.append("[paths]")
    for prefix, spec in (("agonist", cfg.agonist), ("antagonist", cfg.antagonist)):
        out.append(f"{prefix}_kind = {spec.kind}")
        out.append(f"{prefix}_reference_length_mm = {spec.reference_length!r}")
        out.append(f"{prefix}_moment_arm_mm = {spec.moment_arm!r}")
        if spec.kind == "curved":
            out.append(f"{prefix}_bow_mm = {spec.bow!r}")
        if spec.kind == "tabulated" and spec.knots:
            knots = ", ".join(f"{x!r}:{l!r}" for x, l in spec.knots)
            out.append(f"{prefix}_knots = {knots}")

    out.append("")
    out.append("[spools]")
    out.append(f"spool_radius_mm = {cfg.spool_radius_mm!r}")
    out.append(f"spring_preload_nmm = {cfg.spring_preload_nmm!r}")
    out.append(f"spring_rate_nmm_per_deg = {cfg.spring_rate_nmm_per_deg!r}")
    if cfg.payout_at_zero_mm is not None:
        out.append(f"payout_at_zero_mm = {cfg.payout_at_zero_mm!r}")

    out.append("")
    out.append("[sim]")
    out.append(f"dt_s = {cfg.dt_s!r}")
    out.append(f"seed = {cfg.seed}")

    if cfg.script:
        out.append("")
        out.append("[script]")
        for cmd in cfg.script:
            out.append(_serialize_script_command(cmd))

    return "\n".join(out) + "\n"


def load_config(path: str | None) -> Config:
    """Config from a file path, or the reference defaults when ``path`` is None."""
    if path is None:
        return Config()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
