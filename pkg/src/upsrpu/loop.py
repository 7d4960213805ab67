"""Fixed-timestep executor wiring force sensing, the admittance filter,
the singularity-avoidance layer, the actuator servos and the sensors into
one deterministic control cascade.

Tick order (complemented mode):
    force sample -> force error -> gate by last tick's ext_pin ->
    admittance step -> adapted reference pose -> avoidance step
    (joint command + new ext_pin) -> plant substeps -> pose capture.
Conventional mode skips the avoidance layer: the joint command is plain
inverse kinematics of the adapted reference and the force error is never
gated.  Everything runs on simulated time; a pacer callback can slow the
loop to wall-clock for interactive sessions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .admittance import AdmittanceModel, AdmittanceState, compose_reference
from .avoidance import AvoidanceState, avoidance_step
from .config import ScenarioConfig
from .kinematics import DegeneratePoseError, joint_lengths
from .plant import (
    ForceSensor,
    InteractiveForceSource,
    Plant,
    PoseSensor,
    SimulationFault,
)
from .screws import omega_indices


@dataclass
class LogRecord:
    """One control-tick snapshot; vectors are plain lists for serialization."""

    tick: int
    t: float
    f_c: list
    e_f: list
    offset: list  # admittance offset (delta X)
    x_r: list
    x_a: list
    q_ref: list  # IK of the adapted reference (q_ind_a)
    q_cmd: list  # avoidance-deviated command (q_ind_d)
    q_meas: list  # actuator lengths reached (q_ind_c)
    x_meas: list  # pose sensor reading (X_c)
    x_true: list  # plant pose after the tick
    min_omega_ref: float
    min_omega_meas: float
    pair: str  # responsible actuator pair of the measured-pose minimum
    delta_steps: list
    ext_pin: int
    u: list
    events: list = field(default_factory=list)


FIELD_ORDER = [
    "tick", "t", "f_c", "e_f", "offset", "x_r", "x_a", "q_ref", "q_cmd",
    "q_meas", "x_meas", "x_true", "min_omega_ref", "min_omega_meas",
    "pair", "delta_steps", "ext_pin", "u", "events",
]


class ScenarioRunner:
    """Owns all controller and plant state; one tick() per control period.

    Interactive commands (force targets, reset) are applied atomically at
    tick boundaries through the queue_* methods; a telemetry sink receives
    each finished LogRecord and must never block.
    """

    def __init__(self, config: ScenarioConfig, telemetry=None):
        self.config = config
        self.telemetry = telemetry
        self.records: list[LogRecord] = []
        self._pending_force = None
        self._pending_reset = False
        self._had_deviation = False
        self.reset()

    def reset(self):
        config = self.config
        self.rng = np.random.default_rng(config.seed)
        self.tick_index = 0
        self.finished = False
        self.fault: str | None = None
        self.records = []
        self._breach_seen = False
        self._had_deviation = False
        self.admittance = AdmittanceModel(config.admittance)
        self.adm_state = AdmittanceState.zero()
        self.av_state = AvoidanceState()
        self.ext_pin = 1
        start = config.reference_at(0.0)
        self.plant = Plant(
            config.geometry,
            servo=config.servo,
            params=config.plant,
            initial_pose=start,
        )
        self.pose_sensor = PoseSensor(config.pose_sensor, self.rng, start)
        self.force_sensor = ForceSensor(config.force_sensor, self.rng)
        if config.force_source == "interactive":
            self.force_source = InteractiveForceSource()
        else:
            self.force_source = config.force_script
        self.n_ticks = int(round(config.duration / config.control_period))

    def queue_force(self, value):
        self._pending_force = np.asarray(value, dtype=float).copy()

    def queue_reset(self):
        self._pending_reset = True

    def tick(self) -> LogRecord | None:
        """Run one control period; returns the record, or None when done."""
        if self.finished:
            return None
        if self._pending_reset:
            self._pending_reset = False
            self.reset()
        if self._pending_force is not None and isinstance(
            self.force_source, InteractiveForceSource
        ):
            self.force_source.set_target(self._pending_force)
            self._pending_force = None

        config = self.config
        dt = config.control_period
        t = self.tick_index * dt
        events: list[str] = []

        f_c = self.force_sensor.sample(self.force_source.value(t))
        e_f = config.reference_force - f_c
        if config.mode == "complemented":
            gated = e_f * self.ext_pin
        else:
            gated = e_f
        self.admittance.step(self.adm_state, gated, dt)
        x_r = config.reference_at(t)
        x_a = compose_reference(x_r, self.adm_state.offset)
        x_meas = self.pose_sensor.read(t)

        try:
            if config.mode == "complemented":
                step = avoidance_step(
                    x_a, x_meas, self.av_state, config.avoidance, config.geometry
                )
                q_ref = step.reference_joints
                q_cmd = step.command
                new_ext_pin = step.ext_pin
                omega_ref = step.omega_ref
                omega_meas = step.omega_meas
                if np.any(self.av_state.delta_steps != 0):
                    self._had_deviation = True
                elif self._had_deviation:
                    self._had_deviation = False
                    events.append("return-complete")
            else:
                q_ref = joint_lengths(x_a, config.geometry)
                q_cmd = q_ref.copy()
                new_ext_pin = 1
                omega_ref = omega_indices(x_a, config.geometry)
                omega_meas = omega_indices(x_meas, config.geometry)

            if new_ext_pin == 0 and self.ext_pin == 1:
                events.append("avoidance-enter")
            elif new_ext_pin == 1 and self.ext_pin == 0:
                events.append("avoidance-exit")

            observer = lambda rel, pose: self.pose_sensor.observe(t + rel, pose)
            u = self.plant.step(q_cmd, dt, observer=observer)
        except (SimulationFault, DegeneratePoseError) as exc:
            self.fault = str(exc)
            events.append("fault")
            record = self._record(t, f_c, e_f, x_r, x_a, None, None, None,
                                  x_meas, None, None, self.ext_pin, events)
            self._emit(record)
            self.finished = True
            return record

        if self.plant.breached and not self._breach_seen:
            self._breach_seen = True
            events.append("breach")

        record = self._record(
            t, f_c, e_f, x_r, x_a, q_ref, q_cmd, u, x_meas, omega_ref,
            omega_meas, new_ext_pin, events,
        )
        self._emit(record)
        self.ext_pin = new_ext_pin
        self.tick_index += 1
        if self.tick_index >= self.n_ticks:
            self.finished = True
        return record

    def _record(self, t, f_c, e_f, x_r, x_a, q_ref, q_cmd, u, x_meas,
                omega_ref, omega_meas, ext_pin, events) -> LogRecord:
        none4 = [None] * 4
        return LogRecord(
            tick=self.tick_index,
            t=round(t, 9),
            f_c=list(map(float, f_c)),
            e_f=list(map(float, e_f)),
            offset=list(map(float, self.adm_state.offset)),
            x_r=list(map(float, x_r.as_array())),
            x_a=list(map(float, x_a.as_array())),
            q_ref=list(map(float, q_ref)) if q_ref is not None else none4,
            q_cmd=list(map(float, q_cmd)) if q_cmd is not None else none4,
            q_meas=list(map(float, self.plant.joints)),
            x_meas=list(map(float, x_meas.as_array())),
            x_true=list(map(float, self.plant.pose.as_array())),
            min_omega_ref=float(omega_ref.min_value) if omega_ref else float("nan"),
            min_omega_meas=float(omega_meas.min_value) if omega_meas else float("nan"),
            pair=omega_meas.pair_label() if omega_meas else "",
            delta_steps=[int(v) for v in self.av_state.delta_steps],
            ext_pin=int(ext_pin if self.config.mode == "complemented" else 1),
            u=list(map(float, u)) if u is not None else none4,
            events=events,
        )

    def _emit(self, record: LogRecord):
        self.records.append(record)
        if self.telemetry is not None:
            self.telemetry(record)

    def run(self):
        while not self.finished:
            self.tick()
        return self.records


@dataclass
class ScenarioResult:
    records: list[LogRecord]
    report: dict
    fault: str | None


def run_scenario(config: ScenarioConfig, telemetry=None, pacer=None) -> ScenarioResult:
    """Execute a scenario to completion and compute its metrics report.

    pacer, when given, is called with the control period after every tick
    (wall-clock pacing for demonstration runs)."""
    from .metrics import metrics_report

    runner = ScenarioRunner(config, telemetry=telemetry)
    while not runner.finished:
        runner.tick()
        if pacer is not None:
            pacer(config.control_period)
    report = metrics_report(runner.records, config)
    return ScenarioResult(records=runner.records, report=report, fault=runner.fault)
