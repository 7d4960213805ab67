"""Deviation and smoothness metrics over singularity-avoidance episodes.

An episode is a maximal run of ticks during which the avoidance layer held
the admittance gate closed (ext_pin = 0).  The deviation metrics compare
the avoidance-deviated joint command against the admittance-layer joint
reference, averaged per actuator over every sample of every episode and
then over actuators; a variant compares the reference against the actuator
lengths actually reached (tracking error) instead.
"""

from __future__ import annotations

import warnings

import numpy as np


def episodes_from_log(records) -> list[tuple[int, int]]:
    """[start, stop) tick-index intervals with ext_pin == 0."""
    episodes = []
    start = None
    for i, rec in enumerate(records):
        if rec.ext_pin == 0 and start is None:
            start = i
        elif rec.ext_pin != 0 and start is not None:
            episodes.append((start, i))
            start = None
    if start is not None:
        episodes.append((start, len(records)))
    return episodes


def _episode_records(records, episodes):
    for start, stop in episodes:
        yield from records[start:stop]


def _pair_matrix(records, episodes, variant):
    other = {"deviation": "q_cmd", "tracking": "q_meas"}[variant]
    rows = [
        np.abs(np.asarray(rec.q_ref, dtype=float) - np.asarray(getattr(rec, other), dtype=float))
        for rec in _episode_records(records, episodes)
    ]
    if not rows:
        return None
    return np.vstack(rows)  # (episode samples, actuators)


def mae(records, episodes, variant: str = "deviation") -> float | None:
    """Mean absolute error [mm] between the joint commands over episodes.

    variant "deviation": reference vs avoidance-deviated command (the
    deviation the avoidance introduces); "tracking": reference vs reached
    actuator lengths.  None when there are no episode samples.
    """
    diffs = _pair_matrix(records, episodes, variant)
    if diffs is None:
        return None
    return float(np.mean(np.mean(diffs, axis=0))) * 1e3


def mape(records, episodes, variant: str = "deviation") -> float | None:
    """Mean absolute percentage error [%] of the same pairing as mae.

    Samples with a reference length below 1e-9 m are skipped.
    """
    other = {"deviation": "q_cmd", "tracking": "q_meas"}[variant]
    per_actuator: dict[int, list[float]] = {}
    skipped = 0
    for rec in _episode_records(records, episodes):
        ref = np.asarray(rec.q_ref, dtype=float)
        cmp = np.asarray(getattr(rec, other), dtype=float)
        for i in range(len(ref)):
            per_actuator.setdefault(i, [])
            if abs(ref[i]) < 1e-9:
                skipped += 1
                continue
            per_actuator[i].append(abs((ref[i] - cmp[i]) / ref[i]))
    if skipped:
        warnings.warn(f"mape: skipped {skipped} samples with near-zero reference length")
    if not per_actuator:
        return None
    means = [np.mean(v) if v else 0.0 for v in per_actuator.values()]
    return float(np.mean(means)) * 100.0


def avr(records, episodes) -> float | None:
    """Average absolute change of the control actions between consecutive
    samples inside episodes (smoothness of the actuator effort)."""
    per_actuator: dict[int, list[float]] = {}
    for start, stop in episodes:
        chunk = records[start:stop]
        if len(chunk) < 2:
            continue
        u = np.array([rec.u for rec in chunk], dtype=float)
        d = np.abs(np.diff(u, axis=0))
        for i in range(u.shape[1]):
            per_actuator.setdefault(i, []).extend(d[:, i])
    if not per_actuator:
        return None
    means = [np.mean(v) if v else 0.0 for v in per_actuator.values()]
    return float(np.mean(means))


def metrics_report(records, config=None) -> dict:
    """Episode metrics plus run-level event counts, JSON-ready."""
    episodes = episodes_from_log(records)
    events: dict[str, int] = {}
    for rec in records:
        for e in rec.events:
            events[e] = events.get(e, 0) + 1
    report = {
        "ticks": len(records),
        "episodes": len(episodes),
        "episode_intervals": [[a, b] for a, b in episodes],
        "mae_mm": mae(records, episodes),
        "mape_pct": mape(records, episodes),
        "avr": avr(records, episodes),
        "events": events,
        "min_omega_meas": (
            float(min(r.min_omega_meas for r in records)) if records else None
        ),
    }
    if config is not None:
        report["mode"] = config.mode
        report["seed"] = config.seed
        report["duration"] = config.duration
    return report
