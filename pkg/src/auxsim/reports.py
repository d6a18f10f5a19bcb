"""Run a scenario end to end and write the report files.

Every file format here is frozen: fixed column order, fixed six-decimal
float formatting, sorted JSON keys, trailing newlines. Two runs of the
same scenario must produce byte-identical reports; the golden-file
tests lean on that.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

from .scenario import Scenario, sim_command
from .sim import Simulator

TRAJECTORY_HEADER = ["t_s", "x_mm", "y_mm", "heading_deg", "mode", "locked", "event"]

VERDICT_HEADER = ["t_s", "object", "mode", "success", "reason",
                  "usable_contacts", "squeeze_n", "capacity_n", "weight_n"]

_FINGER_COLS = ["c1", "c2", "phi1_deg", "phi2_deg", "reach_mm"]

FINGER_HEADER = ["t_s"] + [f"f{k}_{c}" for k in range(4) for c in _FINGER_COLS]


class ScenarioRunError(RuntimeError):
    """A command was rejected while running under --strict."""


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: list[list[str]] = field(default_factory=list)
    fingers: list[list[str]] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    verdicts: list[dict] = field(default_factory=list)
    rejected: list[dict] = field(default_factory=list)
    final: dict = field(default_factory=dict)


def _f(v: float) -> str:
    return f"{v:.6f}"


def _sample(sim: Simulator, seen: list[dict]) -> tuple[list[str], list[str]]:
    snap = sim.snapshot()
    names = "|".join(e["name"] for e in seen)
    traj = [_f(snap["t_s"]), _f(snap["x_mm"]), _f(snap["y_mm"]),
            _f(snap["heading_deg"]), snap["mode"], "1" if snap["locked"] else "0", names]
    fing = [_f(snap["t_s"])]
    for f in snap["fingers"]:
        fing.extend(_f(f[c]) for c in _FINGER_COLS)
    return traj, fing


def run_scenario(sc: Scenario, strict: bool = False) -> RunResult:
    """Drive a simulator through the scenario's command list.

    Commands land on tick boundaries (t_s rounded to the nearest tick)
    and apply in file order. Trajectory and finger rows are sampled at
    the config's snapshot cadence plus the final tick.
    """
    sim = Simulator(sc.config, scene=sc.scene)
    result = RunResult(scenario=sc)
    tick_s = sc.config.tick_s
    total = round(sc.duration_s / tick_s)
    every = sc.config.snapshot_every_ticks
    due = [(round(c["t_s"] / tick_s), c) for c in sc.commands]
    next_cmd = 0
    consumed = 0

    def sample():
        nonlocal consumed
        traj, fing = _sample(sim, sim.events[consumed:])
        consumed = len(sim.events)
        result.trajectory.append(traj)
        result.fingers.append(fing)

    sample()
    while sim.tick_count < total:
        while next_cmd < len(due) and due[next_cmd][0] <= sim.tick_count:
            cmd = due[next_cmd][1]
            next_cmd += 1
            ok, reason = sim.apply_command(*sim_command(cmd))
            if not ok:
                result.rejected.append({"tick": sim.tick_count, "op": cmd["op"], "reason": reason})
                if strict:
                    raise ScenarioRunError(
                        f"t={sim.t_s:.3f}s: {cmd['op']} rejected: {reason}")
        sim.tick()
        if sim.tick_count % every == 0 or sim.tick_count == total:
            sample()

    result.events = list(sim.events)
    result.verdicts = list(sim.verdicts)
    result.final = sim.snapshot()
    return result


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_reports(result: RunResult, out_dir) -> list[str]:
    """Write the full report set into out_dir; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    def p(name):
        paths.append(os.path.join(out_dir, name))
        return paths[-1]

    _write_csv(p("trajectory.csv"), TRAJECTORY_HEADER, result.trajectory)
    _write_csv(p("fingers.csv"), FINGER_HEADER, result.fingers)

    verdict_rows = []
    for v in result.verdicts:
        verdict_rows.append([
            _f(v["t_s"]), v["object"], v["mode"], "1" if v["success"] else "0",
            v["reason"] or "", str(v["usable_contacts"]),
            _f(v["squeeze_n"]), _f(v["capacity_n"]), _f(v["weight_n"]),
        ])
    _write_csv(p("verdicts.csv"), VERDICT_HEADER, verdict_rows)

    with open(p("events.jsonl"), "w", encoding="utf-8") as fh:
        for e in result.events:
            fh.write(json.dumps(e, sort_keys=True) + "\n")

    with open(p("final_state.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(result.final, indent=2, sort_keys=True) + "\n")

    return paths
