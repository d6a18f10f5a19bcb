"""Scenario documents: a whole scripted run as one strict JSON file.

A scenario pins everything a run needs: the config record, the scene,
timestamped commands, the tick, and the duration. Parsing is strict
and total: unknown fields anywhere are errors, and every problem in a
bad file is reported in one go with its field path. The emitter writes
one canonical form (all fields explicit, sorted keys, two-space
indent, trailing newline) so parse and emit are mutual inverses and
emitted files are byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import gait
from .config import ConfigError, SimConfig
from .grasp import SceneObject

SCHEMA_VERSION = 1

_TOP_FIELDS = {"version", "name", "description", "tick_s", "duration_s",
               "config", "scene", "commands"}
_SCENE_FIELDS = {"object_id", "shape", "size_mm", "pose_mm_deg", "mass_kg"}

# op name -> (required arg fields, optional arg fields)
_COMMAND_ARGS = {
    "set_chamber": ({"chamber", "state"}, set()),
    "fold": ({"direction"}, set()),
    "release": (set(), set()),
    "turn": ({"direction"}, set()),
    "crawl": ({"pair"}, {"steps"}),
    "grasp": ({"object"}, set()),
    "halt": (set(), set()),
}

CHAMBER_STATES = ("ambient", "vacuum")


class ScenarioError(ValueError):
    """Every problem found in a scenario document, not just the first."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass
class Scenario:
    version: int = SCHEMA_VERSION
    name: str = ""
    description: str = ""
    duration_s: float = 3.0
    config: SimConfig = field(default_factory=SimConfig)
    scene: list[SceneObject] = field(default_factory=list)
    commands: list[dict] = field(default_factory=list)

    @property
    def tick_s(self) -> float:
        return self.config.tick_s


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_command(i: int, cmd, chamber_ids, object_ids, problems) -> dict | None:
    path = f"commands[{i}]"
    if not isinstance(cmd, dict):
        problems.append(f"{path}: expected an object")
        return None
    if "op" not in cmd or "t_s" not in cmd:
        problems.append(f"{path}: needs 't_s' and 'op'")
        return None
    op = cmd["op"]
    if op not in _COMMAND_ARGS:
        problems.append(f"{path}.op: unknown op {op!r}")
        return None
    if not _is_num(cmd["t_s"]) or cmd["t_s"] < 0.0:
        problems.append(f"{path}.t_s: must be a number >= 0")
        return None
    required, optional = _COMMAND_ARGS[op]
    keys = set(cmd) - {"t_s", "op"}
    for k in sorted(keys - required - optional):
        problems.append(f"{path}: unknown field {k!r} for op {op!r}")
    for k in sorted(required - keys):
        problems.append(f"{path}: op {op!r} needs field {k!r}")
    if (keys - required - optional) or (required - keys):
        return None
    out = {"t_s": float(cmd["t_s"]), "op": op}
    ok = True
    if op == "set_chamber":
        if cmd["chamber"] not in chamber_ids:
            problems.append(f"{path}.chamber: unknown chamber {cmd['chamber']!r}")
            ok = False
        if cmd["state"] not in CHAMBER_STATES:
            problems.append(f"{path}.state: must be 'vacuum' or 'ambient'")
            ok = False
        if ok:
            out["chamber"] = cmd["chamber"]
            out["state"] = cmd["state"]
    elif op in ("fold", "turn"):
        if cmd["direction"] not in (1, -1):
            problems.append(f"{path}.direction: must be 1 or -1")
            ok = False
        else:
            out["direction"] = cmd["direction"]
    elif op == "crawl":
        pair = cmd["pair"]
        if (not isinstance(pair, list) or len(pair) != 2
                or tuple(pair) not in gait.CROSS_PAIRS and tuple(pair[::-1]) not in gait.CROSS_PAIRS):
            problems.append(f"{path}.pair: {pair!r} is not an adjacent leg pair")
            ok = False
        else:
            out["pair"] = list(pair)
        steps = cmd.get("steps", 1)
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            problems.append(f"{path}.steps: must be a positive integer")
            ok = False
        else:
            out["steps"] = steps
    elif op == "grasp":
        if cmd["object"] not in object_ids:
            problems.append(f"{path}.object: no scene object named {cmd['object']!r}")
            ok = False
        else:
            out["object"] = cmd["object"]
    return out if ok else None


def _check_scene(i: int, raw, problems) -> SceneObject | None:
    path = f"scene[{i}]"
    if not isinstance(raw, dict):
        problems.append(f"{path}: expected an object")
        return None
    for k in sorted(set(raw) - _SCENE_FIELDS):
        problems.append(f"{path}: unknown field {k!r}")
    missing = sorted({"object_id", "shape", "size_mm"} - set(raw))
    for k in missing:
        problems.append(f"{path}: missing field {k!r}")
    if (set(raw) - _SCENE_FIELDS) or missing:
        return None
    pose = raw.get("pose_mm_deg", [0.0, 0.0, 0.0])
    size = raw["size_mm"]
    if not isinstance(size, list) or not all(_is_num(v) for v in size):
        problems.append(f"{path}.size_mm: expected a list of numbers")
        return None
    if not isinstance(pose, list) or len(pose) != 3 or not all(_is_num(v) for v in pose):
        problems.append(f"{path}.pose_mm_deg: expected [x, y, rot]")
        return None
    obj = SceneObject(
        object_id=str(raw["object_id"]),
        shape=raw["shape"],
        size_mm=tuple(float(v) for v in size),
        pose_mm_deg=(float(pose[0]), float(pose[1]), float(pose[2])),
        mass_kg=float(raw.get("mass_kg", 1.0)),
    )
    shape_problems = obj.validate()
    if shape_problems:
        problems.extend(f"{path}: {p}" for p in shape_problems)
        return None
    return obj


def parse_scenario(text: str) -> Scenario:
    """Parse and validate one scenario document.

    Raises ScenarioError carrying every problem found. Syntax errors
    report line and column.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError([f"syntax: line {e.lineno} column {e.colno}: {e.msg}"]) from None
    if not isinstance(doc, dict):
        raise ScenarioError(["document: expected a JSON object"])

    problems: list[str] = []
    for k in sorted(set(doc) - _TOP_FIELDS):
        problems.append(f"document: unknown field {k!r}")
    if doc.get("version") != SCHEMA_VERSION:
        problems.append(f"version: expected {SCHEMA_VERSION}, got {doc.get('version')!r}")

    cfg_raw = doc.get("config", {})
    config = SimConfig()
    if not isinstance(cfg_raw, dict):
        problems.append("config: expected an object")
        cfg_raw = {}
    else:
        try:
            config = SimConfig.from_dict(cfg_raw)
        except ConfigError as e:
            problems.extend(p if p.startswith("config:") else f"config.{p}"
                            for p in e.problems)

    if "tick_s" in doc:
        tick = doc["tick_s"]
        if not _is_num(tick) or not 0.0 < tick <= 0.1:
            problems.append("tick_s: must be in (0, 0.1]")
        elif "tick_s" in cfg_raw and cfg_raw["tick_s"] != tick:
            problems.append("tick_s: conflicts with config.tick_s")
        else:
            config.tick_s = float(tick)

    scene: list[SceneObject] = []
    raw_scene = doc.get("scene", [])
    if not isinstance(raw_scene, list):
        problems.append("scene: expected a list")
    else:
        for i, raw in enumerate(raw_scene):
            obj = _check_scene(i, raw, problems)
            if obj is not None:
                if any(o.object_id == obj.object_id for o in scene):
                    problems.append(f"scene[{i}].object_id: duplicate {obj.object_id!r}")
                else:
                    scene.append(obj)

    from .sim import CHAMBER_IDS  # late import: sim pulls in the kernel
    object_ids = {o.object_id for o in scene}
    commands: list[dict] = []
    raw_commands = doc.get("commands")
    if not isinstance(raw_commands, list):
        problems.append("commands: expected a list")
    else:
        last_t = 0.0
        for i, raw in enumerate(raw_commands):
            cmd = _check_command(i, raw, CHAMBER_IDS, object_ids, problems)
            if cmd is not None:
                if cmd["t_s"] < last_t:
                    problems.append(f"commands[{i}].t_s: out of order ({cmd['t_s']} after {last_t})")
                else:
                    last_t = cmd["t_s"]
                    commands.append(cmd)

    duration = doc.get("duration_s")
    if duration is None:
        last = commands[-1]["t_s"] if commands else 0.0
        duration = last + 3.0
    elif not _is_num(duration) or duration <= 0.0:
        problems.append("duration_s: must be a positive number")
        duration = 1.0
    if commands and commands[-1]["t_s"] > duration:
        problems.append(f"duration_s: ends at {duration} before the last command "
                        f"at {commands[-1]['t_s']}")

    if problems:
        raise ScenarioError(problems)

    return Scenario(
        version=SCHEMA_VERSION,
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
        duration_s=float(duration),
        config=config,
        scene=scene,
        commands=commands,
    )


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _command_doc(cmd: dict) -> dict:
    out = {"t_s": cmd["t_s"], "op": cmd["op"]}
    for k in sorted(set(cmd) - {"t_s", "op"}):
        out[k] = cmd[k]
    return out


def emit_scenario(sc: Scenario) -> str:
    """Canonical text form: explicit fields, sorted keys, trailing newline."""
    doc = {
        "version": sc.version,
        "name": sc.name,
        "description": sc.description,
        "tick_s": sc.config.tick_s,
        "duration_s": sc.duration_s,
        "config": sc.config.to_dict(),
        "scene": [
            {
                "object_id": o.object_id,
                "shape": o.shape,
                "size_mm": list(o.size_mm),
                "pose_mm_deg": list(o.pose_mm_deg),
                "mass_kg": o.mass_kg,
            }
            for o in sc.scene
        ],
        "commands": [_command_doc(c) for c in sc.commands],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_scenario(sc: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_scenario(sc))


def sim_command(cmd: dict) -> tuple[str, dict]:
    """Translate one scenario command into the simulator's (op, args) form."""
    op = cmd["op"]
    if op == "set_chamber":
        return op, {"chamber": cmd["chamber"],
                    "target": 1.0 if cmd["state"] == "vacuum" else 0.0}
    args = {k: v for k, v in cmd.items() if k not in ("t_s", "op")}
    if op == "crawl":
        args["pair"] = tuple(args["pair"])
    return op, args
