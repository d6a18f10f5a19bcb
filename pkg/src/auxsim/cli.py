"""Command line front end.

Subcommands:
  run        execute a scenario file and write report files
  validate   parse a scenario file and list every problem
  calibrate  print derived quantities (--print-ledger for the full table)
  serve      start the websocket/http service
  version    print the package version

Exit codes: 0 success, 1 fatal error while running, 2 invalid input.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__, actuation, grasp, kernel, locking
from .config import ConfigError, SimConfig
from .geometry import LatticeSpec, body_fk, mount_rays, poisson_ratio
from .reports import ScenarioRunError, run_scenario, write_reports
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_INVALID = 2


def _fail_invalid(problems) -> int:
    for p in problems:
        print(f"error: {p}", file=sys.stderr)
    return EXIT_INVALID


def _load(path: str):
    try:
        return load_scenario(path)
    except OSError as e:
        raise ScenarioError([f"cannot read {path}: {e.strerror or e}"]) from None


def cmd_run(args) -> int:
    try:
        sc = _load(args.scenario)
    except ScenarioError as e:
        return _fail_invalid(e.problems)
    if args.tick is not None:
        sc.config.tick_s = args.tick
        try:
            sc.config.validate()
        except ConfigError as e:
            return _fail_invalid(e.problems)
    try:
        result = run_scenario(sc, strict=args.strict)
    except ScenarioRunError as e:
        print(f"fatal: {e}", file=sys.stderr)
        return EXIT_FATAL
    for r in result.rejected:
        print(f"warning: tick {r['tick']}: {r['op']} rejected: {r['reason']}",
              file=sys.stderr)
    try:
        paths = write_reports(result, args.out)
    except OSError as e:
        print(f"fatal: cannot write reports: {e}", file=sys.stderr)
        return EXIT_FATAL
    for p in paths:
        print(f"wrote {p}")
    f = result.final
    lock = "locked" if f["locked"] else "unlocked"
    print(f"final: t={f['t_s']:.3f}s x={f['x_mm']:.3f}mm y={f['y_mm']:.3f}mm "
          f"heading={f['heading_deg']:.3f}deg theta={f['theta_deg']:.3f}deg "
          f"mode={f['mode']} {lock}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        sc = _load(args.scenario)
    except ScenarioError as e:
        return _fail_invalid(e.problems)
    print(f"ok: {args.scenario}: {len(sc.commands)} commands, "
          f"{len(sc.scene)} scene objects, {sc.duration_s}s at tick {sc.tick_s}s")
    return EXIT_OK


def _ledger_rows(config: SimConfig) -> list[tuple[str, object, str]]:
    geom = config.geometry()
    rays = mount_rays(geom, 0.0)
    center = body_fk(geom, 0.0).center
    mount_r = math.hypot(rays[0][0][0] - center[0], rays[0][0][1] - center[1])
    spec = LatticeSpec(geometry=geom, rows=2, cols=2)
    rows: list[tuple[str, object, str]] = []
    for name, value in sorted(config.to_dict().items()):
        rows.append((f"config.{name}", value, "run parameter"))
    half = geom.theta_max_deg / 2.0
    rows += [
        ("geometry.theta_max_deg", geom.theta_max_deg, "fold travel per latch"),
        ("geometry.mount_radius_mm", mount_r, "finger mounts from body center"),
        ("geometry.poisson_ratio_mid", poisson_ratio(spec, half), "in-plane, half fold"),
        ("actuation.base_joint_full_deg", actuation.BASE_JOINT_FULL_DEG, "stage 1 alone"),
        ("actuation.base_joint_boost_deg", actuation.BASE_JOINT_BOOST_DEG, "stage 1 with stage 2"),
        ("actuation.tip_joint_full_deg", actuation.TIP_JOINT_FULL_DEG, "stage 2"),
        ("actuation.tip_sweep_deg", actuation.BASE_JOINT_FULL_DEG
         + actuation.BASE_JOINT_BOOST_DEG + actuation.TIP_JOINT_FULL_DEG, "full curl"),
        ("actuation.f_tip_cap_n", actuation.F_TIP_CAP_N, "blocked tip force"),
        ("actuation.f_stage1_cap_n", actuation.F_STAGE1_CAP_N, "blocked base force"),
        ("actuation.pad_contact_min_deg", actuation.PAD_CONTACT_MIN_DEG, "pad plants past this"),
        ("grasp.reach_min_mm", grasp.REACH_MIN_MM, "tip tucked, from mount"),
        ("grasp.reach_max_mm", grasp.REACH_MAX_MM, "tip extended, from mount"),
        ("grasp.stroke_mm", grasp.REACH_MAX_MM - grasp.REACH_MIN_MM, "usable tip travel"),
        ("locking.k_drive", locking.K_DRIVE, "fold drive gain"),
        ("locking.drive_deadband", locking.DRIVE_DEADBAND, "net suction ignored below"),
        ("locking.lock_capture_deg", locking.LOCK_CAPTURE_DEG, "latch capture window"),
        ("locking.lock_rearm_deg", locking.LOCK_REARM_DEG, "re-arm distance"),
        ("locking.release_contraction", locking.RELEASE_CONTRACTION, "pair mean to pop latch"),
        ("locking.settle_snap_deg", locking.SETTLE_SNAP_DEG, "neutral snap window"),
        ("kernel.impl", kernel.IMPL, "tick kernel in use"),
    ]
    return rows


def cmd_calibrate(args) -> int:
    config = SimConfig()
    rows = _ledger_rows(config)
    if not args.print_ledger:
        rows = [r for r in rows if not r[0].startswith("config.")]
    name_w = max(len(r[0]) for r in rows)
    val_w = max(len(repr(r[1])) for r in rows)
    for name, value, note in rows:
        print(f"{name:<{name_w}}  {value!r:<{val_w}}  {note}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_version(_args) -> int:
    print(f"auxsim {__version__} (kernel: {kernel.IMPL})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auxsim",
                                     description="folding-ring gripper-crawler simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario file and write reports")
    run.add_argument("scenario", help="scenario JSON file")
    run.add_argument("--out", default="out", help="report directory (default: out)")
    run.add_argument("--tick", type=float, default=None, metavar="S",
                     help="override the tick length in seconds")
    run.add_argument("--strict", action="store_true",
                     help="treat any rejected command as fatal")
    run.set_defaults(fn=cmd_run)

    val = sub.add_parser("validate", help="check a scenario file, listing every problem")
    val.add_argument("scenario", help="scenario JSON file")
    val.set_defaults(fn=cmd_validate)

    cal = sub.add_parser("calibrate", help="print derived quantities")
    cal.add_argument("--print-ledger", action="store_true",
                     help="include every run parameter in the table")
    cal.set_defaults(fn=cmd_calibrate)

    srv = sub.add_parser("serve", help="start the websocket/http service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(fn=cmd_serve)

    ver = sub.add_parser("version", help="print the package version")
    ver.set_defaults(fn=cmd_version)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
