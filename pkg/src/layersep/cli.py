"""Command-line front end: ``layersep predict|sweep|fsm|ingest|report``."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import expdata, graspfsm, materials, mechanics, sweep
from .svg import render_grid_svg

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2  # ran fine, but the predicted/simulated outcome is a failure

ROLLERS = {"dented": mechanics.RollerSurface.DENTED, "smooth": mechanics.RollerSurface.SMOOTH}
COATINGS = {"silicone": graspfsm.Coating.SILICONE, "plain": graspfsm.Coating.PLAIN}
CLAMPS = ("none", "rigid", "finger")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _rollers(text: str) -> list[mechanics.RollerSurface]:
    out = []
    for name in text.split(","):
        name = name.strip().lower()
        if name not in ROLLERS:
            raise argparse.ArgumentTypeError(f"unknown roller {name!r} (dented, smooth)")
        out.append(ROLLERS[name])
    return out


def _global_flags(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--db", default=d(None), metavar="PATH",
                   help="material database file (default: $LAYERSEP_DB or the bundled table)")
    g.add_argument("--seed", type=_u64, default=d(0), help="RNG seed, unsigned 64-bit (default 0)")
    g.add_argument("--out", default=d(None), metavar="DIR",
                   help="output directory (created if missing)")
    g.add_argument("--format", choices=("csv", "text", "svg"), default=d("text"),
                   help="report format; svg adds a heatmap to sweep output")


def _scenario_flags(p, *, clamp_default: str, fn_default: float | None):
    p.add_argument("--pair", required=fn_default is None, default="plastic-paper"
                   if fn_default is not None else None,
                   help="material pair from the database [stacks] section, e.g. plastic-paper")
    force = p.add_mutually_exclusive_group(required=fn_default is None)
    force.add_argument("--fn", type=float, default=None, metavar="N",
                       help="roller normal force F_N in newtons"
                            + (f" (default {fn_default:g} N)" if fn_default is not None else ""))
    force.add_argument("--penetration-mm", type=float, default=None, metavar="MM",
                       help="roller penetration depth in millimetres, mapped to F_N by --contact-stiffness")
    p.add_argument("--contact-stiffness", type=float, default=500.0, metavar="N_PER_M",
                   help="penetration-to-force stiffness in N/m (default 500)")
    p.add_argument("--clamp", choices=CLAMPS, default=clamp_default,
                   help=f"hold mode: none, rigid clamp or finger clamp (default {clamp_default})")
    p.add_argument("--a", type=float, default=mechanics.DEFAULT_FINGER_GAP, metavar="M",
                   help="clamp distance in metres: roller contact to hold line "
                        f"(default {mechanics.DEFAULT_FINGER_GAP} m)")
    p.add_argument("--hold", type=float, default=mechanics.DEFAULT_FINGER_HOLD, metavar="N",
                   help="finger holding force F_N2 in newtons (default "
                        f"{mechanics.DEFAULT_FINGER_HOLD:g} N; rigid clamps hold without limit)")
    p.add_argument("--edge", type=float, default=0.02, metavar="M",
                   help="roller contact to free edge of the top layer, metres (default 0.02 m)")
    p.add_argument("--roller", choices=sorted(ROLLERS), default="dented",
                   help="roller surface (default dented)")
    p.add_argument("--rpm", type=float, default=18.3, metavar="REV_PER_MIN",
                   help="roller speed in rev/min, motor range 1-45 (default 18.3)")
    p.add_argument("--radius", type=float, default=mechanics.DEFAULT_ROLLER_RADIUS, metavar="M",
                   help=f"roller radius in metres (default {mechanics.DEFAULT_ROLLER_RADIUS} m)")
    p.add_argument("--overrun-tolerance", type=float, default=None, metavar="S",
                   help="seconds of overrun a smooth roller tolerates at 18.3 rev/min "
                        f"(default {mechanics.DEFAULT_SMOOTH_OVERRUN} s)")
    p.add_argument("--adhesion", type=float, default=0.0, metavar="N",
                   help="constant interlayer adhesion added to the layer friction, newtons (default 0)")


def _episode_flags(p):
    p.add_argument("--stop-delay", type=float, default=0.1, metavar="S",
                   help="roller rotation past edge arrival, seconds (default 0.1 s)")
    p.add_argument("--pull", type=float, default=40.0, metavar="N",
                   help="pull force applied while lifting, newtons (default 40 N)")
    p.add_argument("--coating", choices=sorted(COATINGS), default="silicone",
                   help="finger coating (default silicone)")
    p.add_argument("--close-force", type=float, default=100.0, metavar="N",
                   help="gripper closing force in newtons (default 100 N)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="layersep", description=__doc__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("predict", help="classify one separation scenario")
    _scenario_flags(p, clamp_default="none", fn_default=None)
    _global_flags(p, suppress=True)

    p = sub.add_parser("sweep", help="seeded sweep over penetration x speed x edge x roller")
    p.add_argument("--pair", default="plastic-paper", help="material pair (default plastic-paper)")
    p.add_argument("--penetrations-mm", type=_floats, default=[0, 1, 2, 3, 4], metavar="LIST",
                   help="penetration depths in millimetres (default 0,1,2,3,4)")
    p.add_argument("--velocities", type=_floats, default=[1, 12, 23, 34, 45], metavar="LIST",
                   help="roller speeds in rev/min (default 1,12,23,34,45)")
    p.add_argument("--edges", type=_floats, default=[0.02], metavar="LIST",
                   help="roller-to-edge distances in metres (default 0.02)")
    p.add_argument("--rollers", type=_rollers, default=[mechanics.RollerSurface.DENTED],
                   metavar="LIST", help="roller surfaces, e.g. dented,smooth (default dented)")
    p.add_argument("--reps", type=int, default=5, help="repetitions per cell (default 5)")
    p.add_argument("--clamp", choices=CLAMPS + ("compare",), default="finger",
                   help="hold mode, or 'compare' to run unclamped and finger-clamped grids")
    p.add_argument("--a", type=float, default=mechanics.DEFAULT_FINGER_GAP, metavar="M",
                   help=f"clamp distance in metres (default {mechanics.DEFAULT_FINGER_GAP} m)")
    p.add_argument("--hold", type=float, default=mechanics.DEFAULT_FINGER_HOLD, metavar="N",
                   help=f"finger holding force in newtons (default {mechanics.DEFAULT_FINGER_HOLD:g} N)")
    p.add_argument("--contact-stiffness", type=float, default=500.0, metavar="N_PER_M",
                   help="penetration-to-force stiffness in N/m (default 500)")
    p.add_argument("--mu-sigma", type=float, default=0.05, metavar="FRAC",
                   help="relative std-dev of friction coefficients (default 0.05)")
    p.add_argument("--fn-sigma", type=float, default=0.10, metavar="FRAC",
                   help="relative std-dev of the normal force (default 0.10)")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes; results do not depend on it (default 1)")
    p.add_argument("--overrun-tolerance", type=float, default=None, metavar="S",
                   help="seconds of overrun a smooth roller tolerates at 18.3 rev/min "
                        f"(default {mechanics.DEFAULT_SMOOTH_OVERRUN} s)")
    _episode_flags(p)
    _global_flags(p, suppress=True)

    p = sub.add_parser("fsm", help="simulate one grasp episode and write its trace")
    _scenario_flags(p, clamp_default="finger", fn_default=1.0)
    _episode_flags(p)
    _global_flags(p, suppress=True)

    p = sub.add_parser("ingest", help="validate a trial log")
    p.add_argument("log", help="trial log CSV")
    _global_flags(p, suppress=True)

    p = sub.add_parser("report", help="success rates and pull-force statistics of a trial log")
    p.add_argument("log", help="trial log CSV")
    p.add_argument("--group-by", default="material_pair", metavar="KEYS",
                   help="comma-separated grouping keys: " + ", ".join(expdata.GROUP_KEYS))
    p.add_argument("--fit", action="store_true",
                   help="fit the holding-force model (needs max_pull_force_n values)")
    _global_flags(p, suppress=True)
    return parser


# --- helpers -----------------------------------------------------------------------


def _db(args) -> materials.MaterialDB:
    path = args.db or os.environ.get("LAYERSEP_DB") or None
    return materials.load_database(path)


def _out_dir(args, default: str | None = ".") -> Path | None:
    out = args.out if args.out is not None else default
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _clamp(mode: str, args) -> mechanics.ClampSpec:
    if mode == "none":
        return mechanics.ClampSpec.unclamped()
    if mode == "rigid":
        return mechanics.ClampSpec.rigid(args.a)
    return mechanics.ClampSpec.finger(args.a, args.hold)


def _normal_force(args, default: float | None) -> float:
    if args.penetration_mm is not None:
        return sweep.ContactModel(args.contact_stiffness).normal_force(args.penetration_mm * 1e-3)
    return args.fn if args.fn is not None else default


def _scenario(args, db, fn_default=None) -> mechanics.SeparationScenario:
    roller = mechanics.RollerSpec.at_rpm(
        args.rpm, surface=ROLLERS[args.roller], radius=args.radius,
        overrun_tolerance=args.overrun_tolerance,
    )
    return mechanics.SeparationScenario(
        stack=db.stack(args.pair),
        friction=db.friction,
        roller=roller,
        normal_force=_normal_force(args, fn_default),
        clamp=_clamp(args.clamp, args),
        edge_distance=args.edge,
        interlayer_adhesion=args.adhesion,
    )


def _fingers(args) -> graspfsm.FingerSpec:
    return graspfsm.FingerSpec(coating=COATINGS[args.coating], close_force=args.close_force)


# --- subcommands ---------------------------------------------------------------------


def cmd_predict(args) -> int:
    db = _db(args)
    s = _scenario(args, db)
    outcome = mechanics.predict(s)
    b = outcome.balance
    values = {f.name: getattr(b, f.name) for f in fields(b)}
    values["mode"] = b.mode.value
    values["outcome"] = outcome.kind.value
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(values)
        w.writerow([v if isinstance(v, str) else repr(v) for v in values.values()])
        text = buf.getvalue()
    else:
        lines = [f"pair={args.pair}", f"normal_force_n={s.normal_force!r}"]
        lines += [f"{k}={v if isinstance(v, str) else repr(v)}" for k, v in values.items()]
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    out = _out_dir(args, default=None)
    if out is not None:
        _write(out / f"predict.{'csv' if args.format == 'csv' else 'txt'}", text)
    return EXIT_OK if outcome.separates else EXIT_NEGATIVE


def cmd_sweep(args) -> int:
    db = _db(args)
    roller = mechanics.RollerSpec(overrun_tolerance=args.overrun_tolerance)
    clamp_mode = "finger" if args.clamp == "compare" else args.clamp
    scenario = mechanics.SeparationScenario(
        stack=db.stack(args.pair), friction=db.friction, roller=roller,
        clamp=_clamp(clamp_mode, args),
    )
    base = graspfsm.EpisodeConfig(scenario, _fingers(args), args.stop_delay, args.pull)
    axes = sweep.SweepAxes(
        penetrations=tuple(x * 1e-3 for x in args.penetrations_mm),
        velocities=tuple(args.velocities),
        edge_distances=tuple(args.edges),
        roller_types=tuple(args.rollers),
        repetitions=args.reps,
    )
    contact = sweep.ContactModel(args.contact_stiffness)
    noise = sweep.NoiseModel(args.mu_sigma, args.fn_sigma, args.seed)
    out = _out_dir(args)

    if args.clamp == "compare":
        free, held = sweep.clamp_comparison(axes, base, contact, noise, workers=args.workers)
        grids = {"grid_unclamped": free, "grid_clamped": held}
    else:
        grids = {"grid": sweep.run_sweep(axes, base, contact, noise, workers=args.workers)}

    for name, grid in grids.items():
        csv_path, hm_path = sweep.export_grid(grid, out / f"{name}.csv")
        written = [csv_path, hm_path]
        if args.format == "svg":
            written.append(_write(out / f"{name}.svg",
                                  render_grid_svg(grid, f"{args.pair}: {name}")))
        region = sweep.success_region(grid)
        total = sum(c[4] for c in grid.cells())
        print(f"{name}: {len(region)}/{grid.success.size} cells with successes, "
              f"{total}/{grid.success.size * grid.repetitions} episodes succeeded")
        if len(axes.roller_types) > 1 and set(axes.roller_types) == set(ROLLERS.values()):
            ok, strict = sweep.dominance(grid)
            print(f"{name}: dented >= smooth in every cell: {'yes' if ok else 'no'}; "
                  f"strictly better in {strict} cells")
        for p in written:
            print(f"wrote {p}")
    return EXIT_OK


def cmd_fsm(args) -> int:
    db = _db(args)
    s = _scenario(args, db, fn_default=1.0)
    config = graspfsm.EpisodeConfig(s, _fingers(args), args.stop_delay, args.pull)
    trace = graspfsm.run_episode(config)
    out = _out_dir(args)
    path = _write(out / "trace.txt", graspfsm.format_trace(trace))
    phases = " -> ".join(p.value for p in trace.phases())
    print(f"phases: {phases}")
    print(f"result: {trace.terminal}")
    print(f"wrote {path}")
    return EXIT_OK if trace.success else EXIT_NEGATIVE


def cmd_ingest(args) -> int:
    records = expdata.ingest_log(args.log)
    counts: dict[str, int] = {}
    for r in records:
        name = expdata.outcome_name(r.outcome)
        counts[name] = counts.get(name, 0) + 1
    print(f"{len(records)} records")
    for name in sorted(counts):
        print(f"{name}={counts[name]}")
    out = _out_dir(args, default=None)
    if out is not None:
        print(f"wrote {_write(out / 'ingested.csv', expdata.format_log(records))}")
    return EXIT_OK


def cmd_report(args) -> int:
    records = expdata.ingest_log(args.log)
    keys = tuple(k.strip() for k in args.group_by.split(",") if k.strip())
    report = expdata.summarize(records, group_by=keys, fit=args.fit)
    for key, g in report.groups.items():
        print(f"{'/'.join(map(str, key))}: {g.successes}/{g.trials} ({g.percent()})")
    if report.calibration is not None:
        cal = report.calibration
        for coating, fit in sorted(cal.fits.items(), key=lambda kv: kv[0].value):
            print(f"{coating.value}: mu_eff={fit.mu_eff:.4f}, "
                  f"roller_contribution={fit.roller_contribution:.2f} N, "
                  f"residual_norm={fit.residual_norm:.3f} N")
        if graspfsm.Coating.SILICONE in cal.fits and graspfsm.Coating.PLAIN in cal.fits:
            print(f"coating gap at median close force {cal.median_close_force:g} N: "
                  f"{cal.coating_gap():.2f} N")
    out = _out_dir(args)
    written = [
        _write(out / "summary.txt", expdata.format_summary(report)),
        _write(out / "summary_groups.csv", expdata.format_group_table(report)),
    ]
    if report.pull:
        written.append(_write(out / "summary_pull.csv", expdata.format_pull_table(report)))
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


COMMANDS = {
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "fsm": cmd_fsm,
    "ingest": cmd_ingest,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, LookupError, sweep.SweepError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"layersep {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
