"""Command line entry point: ``critabs constants|run|verify|sweep``."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import FAMILIES, ConfigError, RunConfig, dump_config, load_config
from .diagnostics import CSV_COLUMNS, compensated_decay, convergence_report
from .evolution import DomainError, Trajectory, run
from .plots import write_chart
from .profiles import Params, barenblatt_mass, compute_constants, support_radius_of

MAX_SWEEP_RUNS = 256
WORKERS_ENV = "CRITABS_WORKERS"


def _clean(obj: Any) -> Any:
    """Make ``obj`` strict-JSON safe (non-finite floats become null)."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


# ---------------------------------------------------------------------------
# constants


def constants_table(p: float, N: int) -> dict[str, Any]:
    params = Params.critical(p, N)
    c = compute_constants(params)
    table = {"p": p, "N": N, "q_star": params.q, **c.as_dict()}
    for label, A in (("1", 1.0), ("A_star", c.a_star)):
        table[f"support_radius_A_{label}"] = support_radius_of(A, params)
        table[f"mass_A_{label}"] = barenblatt_mass(A, params)
    return table


def cmd_constants(args: argparse.Namespace) -> int:
    table = constants_table(args.p, args.N)
    width = max(len(k) for k in table)
    for key, value in table.items():
        print(f"{key:<{width}}  {value!r}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "constants.json", table)
    return 0


# ---------------------------------------------------------------------------
# run


def _rate_fits(traj: Trajectory) -> dict[str, Any]:
    if traj.mode.kind.rescaled or not np.any(traj.times > 1):
        return {}
    return {kind: compensated_decay(traj.records, kind, traj.params).summary()
            for kind in ("sup_norm", "support", "mass")}


def _convergence(traj: Trajectory) -> dict[str, Any] | None:
    if traj.mode.kind.value != "rescaled_full" or not traj.params.is_critical:
        return None
    return convergence_report(traj.records, traj.params)


def _write_profiles(out: Path, traj: Trajectory) -> None:
    r = traj.grid.centers
    for k, (rec, values) in enumerate(zip(traj.records, traj.fields)):
        with open(out / f"profiles_s{k:03d}.csv", "w", newline="") as fh:
            fh.write(f"# time = {rec.time!r}\n")
            writer = csv.writer(fh)
            writer.writerow(("r", "value"))
            writer.writerows((repr(float(x)), repr(float(v))) for x, v in zip(r, values))


def _write_plots(out: Path, traj: Trajectory, fits: dict[str, Any]) -> None:
    t = traj.times
    if traj.mode.kind.rescaled:
        err = traj.column("profile_error_sup")
        write_chart(out / "profile_error.svg", {"sup |w - B_A(s)|": (t, err)},
                    "distance to the Barenblatt family", "s", "error")
        return
    for kind, fit in fits.items():
        rate = compensated_decay(traj.records, kind, traj.params)
        write_chart(out / f"compensated_{kind}.svg", {kind: (rate.times, rate.compensated)},
                    f"compensated {kind}", "t", "compensated value")


def execute_run(config: RunConfig, out_dir: str | Path) -> dict[str, Any]:
    """Run ``config`` and write its trajectory, summary and optional extras."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    traj = run(config, keep_fields=config.dump_profiles)
    elapsed = time.perf_counter() - start

    with open(out / "trajectory.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rec.as_row() for rec in traj.records)
    if config.dump_profiles:
        _write_profiles(out, traj)

    fits = _rate_fits(traj)
    if config.plots:
        _write_plots(out, traj, fits)
    last = traj.records[-1]
    summary = {
        "config": config.to_dict(),
        "constants": compute_constants(traj.params).as_dict(),
        "final": last.as_dict(),
        "convergence": _convergence(traj),
        "rate_fits": fits,
        "meta": {
            "version": __version__,
            "python": platform.python_version(),
            "steps": traj.steps,
            "elapsed_seconds": round(elapsed, 3),
        },
    }
    _write_json(out / "summary.json", summary)
    (out / "config.txt").write_text(dump_config(config))
    return summary


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out = args.out or config.out_dir or "out"
    summary = execute_run(config, out)
    final = summary["final"]
    print(f"t_end={final['time']!r} l1={final['l1']:.6g} linf={final['linf']:.6g} "
          f"support={final['support_radius']:.6g} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    from .acceptance import run_acceptance

    verdict = run_acceptance(args.level, progress=lambda line: print(line, flush=True))
    text = json.dumps(_clean(verdict), indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verdict.json").write_text(text + "\n")
    else:
        print(text)
    print("verdict:", "PASS" if verdict["passed"] else "FAIL")
    return 0 if verdict["passed"] else 1


# ---------------------------------------------------------------------------
# sweep


def _number_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    values = _number_list(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


def _family_list(text: str) -> list[str]:
    fams = [x.strip() for x in text.split(",") if x.strip()]
    bad = [f for f in fams if f not in FAMILIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown families {bad}; choose from {FAMILIES}")
    return fams


def _point_dir(p: float, N: int, family: str) -> str:
    return f"p{p:g}_N{N}_{family}"


SWEEP_COLUMNS = ("p", "N", "family", "status", "time", "l1", "linf", "support_radius",
                 "amplitude", "amplitude_rel_error", "profile_error_end")


def _sweep_point(config: RunConfig, out: str) -> dict[str, Any]:
    try:
        summary = execute_run(config, out)
    except (DomainError, RuntimeError, ValueError) as exc:
        return {"status": f"error: {exc}"}
    final, conv = summary["final"], summary["convergence"] or {}
    return {
        "status": "ok",
        "time": final["time"],
        "l1": final["l1"],
        "linf": final["linf"],
        "support_radius": final["support_radius"],
        "amplitude": final["amplitude"],
        "amplitude_rel_error": conv.get("amplitude_rel_error"),
        "profile_error_end": conv.get("profile_error_end"),
    }


def cmd_sweep(args: argparse.Namespace) -> int:
    template = load_config(args.config)
    families = args.family or [template.initial.family]
    points = list(itertools.product(args.p, args.N, families))
    if len(points) > MAX_SWEEP_RUNS:
        raise ConfigError(f"sweep has {len(points)} runs; the limit is {MAX_SWEEP_RUNS}")
    if len(set(points)) != len(points):
        raise ConfigError("sweep lists contain duplicates")
    out = Path(args.out or template.out_dir or "sweep")
    if out.exists() and any(out.iterdir()):
        raise ConfigError(f"output directory {out} exists and is not empty")
    # validate every point before anything runs
    configs = [template.with_(p=p, N=N, **{"initial.family": fam}) for p, N, fam in points]
    out.mkdir(parents=True, exist_ok=True)
    dirs = [str(out / _point_dir(*pt)) for pt in points]

    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, configs, dirs))
    else:
        rows = [_sweep_point(c, d) for c, d in zip(configs, dirs)]

    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for (p, N, fam), row in zip(points, rows):
            row = {"p": p, "N": N, "family": fam, **row}
            writer.writerow("" if row.get(c) is None else repr(row[c]) if isinstance(row[c], float)
                            else row[c] for c in SWEEP_COLUMNS)
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"{len(rows)} runs, {failed} failed -> {out / 'sweep.csv'}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critabs", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="profile constants for the critical exponent")
    c.add_argument("p", type=float)
    c.add_argument("N", type=int)
    c.add_argument("--out", default=".", help="directory for constants.json")
    c.set_defaults(func=cmd_constants)

    r = sub.add_parser("run", help="integrate one configuration")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="output directory (overrides output.dir)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.add_argument("--out", help="directory for verdict.json (default: print)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="cartesian sweep over p, N and data family")
    s.add_argument("--config", required=True)
    s.add_argument("--p", type=_number_list, required=True, help="comma separated, e.g. 2.5,3,4")
    s.add_argument("--N", type=_int_list, required=True, help="comma separated, e.g. 1,2")
    s.add_argument("--family", type=_family_list, help=f"comma separated subset of {FAMILIES}")
    s.add_argument("--out", help="output directory (must be absent or empty)")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"critabs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"critabs {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
