"""Command-line front end.

Usage::

    twc check   (PATH | --builtin NAME) [--samples N] [--seed S] [--format json]
    twc region  (PATH | --builtin NAME) [--grid K] [--out region.csv]
    twc bounds  (PATH | --builtin NAME) [--grid K] [--out bounds.csv]
    twc validate PATH

Exit status: 0 bounds certified to coincide, 1 invalid channel input,
2 bad flags, 3 undetermined, 4 every condition refuted.
"""
import argparse
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import channel as ch
from .conditions import CONDITION_NAMES, REFUTED, SAMPLES, SEED, check_all
from .probcore import PROB_TOL
from .region import GridSpec, RegionError, capacity_region, hausdorff_distance, inner_bound, outer_bound
from .solver import TOL_MI

EXIT_TIGHT = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_UNDETERMINED = 3
EXIT_REFUTED = 4
OUTER_COST_WARN = 6


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    builtin: Optional[str] = None
    samples: int = SAMPLES
    seed: int = SEED
    grid: Optional[int] = None
    tol_prob: float = PROB_TOL
    tol_mi: float = TOL_MI
    format: str = "human"
    out: Optional[str] = None

    def validate(self):
        if (self.input is None) == (self.builtin is None):
            raise ValueError("give exactly one of a channel file or --builtin")
        if self.samples < 1:
            raise ValueError("--samples must be at least 1")
        if self.grid is not None and self.grid < 1:
            raise ValueError("--grid must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("--seed must be a 64-bit unsigned integer")

    @property
    def source(self):
        return f"builtin:{self.builtin}" if self.builtin else self.input


def _parser():
    p = argparse.ArgumentParser(prog="twc", description="Tightness of Shannon's bounds for two-way channels.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("check", "run every sufficient condition"),
        ("region", "capacity region (falls back to bounds)"),
        ("bounds", "grid inner and outer bounds"),
        ("validate", "validate a channel file"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("input", nargs="?", help="channel file (.json or .csv)")
        s.add_argument("--builtin", help="example1, example2 or bin-additive:<eps>")
        s.add_argument("--tol-prob", type=float, default=PROB_TOL, help="probability tolerance")
        s.add_argument("--format", choices=("human", "json"), default="human")
        if name == "validate":
            continue
        s.add_argument("--samples", type=int, default=SAMPLES)
        s.add_argument("--seed", type=int, default=SEED)
        s.add_argument("--tol-mi", type=float, default=TOL_MI, help="common-maximizer slack tolerance (bits)")
        if name in ("region", "bounds"):
            s.add_argument("--grid", type=int, help="simplex grid resolution")
            s.add_argument("--out", help="CSV output path; JSON metadata goes next to it")
    return p


def _load(cfg):
    if cfg.builtin:
        return ch.builtin(cfg.builtin)
    return ch.load(cfg.input, tol=cfg.tol_prob)


def _exit_status(report):
    if report.tightness:
        return EXIT_TIGHT
    if all(v.status == REFUTED for v in report.verdicts.values()):
        return EXIT_REFUTED
    return EXIT_UNDETERMINED


def _witness_summary(w):
    if not w:
        return "-"
    keep = {k: v for k, v in w.items() if k in ("kind", "pair", "symbols", "state", "values", "gap", "slack", "bound", "states")}
    return json.dumps(keep, separators=(",", ":"))


def _report_table(report):
    lines = [f"{'condition':<12} {'status':<21} proof path / witness"]
    for name in CONDITION_NAMES:
        v = report.verdicts[name]
        detail = v.notes if v.status != REFUTED else _witness_summary(v.witness)
        lines.append(f"{name:<12} {v.status:<21} {detail}")
    for label, p in (("pstar1", report.pstar1), ("pstar2", report.pstar2)):
        if p is not None:
            lines.append(f"{label} = [{', '.join(f'{x:.6f}' for x in p)}]")
    lines.append(f"tightness = {str(report.tightness).lower()}")
    return "\n".join(lines)


def _region_summary(region):
    d = region.to_dict()
    d["r1_max"] = region.r1_max
    d["r2_max"] = region.r2_max
    return d


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _sidecar(out, suffix):
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def cmd_check(cfg, stdout=sys.stdout):
    twc = _load(cfg)
    report = check_all(twc, cfg.samples, cfg.seed, cfg.tol_prob, cfg.tol_mi)
    if cfg.format == "json":
        stdout.write(_dump({"source": cfg.source, "report": report.to_dict()}))
    else:
        stdout.write(f"channel: {cfg.source}\n" + _report_table(report) + "\n")
    return _exit_status(report)


def _bounds_doc(twc, grid):
    inner, outer = inner_bound(twc, grid), outer_bound(twc, grid)
    gap = hausdorff_distance(inner, outer)
    return inner, outer, {"grid": grid.resolution, "gap": gap, "inner": _region_summary(inner),
                          "outer": _region_summary(outer)}


def _human_region(label, d):
    return f"{label}: R1max={d['r1_max']:.6f} R2max={d['r2_max']:.6f} rectangle={str(d['rectangle']).lower()} vertices={len(d['frontier'])}"


def cmd_region(cfg, stdout=sys.stdout, stderr=sys.stderr):
    twc = _load(cfg)
    report = check_all(twc, cfg.samples, cfg.seed, cfg.tol_prob, cfg.tol_mi)
    status = _exit_status(report)
    doc = {"source": cfg.source, "report": report.to_dict()}
    try:
        region = capacity_region(twc, report, GridSpec(cfg.grid) if cfg.grid else None)
    except RegionError as exc:
        stderr.write(f"warning: {exc}; reporting grid bounds\n")
        grid = GridSpec(cfg.grid or 50)
        inner, outer, bounds = _bounds_doc(twc, grid)
        doc["bounds"] = bounds
        if cfg.out:
            _write(_sidecar(cfg.out, ".inner.csv"), inner.to_csv())
            _write(_sidecar(cfg.out, ".outer.csv"), outer.to_csv())
            _write(_sidecar(cfg.out, ".json"), _dump(doc))
        if cfg.format == "json":
            stdout.write(_dump(doc))
        else:
            stdout.write(_human_region("inner", bounds["inner"]) + "\n")
            stdout.write(_human_region("outer", bounds["outer"]) + "\n")
            stdout.write(f"gap={bounds['gap']:.6g}\n")
        return status
    doc["region"] = _region_summary(region)
    if cfg.out:
        _write(cfg.out, region.to_csv())
        _write(_sidecar(cfg.out, ".json"), _dump(doc))
    if cfg.format == "json":
        stdout.write(_dump(doc))
    else:
        stdout.write(_human_region("capacity", doc["region"]) + "\n")
    return status


def cmd_bounds(cfg, stdout=sys.stdout, stderr=sys.stderr):
    twc = _load(cfg)
    if twc.nx1 * twc.nx2 > OUTER_COST_WARN:
        stderr.write(f"warning: outer bound grid over {twc.nx1 * twc.nx2} input pairs may be slow\n")
    report = check_all(twc, cfg.samples, cfg.seed, cfg.tol_prob, cfg.tol_mi)
    grid = GridSpec(cfg.grid or 50)
    inner, outer, bounds = _bounds_doc(twc, grid)
    doc = {"source": cfg.source, "report": report.to_dict(), "bounds": bounds}
    if cfg.out:
        _write(_sidecar(cfg.out, ".inner.csv"), inner.to_csv())
        _write(_sidecar(cfg.out, ".outer.csv"), outer.to_csv())
        _write(_sidecar(cfg.out, ".json"), _dump(doc))
    if cfg.format == "json":
        stdout.write(_dump(doc))
    else:
        stdout.write(_human_region("inner", bounds["inner"]) + "\n")
        stdout.write(_human_region("outer", bounds["outer"]) + "\n")
        stdout.write(f"gap={bounds['gap']:.6g}\n")
    return _exit_status(report)


def cmd_validate(cfg, stdout=sys.stdout):
    twc = _load(cfg)
    if cfg.format == "json":
        stdout.write(_dump({"source": cfg.source, "valid": True, "shape": list(twc.shape)}))
    else:
        stdout.write(f"{cfg.source}: valid channel with alphabets x1={twc.nx1} x2={twc.nx2} y1={twc.ny1} y2={twc.ny2}\n")
    return EXIT_TIGHT


COMMANDS = {"check": cmd_check, "region": cmd_region, "bounds": cmd_bounds, "validate": cmd_validate}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
    except ValueError as exc:
        stderr.write(f"twc: error: {exc}\n")
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            kwargs = {"stderr": stderr} if cfg.command in ("region", "bounds") else {}
            return COMMANDS[cfg.command](cfg, stdout=stdout, **kwargs)
    except (ValueError, OSError) as exc:  # ChannelError, ProbabilityError, undecodable files
        stderr.write(f"twc: invalid channel input: {exc}\n")
        return EXIT_INVALID


def run():
    sys.exit(main())
