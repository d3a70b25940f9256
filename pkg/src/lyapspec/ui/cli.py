"""Command-line front end: analyze, surgery, coincide, reproduce and scan."""

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .. import __version__
from ..app import examples
from ..app.characteristic import h_expsum, sample_characteristic
from ..app.expsum import tail_thresholds
from ..app.inflect import SCHEMA_VERSION, classify_milestones, find_inflections, milestone_concavity
from ..app.plmap import PLMap, new_map
from ..app.spectrum import (
    bowen_dimension,
    degenerate_spectrum,
    l_param,
    sample_spectrum,
    terminal_values,
)
from ..app.surgery import build_chain, milestone_coincidence_search
from ..core.config import Settings
from ..core.errors import LyapspecError, NumericalError, UsageError
from ..infrastructure.artifacts import (
    AnalysisArtifacts,
    dumps_json,
    load_map_file,
    write_characteristic_csv,
    write_expsum_csv,
    write_json,
    write_spectrum_csv,
)
from . import figures

logger = logging.getLogger("lyapspec.ui.cli")

T_CLAMP = 60.0
REPRODUCE_CHOICES = ("all", "T-minus", "T-plus", "T-minus-star", "coincidence", "figures")
# random maps for scan: λ log-uniform on this range
RANDOM_LAMBDA_RANGE = (0.05, 10.0)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class Comparison:
    example: str
    quantity: str
    expected: float
    computed: float
    tolerance: float
    relative: bool = False

    @property
    def delta(self) -> float:
        if math.isnan(self.computed):
            return math.inf
        diff = abs(self.computed - self.expected)
        return diff / abs(self.expected) if self.relative else diff

    @property
    def passed(self) -> bool:
        return self.delta <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "example": self.example,
            "quantity": self.quantity,
            "expected": self.expected,
            "computed": self.computed,
            "delta": self.delta,
            "tolerance": self.tolerance,
            "relative": self.relative,
            "passed": self.passed,
        }


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="lyapspec", description="Lyapunov spectrum and inflections of piecewise linear maps")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol", type=float, default=None, help="t tolerance for certified brackets")
    parser.add_argument("--out-dir", default=None, help="directory for emitted files")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomly generated maps")
    parser.add_argument("--json", action="store_true", help="print a machine-readable summary on stdout")
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--no-log-file", action="store_true", help="log to stderr only")
    parser.add_argument("--config", default=None, help="path to an INI configuration file")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    analyze = sub.add_parser("analyze", help="certified inflection analysis of a map file")
    analyze.add_argument("map_file")
    analyze.add_argument("--t-window", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    analyze.add_argument("--svg", action="store_true", help="also render spectrum.svg and characteristic.svg")
    analyze.add_argument("--points", type=int, default=None, help="grid points for the CSV samples")

    surgery = sub.add_parser("surgery", help="grow a map by root-surgery")
    surgery.add_argument("base_file", nargs="?", default=None, help="base map (default: T-minus)")
    surgery.add_argument("--n-target", type=int, required=True)
    surgery.add_argument("--growth", type=float, default=None)
    surgery.add_argument("--lambda-cap", type=float, default=None)

    coincide = sub.add_parser("coincide", help="place an inflection on the middle milestone")
    lam1 = coincide.add_mutually_exclusive_group()
    lam1.add_argument("--x1", type=float, default=None)
    lam1.add_argument("--lam1", type=float, default=None)
    lam3 = coincide.add_mutually_exclusive_group()
    lam3.add_argument("--x3", type=float, default=None)
    lam3.add_argument("--lam3", type=float, default=None)
    coincide.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    coincide.add_argument("--x-tol", type=float, default=1e-9)

    reproduce = sub.add_parser("reproduce", help="compare the built-in examples with published values")
    reproduce.add_argument("which", nargs="?", default="all", choices=REPRODUCE_CHOICES)

    scan = sub.add_parser("scan", help="grid sampling without certification")
    scan.add_argument("map_file", nargs="?", default=None)
    scan.add_argument("--random-branches", type=int, default=None, help="scan a random map with this many branches")
    scan.add_argument("--t-window", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    scan.add_argument("--points", type=int, default=None)

    return parser


# --- helpers ---

def figure_grid(pl_map: PLMap, points: int, t_window: Optional[Sequence[float]] = None,
                extra: Sequence[float] = ()) -> np.ndarray:
    """Sampling grid spanning H's tail thresholds (and any extra t values) with a unit
    margin, clamped to [-60, 60]."""
    if points < 2:
        raise UsageError("A grid needs at least 2 points")
    if t_window is not None:
        lo, hi = t_window
        if not lo < hi:
            raise UsageError(f"Empty t-window ({lo!r}, {hi!r})")
    else:
        t_lo, t_hi = tail_thresholds(h_expsum(pl_map))
        lo = min([t_lo, t_hi, *extra]) - 1.0
        hi = max([t_lo, t_hi, *extra]) + 1.0
        lo, hi = max(lo, -T_CLAMP), min(hi, T_CLAMP)
    return np.linspace(lo, hi, points)


def random_map(rng: np.random.Generator, branches: int) -> PLMap:
    lo, hi = RANDOM_LAMBDA_RANGE
    lambdas = np.exp(rng.uniform(math.log(lo), math.log(hi), size=branches))
    return new_map(log_slopes=lambdas.tolist(), label=f"random-{branches}")


def _degenerate_report(pl_map: PLMap) -> Dict[str, Any]:
    point = degenerate_spectrum(pl_map)
    return {
        "schema_version": SCHEMA_VERSION,
        "map": pl_map.to_dict(),
        "degenerate": True,
        "transversal_count": 0,
        "tangential_count": 0,
        "inflections": [],
        "spectrum_point": {"alpha": point.alpha, "L": point.L},
    }


def _spectrum_extras(pl_map: PLMap) -> Dict[str, Any]:
    s, alpha_at_max = bowen_dimension(pl_map)
    left, right = terminal_values(pl_map)
    lo, hi = pl_map.spectrum_domain()
    return {
        "domain": [lo, hi],
        "bowen_dimension": s,
        "alpha_at_max": alpha_at_max,
        "terminal_values": [left, right],
        "milestones": [m.log_slope for m in pl_map.milestones()],
        "milestone_concavity": milestone_concavity(pl_map),
    }


def _write_curves(pl_map: PLMap, grid: np.ndarray, out_dir: str) -> Dict[str, str]:
    paths = {
        "spectrum_csv": os.path.join(out_dir, "spectrum.csv"),
        "characteristic_csv": os.path.join(out_dir, "characteristic.csv"),
    }
    write_spectrum_csv(paths["spectrum_csv"], sample_spectrum(pl_map, grid))
    write_characteristic_csv(paths["characteristic_csv"], sample_characteristic(pl_map, grid))
    return paths


# --- commands ---

def cmd_analyze(map_file: str, settings: Settings, t_window: Optional[Sequence[float]] = None,
                emit_svg: bool = False, points: Optional[int] = None) -> AnalysisArtifacts:
    pl_map = load_map_file(map_file)
    out_dir = settings.out_dir
    tolerances = {
        "t_tol": settings.t_tol,
        "value_tol": settings.value_tol,
        "zero_band": settings.zero_band,
        "coincide_tol": settings.coincide_tol,
    }

    if pl_map.is_degenerate:
        logger.warning("All branches share one slope: the spectrum is a single point")
        report = _degenerate_report(pl_map)
        paths = {"report": os.path.join(out_dir, "report.json"),
                 "spectrum_csv": os.path.join(out_dir, "spectrum.csv")}
        write_json(paths["report"], report)
        write_spectrum_csv(paths["spectrum_csv"], [degenerate_spectrum(pl_map)])
        return AnalysisArtifacts(pl_map, report, paths, tolerances, degenerate=True)

    certified = find_inflections(
        pl_map, tol=settings.t_tol, zero_band=settings.zero_band,
        value_tol=settings.value_tol, max_iter=settings.max_bisect_iter,
    )
    certified = classify_milestones(certified, coincide_tol=settings.coincide_tol)
    report = certified.to_dict()
    report["spectrum"] = _spectrum_extras(pl_map)

    grid = figure_grid(pl_map, points or settings.grid_points, t_window, extra=certified.t_values)
    paths = _write_curves(pl_map, grid, out_dir)
    paths["h_terms_csv"] = os.path.join(out_dir, "h_terms.csv")
    write_expsum_csv(paths["h_terms_csv"], h_expsum(pl_map))
    paths["report"] = os.path.join(out_dir, "report.json")
    write_json(paths["report"], report)

    if emit_svg:
        marked = [(p.alpha, l_param(pl_map, p.t)) for p in certified.inflections]
        paths["spectrum_svg"] = os.path.join(out_dir, "spectrum.svg")
        paths["characteristic_svg"] = os.path.join(out_dir, "characteristic.svg")
        figures.save_svg(figures.spectrum_figure(sample_spectrum(pl_map, grid), marked, pl_map.label),
                         paths["spectrum_svg"])
        figures.save_svg(figures.characteristic_figure(sample_characteristic(pl_map, grid),
                                                       certified.t_values, pl_map.label),
                         paths["characteristic_svg"])

    logger.info(f"Analysis written to {out_dir}")
    return AnalysisArtifacts(pl_map, report, paths, tolerances)


def cmd_surgery(base_file: Optional[str], n_target: int, settings: Settings,
                growth: Optional[float] = None, lambda_cap: Optional[float] = None) -> Dict[str, Any]:
    base = load_map_file(base_file) if base_file else examples.T_MINUS.map
    trace = build_chain(
        base,
        n_target,
        growth=growth or settings.growth,
        lambda_cap=lambda_cap or settings.lambda_cap,
        tol=settings.t_tol,
        zero_band=settings.zero_band,
    )
    path = os.path.join(settings.out_dir, "surgery.json")
    write_json(path, trace.to_dict())
    return {
        "path": path,
        "added_log_slopes": trace.added_log_slopes,
        "counts": trace.counts,
        "final_count": trace.final_report.transversal_count,
    }


def cmd_coincide(lam1: float, lam3: float, bracket: Sequence[float], settings: Settings,
                 x_tol: float = 1e-9) -> Dict[str, Any]:
    result = milestone_coincidence_search(
        lam1, lam3, (bracket[0], bracket[1]), tol=x_tol,
        coincide_tol=settings.coincide_tol, zero_band=settings.zero_band,
    )
    path = os.path.join(settings.out_dir, "coincidence.json")
    write_json(path, result.to_dict())
    return {
        "path": path,
        "x_star": result.x_star,
        "t_values": result.report.t_values,
        "alpha_values": result.report.alpha_values,
        "phi": result.phi,
    }


def _compare_example(example: examples.ExampleMap, settings: Settings) -> List[Comparison]:
    report = find_inflections(example.map, tol=settings.t_tol, zero_band=settings.zero_band)
    rows = [Comparison(example.name, "count", len(example.t_values), report.transversal_count, 0.0)]
    computed_t = report.t_values + [math.nan] * (len(example.t_values) - len(report.t_values))
    computed_a = report.alpha_values + [math.nan] * (len(example.alpha_values) - len(report.alpha_values))
    for i, (expected, computed) in enumerate(zip(example.t_values, computed_t), start=1):
        rows.append(Comparison(example.name, f"t{i}", expected, computed, example.t_tol))
    for i, (expected, computed) in enumerate(zip(example.alpha_values, computed_a), start=1):
        rows.append(Comparison(example.name, f"alpha{i}", expected, computed, example.alpha_tol,
                               relative=example.alpha_relative))
    if example.negative_param_pattern is not None:
        observed = report.predicates.get("negative_param_pattern")
        rows.append(Comparison(example.name, "negative_param_pattern",
                               float(example.negative_param_pattern), float(bool(observed)), 0.0))
    return rows


def _compare_coincidence(settings: Settings) -> List[Comparison]:
    ex = examples.COINCIDENCE
    result = milestone_coincidence_search(ex.lam1, ex.lam3, ex.bracket, coincide_tol=ex.coincide_tol,
                                          zero_band=settings.zero_band)
    report = result.report
    rows = [Comparison(ex.name, "x_star", ex.x_star, result.x_star, ex.x_tol),
            Comparison(ex.name, "count", len(ex.t_values), report.transversal_count, 0.0)]
    computed_t = report.t_values + [math.nan] * (len(ex.t_values) - len(report.t_values))
    computed_a = report.alpha_values + [math.nan] * (len(ex.alpha_values) - len(report.alpha_values))
    for i, (expected, computed) in enumerate(zip(ex.t_values, computed_t), start=1):
        rows.append(Comparison(ex.name, f"t{i}", expected, computed, 5e-4))
    for i, (expected, computed) in enumerate(zip(ex.alpha_values, computed_a), start=1):
        rows.append(Comparison(ex.name, f"alpha{i}", expected, computed, 5e-4))
    log_x = math.log(result.x_star)
    second = computed_a[1] if len(computed_a) > 1 else math.nan
    rows.append(Comparison(ex.name, "alpha2_vs_milestone", log_x, second, ex.coincide_tol))
    return rows


def _emit_example_curves(settings: Settings) -> Dict[str, str]:
    paths: Dict[str, str] = {}
    maps = [ex.map for ex in examples.CATALOGUE.values()]
    coincidence = examples.COINCIDENCE
    maps.append(new_map(slopes=[coincidence.x1, coincidence.x_star, coincidence.x3], label=coincidence.name))
    for pl_map in maps:
        directory = os.path.join(settings.out_dir, pl_map.label)
        for key, path in _write_curves(pl_map, figure_grid(pl_map, settings.grid_points), directory).items():
            paths[f"{pl_map.label}/{key}"] = path
    return paths


def cmd_reproduce(which: str, settings: Settings) -> Dict[str, Any]:
    rows: List[Comparison] = []
    selected = list(examples.CATALOGUE) + ["coincidence"] if which == "all" else [which]
    for name in selected:
        if name == "coincidence":
            rows.extend(_compare_coincidence(settings))
        elif name in examples.CATALOGUE:
            rows.extend(_compare_example(examples.CATALOGUE[name], settings))
    paths = _emit_example_curves(settings) if which in ("all", "figures") else {}
    if which not in ("all", "figures"):
        ex = examples.CATALOGUE.get(which)
        if ex is not None:
            paths = _write_curves(ex.map, figure_grid(ex.map, settings.grid_points),
                                  os.path.join(settings.out_dir, ex.name))
    failures = sum(1 for row in rows if not row.passed)
    if failures:
        logger.error(f"{failures} reproduced quantities are outside tolerance")
    return {"comparisons": [row.to_dict() for row in rows], "failures": failures, "paths": paths}


def cmd_scan(map_file: Optional[str], settings: Settings, seed: int = 0, random_branches: Optional[int] = None,
             t_window: Optional[Sequence[float]] = None, points: Optional[int] = None) -> Dict[str, Any]:
    if (map_file is None) == (random_branches is None):
        raise UsageError("scan needs exactly one of a map file or --random-branches")
    if map_file is not None:
        pl_map = load_map_file(map_file)
    else:
        pl_map = random_map(np.random.default_rng(seed), random_branches)

    if pl_map.is_degenerate:
        return {"map": pl_map.to_dict(), "degenerate": True, "sign_changes": 0}

    grid = figure_grid(pl_map, points or settings.grid_points, t_window)
    paths = _write_curves(pl_map, grid, settings.out_dir)
    signs = np.sign([s.G for s in sample_characteristic(pl_map, grid)])
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    return {"map": pl_map.to_dict(), "degenerate": False, "sign_changes": changes, "paths": paths,
            "t_window": [float(grid[0]), float(grid[-1])]}


# --- output ---

def _print_human(command: str, summary: Dict[str, Any]):
    if command == "reproduce":
        for row in summary["comparisons"]:
            status = "PASS" if row["passed"] else "FAIL"
            print(f"{status}  {row['example']:<14} {row['quantity']:<22} expected={row['expected']:<12.6g} "
                  f"computed={row['computed']:<14.8g} delta={row['delta']:.3g}")
        print(f"{summary['failures']} failure(s)")
        return
    if command == "analyze" and summary.get("degenerate"):
        print("Degenerate spectrum: all branches share one slope; the spectrum is a single point.")
    for key, value in summary.items():
        if key != "report":
            print(f"{key}: {value}")


def execute(args: argparse.Namespace, settings: Settings) -> int:
    if args.tol is not None:
        if args.tol <= 0:
            print("error: --tol must be positive", file=sys.stderr)
            return UsageError.exit_code
        settings = replace(settings, t_tol=args.tol)
    if args.out_dir is not None:
        settings = replace(settings, out_dir=args.out_dir)

    exit_code = 0
    try:
        if args.command == "analyze":
            artifacts = cmd_analyze(args.map_file, settings, args.t_window, args.svg or settings.emit_svg,
                                    args.points)
            summary = artifacts.to_dict()
            if artifacts.report and not artifacts.degenerate:
                summary["t_values"] = [p["t"] for p in artifacts.report["inflections"]]
                summary["alpha_values"] = [p["alpha"] for p in artifacts.report["inflections"]]
        elif args.command == "surgery":
            summary = cmd_surgery(args.base_file, args.n_target, settings, args.growth, args.lambda_cap)
        elif args.command == "coincide":
            x1 = examples.COINCIDENCE.x1 if args.x1 is None else args.x1
            x3 = examples.COINCIDENCE.x3 if args.x3 is None else args.x3
            lam1 = args.lam1 if args.lam1 is not None else math.log(x1)
            lam3 = args.lam3 if args.lam3 is not None else math.log(x3)
            bracket = args.bracket or examples.COINCIDENCE.bracket
            summary = cmd_coincide(lam1, lam3, bracket, settings, args.x_tol)
        elif args.command == "reproduce":
            summary = cmd_reproduce(args.which, settings)
            if summary["failures"]:
                exit_code = 4
        else:
            summary = cmd_scan(args.map_file, settings, args.seed, args.random_branches, args.t_window, args.points)
    except LyapspecError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except AssertionError as e:
        # broken internal invariant: reported as a numerical failure
        logger.critical(f"{args.command} failed an internal check: {e}")
        print(f"error: internal check failed: {e}", file=sys.stderr)
        return NumericalError.exit_code

    if args.json:
        sys.stdout.write(dumps_json(summary))
    else:
        _print_human(args.command, summary)
    return exit_code


def main(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> int:
    args = build_parser().parse_args(argv)
    return execute(args, settings or Settings())
