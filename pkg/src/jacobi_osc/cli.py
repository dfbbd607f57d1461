"""Command-line front end: ``jacobi-osc {classify,trace,spectrum,verify,sweep}``.

Exit codes: 0 success, 1 error (bad flags or model), 2 Inconclusive verdict
(classify only).  ``verify`` exits 1 when any report fails.  Logging goes to
stderr at the level named by ``JACOBI_OSC_LOG`` (error, info or debug).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import click
import numpy as np

from ._numerics import fmt_float
from .asymptotics import (
    verify_b1_expansion,
    verify_btilde_order,
    verify_kernel_bound,
    verify_loglog_derivatives,
    verify_lower_bound,
    verify_Qk_vs_lnk,
    verify_ratio_limit,
)
from .criterion import DEFAULT_MARGIN, DEFAULT_WINDOW, Verdict, classify, criterion_series
from .models import (
    CoefficientModel,
    ModelError,
    e_threshold,
    kneser_family,
    loglog_family,
    model_from_config,
)
from .recurrence import accumulate_Q, solve_recurrence, write_trace_csv
from .spectral import growth_profile, nodes_equal_counts

log = logging.getLogger("jacobi_osc")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
FAMILIES = ("kneser", "loglog", "variable_a", "table")
SUITES = ("lemma31", "cor22", "expansion", "kernel", "all")


class CliError(click.ClickException):
    exit_code = EXIT_ERROR


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    c: Optional[float] = None
    k: Optional[int] = None
    model_file: Optional[Path] = None
    N: Optional[int] = None
    lam: float = 0.0
    margin: float = DEFAULT_MARGIN
    window_fraction: float = DEFAULT_WINDOW
    output: str = "json"
    out_path: Optional[Path] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command == "classify" and self.N is not None and self.N < 100:
            raise CliError("--nmax: must be >= 100 for classify")
        if not 0 < self.window_fraction < 1:
            raise CliError("--window: must lie in (0, 1)")
        if self.margin < 0:
            raise CliError("--margin: must be non-negative")

    def model(self) -> CoefficientModel:
        return build_model(self.family, self.c, self.k, self.model_file)


def build_model(family, c, k, model_file) -> CoefficientModel:
    """Model from a JSON file or from --family/--c/--k."""
    if model_file is not None:
        try:
            cfg = json.loads(Path(model_file).read_text())
        except OSError as exc:
            raise CliError(f"--model-file: cannot read {model_file}: {exc.strerror}")
        except json.JSONDecodeError as exc:
            raise CliError(f"--model-file: invalid JSON ({exc.msg} at line {exc.lineno})")
        if family is not None and isinstance(cfg, dict) and cfg.get("family") != family:
            raise CliError(f"--family: {family!r} disagrees with the model file ({cfg.get('family')!r})")
        try:
            return model_from_config(cfg)
        except (ModelError, ValueError) as exc:
            raise CliError(f"--model-file: {exc}")
    if family is None:
        raise CliError("--family: required unless --model-file is given")
    if family == "kneser":
        if c is None:
            raise CliError("--c: required for family kneser")
        return kneser_family(c)
    if family == "loglog":
        if k is None:
            raise CliError("--k: required for family loglog")
        if k < 0:
            raise CliError("--k: must be >= 0")
        return loglog_family(k, 0.0 if c is None else c)
    raise CliError(f"--model-file: family {family} needs a model file")


def _emit(text: str, out_path: Optional[Path]) -> None:
    if out_path is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out_path).write_text(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _cell(x) -> str:
    if isinstance(x, bool) or isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return fmt_float(x)
    return str(x)


def _configure_logging() -> None:
    level = os.environ.get("JACOBI_OSC_LOG", "error").strip().lower()
    if level not in LOG_LEVELS:
        raise CliError(f"JACOBI_OSC_LOG: expected one of {', '.join(LOG_LEVELS)}, got {level!r}")
    root = logging.getLogger("jacobi_osc")
    root.setLevel(LOG_LEVELS[level])
    # rebind on every run so an embedding caller's stderr swap is honoured
    for h in [h for h in root.handlers if getattr(h, "_jacobi_osc_cli", False)]:
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._jacobi_osc_cli = True
    root.addHandler(handler)


def _guard(fn):
    """Turn library errors into exit code 1 with the message."""
    try:
        return fn()
    except click.ClickException:
        raise
    except (ValueError, ArithmeticError, KeyError) as exc:
        raise CliError(str(exc))


class _Group(click.Group):
    """Group whose usage errors exit 1 (2 is reserved for Inconclusive)."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_ERROR)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_ERROR)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def model_options(f):
    f = click.option("--model-file", type=click.Path(dir_okay=False, path_type=Path), help="JSON model config.")(f)
    f = click.option("--k", type=int, help="Iterated-log depth (loglog).")(f)
    f = click.option("--c", type=float, help="Coupling constant.")(f)
    f = click.option("--family", type=click.Choice(FAMILIES), help="Built-in model family.")(f)
    return f


def out_option(default_format: str):
    def deco(f):
        f = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write here instead of stdout.")(f)
        f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=default_format, show_default=True)(f)
        return f

    return deco


@click.group(cls=_Group)
def main():
    """Oscillation criteria and eigenvalue counts for Jacobi operators."""
    _configure_logging()


@main.command("classify")
@model_options
@click.option("--nmax", type=int, default=100_000, show_default=True)
@click.option("--margin", type=float, default=DEFAULT_MARGIN, show_default=True)
@click.option("--window", type=float, default=DEFAULT_WINDOW, show_default=True)
@out_option("json")
def cmd_classify(family, c, k, model_file, nmax, margin, window, fmt, out):
    """Compare the tail of K(n) against -1/4."""
    cfg = RunConfig("classify", family, c, k, model_file, nmax, margin=margin, window_fraction=window, output=fmt, out_path=out)
    model = cfg.model()
    result = _guard(lambda: classify(criterion_series(model, cfg.N, cfg.window_fraction), cfg.margin))
    rep = result.report()
    if fmt == "json":
        text = json.dumps(rep) + "\n"
    else:
        keys = ["verdict", "tail_inf", "tail_sup", "threshold", "margin", "N"]
        text = _csv_text(keys, [[_cell(rep[key]) for key in keys]])
    _emit(text, out)
    return EXIT_INCONCLUSIVE if result.verdict is Verdict.Inconclusive else EXIT_OK


@main.command("trace")
@model_options
@click.option("--nmax", type=int, default=100, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True)
@out_option("csv")
def cmd_trace(family, c, k, model_file, nmax, lam, fmt, out):
    """Solution with u(n0-1) = u(n0) = 1: one CSV row per n = n0 .. nmax."""
    model = build_model(family, c, k, model_file)
    if nmax < model.n0:
        raise CliError(f"--nmax: must be >= n0 = {model.n0}")
    trace = _guard(lambda: solve_recurrence(model, lam, (1.0, 1.0), nmax + 1))
    nodes = [n for n in trace.nodes if n <= nmax]
    Q = None
    if np.all(trace.values.mantissa != 0):
        Q = _guard(lambda: accumulate_Q(model, trace.values, nmax + 1))
    else:
        log.info("Q not reported: the solution vanishes on the range")
    trace = replace(trace, nodes=nodes, Q=Q)
    if fmt == "csv":
        text = write_trace_csv(trace, last=nmax)
    else:
        text = json.dumps({"n0": model.n0, "N": nmax, "lambda": lam, "nodes": nodes, "node_count": len(nodes)}) + "\n"
    _emit(text, out)
    click.echo(f"nodes: {len(nodes)}", err=True)
    return EXIT_OK


def _parse_sizes(text: str) -> list:
    try:
        sizes = [int(float(s)) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"--sizes: cannot parse {text!r} as a comma-separated list of integers")
    if not sizes or any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise CliError("--sizes: expected a strictly increasing list of positive integers")
    return sizes


@main.command("spectrum")
@model_options
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True)
@click.option("--sizes", default="1000,10000,100000,1000000", show_default=True, help="Comma-separated section sizes.")
@out_option("json")
def cmd_spectrum(family, c, k, model_file, lam, sizes, fmt, out):
    """Eigenvalues below lambda for growing Dirichlet sections."""
    model = build_model(family, c, k, model_file)
    profile = _guard(lambda: growth_profile(model, lam, _parse_sizes(sizes)))
    _emit(profile.to_json() + "\n" if fmt == "json" else profile.to_csv(), out)
    return EXIT_OK


def _suite_reports(suite: str, model: Optional[CoefficientModel], k: int, nmax: Optional[int], epsilon: float) -> list:
    base = model if model is not None else kneser_family(0.0)
    reports = []
    if suite in ("lemma31", "all"):
        N = nmax or 1_000_000
        reports.append(verify_ratio_limit(base, N))
        if base.a_bounds is not None:
            reports.append(verify_lower_bound(base, N))
    if suite in ("cor22", "all"):
        N = nmax or 100_000
        if k >= 1:
            lo = max(100.0, 10 * math.ceil(e_threshold(k) + 1))
            reports.append(verify_loglog_derivatives(k, np.geomspace(lo, max(N, 10 * lo), 9)))
        reports.append(verify_Qk_vs_lnk(k, N))
        if k in (1, 2, 3):
            reports.append(verify_btilde_order(k, N, 3))
    if suite in ("expansion", "all"):
        N = nmax or 100_000
        for alpha in (0.5, complex(0.5, 1.0)):
            reports.append(verify_b1_expansion(base, alpha, N, start=min(100, N // 2)))
    if suite in ("kernel", "all"):
        N = nmax or 1000
        reports.append(verify_kernel_bound(base, epsilon, N))
    return reports


@main.command("verify")
@model_options
@click.option("--suite", type=click.Choice(SUITES), default="all", show_default=True)
@click.option("--nmax", type=int, help="Range end (default per suite: 1e6, 1e5, 1e5, 1e3).")
@click.option("--epsilon", type=float, default=1.0, show_default=True, help="Kernel probe: alpha = 1/2 + i*epsilon.")
@out_option("json")
def cmd_verify(family, c, k, model_file, suite, nmax, epsilon, fmt, out):
    """Run the boundedness checks; exit 0 iff all pass.

    The model (default kneser c = 0) feeds lemma31, expansion and kernel;
    cor22 builds its iterated-log models from --k (default 1).
    """
    model = None
    if family is not None or model_file is not None:
        model = build_model(family, c, k, model_file)
    depth = 1 if k is None else k
    if depth < 0:
        raise CliError("--k: must be >= 0")
    if epsilon <= 0:
        raise CliError("--epsilon: must be positive")
    reports = _guard(lambda: _suite_reports(suite, model, depth, nmax, epsilon))
    if fmt == "json":
        text = json.dumps([r.report() for r in reports]) + "\n"
    else:
        rows = []
        for r in reports:
            rep = r.report()
            bound = "" if rep["bound"] is None else _cell(rep["bound"])
            rows.append([rep["quantity"], _cell(rep["range"][0]), _cell(rep["range"][1]), _cell(rep["scaled_sup"]), bound, _cell(rep["passed"])])
        text = _csv_text(["quantity", "range_start", "range_end", "scaled_sup", "bound", "passed"], rows)
    _emit(text, out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_ERROR


def grid(c_from: float, c_to: float, c_step: float) -> list:
    """from, from+step, ... <= to, rounded to 12 decimals so 0.1*3 prints as 0.3."""
    if not c_step > 0 or c_to < c_from:
        return []
    count = int(math.floor((c_to - c_from) / c_step + 1e-9)) + 1
    return [round(c_from + i * c_step, 12) for i in range(count)]


def sweep_row(family: str, k: Optional[int], c: float, N: int, margin: float, window: float) -> list:
    """c, tail_inf, tail_sup, verdict, node_count, eig_count for one grid point."""
    model = kneser_family(c) if family == "kneser" else loglog_family(k, c)
    result = classify(criterion_series(model, N, window), margin)
    nodes, count, _ = nodes_equal_counts(model, 0.0, N)
    ev = result.evidence
    return [c, ev.tail_inf, ev.tail_sup, result.verdict.value, nodes, count]


@main.command("sweep")
@click.option("--family", type=click.Choice(["kneser", "loglog"]), default="kneser", show_default=True)
@click.option("--k", type=int, help="Iterated-log depth (loglog).")
@click.option("--c-from", "c_from", type=float, required=True)
@click.option("--c-to", "c_to", type=float, required=True)
@click.option("--c-step", "c_step", type=float, required=True)
@click.option("--nmax", type=int, default=100_000, show_default=True)
@click.option("--margin", type=float, default=DEFAULT_MARGIN, show_default=True)
@click.option("--window", type=float, default=DEFAULT_WINDOW, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes; output stays in grid order.")
@out_option("csv")
def cmd_sweep(family, k, c_from, c_to, c_step, nmax, margin, window, jobs, fmt, out):
    """Classify and count along a grid of coupling constants."""
    RunConfig("sweep", family, None, k, None, nmax, margin=margin, window_fraction=window)
    cs = grid(c_from, c_to, c_step)
    if not cs:
        raise CliError("--c-step: the grid is empty (need c-step > 0 and c-to >= c-from)")
    if family == "loglog" and (k is None or k < 0):
        raise CliError("--k: a non-negative depth is required for family loglog")
    if jobs < 1:
        raise CliError("--jobs: must be >= 1")
    args = [(family, k, c, nmax, margin, window) for c in cs]
    if jobs == 1:
        rows = _guard(lambda: [sweep_row(*a) for a in args])
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = _guard(lambda: list(pool.map(sweep_row, *zip(*args))))
    header = ["c", "tail_inf", "tail_sup", "verdict", "node_count", "eig_count"]
    if fmt == "csv":
        text = _csv_text(header, [[_cell(x) for x in row] for row in rows])
    else:
        text = json.dumps([dict(zip(header, row)) for row in rows]) + "\n"
    _emit(text, out)
    return EXIT_OK


if __name__ == "__main__":
    main()
