"""Command-line front end: ``ptt-ldp <subcommand> [flags]``.

Every subcommand writes CSV or JSON to ``--output`` (atomically) or stdout.
Exit status is 0 on success, 2 on validation errors and 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

from . import analysis as an
from .aggregate import ExperimentConfig, ValueDistribution, fit_error_slope, run_scaling_experiment
from .analysis.curves import CurvePoint, fmt, write_curve_csv, write_feasibility_csv
from .core import (DomainBounds, ParameterError, PttFamily, PttParams, derive_ptt_params,
                   preset_params, rescale_from_unit, rescale_to_unit, validate_params)
from .mechanisms import Duchi, Laplace, Ptt, ldp_ratio_audit, multidim_perturb
from .rng import RandomSource

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3

DEFAULT_EPS_GRID = (0.01, 10.0, 50)
DEFAULT_ETA_GRID = (1.0, 20.0, 200)


class CliError(ValueError):
    pass


@dataclass
class RunReport:
    status: int
    outputs: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    message: str = ""

    def to_json(self) -> str:
        return json.dumps({"status": self.status, "outputs": self.outputs,
                           "config": self.config, "message": self.message}, sort_keys=True)


# -- argument plumbing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _mechanism_flags(p, mechanism=True):
    if mechanism:
        p.add_argument("--mechanism", choices=["laplace", "duchi", "ptt"], default="ptt")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--family", choices=["type-i", "type-ii"], default="type-i")
    p.add_argument("--preset", choices=["pm", "theorem9", "optimal"])
    p.add_argument("--q", type=float)
    p.add_argument("--params-file")


def _grid_flag(p, default_note):
    p.add_argument("--grid", nargs=3, metavar=("LO", "HI", "COUNT"),
                   help=f"sweep grid (default {default_note})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptt-ldp", description=__doc__.splitlines()[0])
    parser.add_argument("--echo", action="store_true", help="print the run report to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("perturb", help="perturb values read from a file or stdin")
    _mechanism_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input")
    p.add_argument("--column")
    p.add_argument("--bounds", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--unscale", action="store_true", help="map outputs back onto --bounds")
    p.add_argument("--multidim", action="store_true")
    p.add_argument("--output")

    p = sub.add_parser("params", help="derive a PTT parameter bundle")
    _mechanism_flags(p, mechanism=False)
    p.add_argument("--output")

    p = sub.add_parser("variance", help="report variance, or sweep it")
    _mechanism_flags(p)
    p.add_argument("--attr", type=float, default=0.0)
    p.add_argument("--sweep", choices=["eta", "epsilon"])
    _grid_flag(p, "eta 1..20 x200 / eps 0.01..10 x50")
    p.add_argument("--output")

    p = sub.add_parser("crossover", help="roots of the Duchi-vs-Laplace variance gap")
    p.add_argument("--attr", default="0")
    p.add_argument("--bracket", nargs=2, type=float, default=[0.01, 10.0], metavar=("LO", "HI"))
    _grid_flag(p, "none: roots only")
    p.add_argument("--output")

    p = sub.add_parser("optimize", help="optimal eta, closed form and numeric")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--attr", type=float, default=1.0)
    p.add_argument("--family", choices=["type-i", "type-ii"], default="type-i")
    p.add_argument("--q", type=float)
    _grid_flag(p, "eps 0.01..10 x50")
    p.add_argument("--output")

    p = sub.add_parser("feasibility", help="scan eta against both inequality systems")
    _grid_flag(p, "eta (1, 20] x200")
    p.add_argument("--output")

    p = sub.add_parser("lower-bound", help="g1, h1, h2 over epsilon")
    p.add_argument("--eta", type=float, default=2.0)
    _grid_flag(p, "eps 0.01..10 x50")
    p.add_argument("--output")

    p = sub.add_parser("compare", help="variance gaps against duchi or laplace")
    _mechanism_flags(p)
    p.add_argument("--against", choices=["duchi", "laplace"], default="duchi")
    p.add_argument("--attr", type=float)
    _grid_flag(p, "single --epsilon")
    p.add_argument("--output")

    p = sub.add_parser("simulate", help="mean-estimation error scaling experiment")
    _mechanism_flags(p)
    p.add_argument("--n", default="1000,10000,100000")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--beta", type=float, default=0.05)
    p.add_argument("--distribution", default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--fit-output")

    p = sub.add_parser("audit", help="maximum density ratio over input/output grids")
    _mechanism_flags(p)
    _grid_flag(p, "inputs -1..1 step 0.1")
    p.add_argument("--output")

    p = sub.add_parser("constants", help="lower-bound constants as JSON")
    p.add_argument("--output")
    return parser


def _grid(triple, default, log=False, open_left=False):
    if triple is None:
        lo, hi, count = default
    else:
        try:
            lo, hi, count = float(triple[0]), float(triple[1]), int(triple[2])
        except ValueError:
            raise CliError(f"malformed --grid {' '.join(triple)}") from None
    if count < 1 or not hi >= lo:
        raise CliError(f"bad grid [{lo}, {hi}] x{count}")
    if open_left:
        return np.linspace(lo, hi, count + 1)[1:]
    if log:
        if lo <= 0:
            raise CliError("log-spaced grid needs lo > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _need_eps(args):
    if args.epsilon is None:
        raise CliError("--epsilon is required")
    return args.epsilon


def _ptt_params(args, epsilon=None) -> PttParams:
    if getattr(args, "params_file", None):
        with open(args.params_file, encoding="utf-8") as fh:
            params = PttParams.from_json(fh.read())
        if args.epsilon is not None and not math.isclose(args.epsilon, params.epsilon, rel_tol=1e-15):
            raise CliError("--epsilon disagrees with --params-file")
        return params
    eps = _need_eps(args) if epsilon is None else epsilon
    if args.preset:
        return preset_params(args.preset, eps, args.q)
    if args.eta is None:
        raise CliError("ptt needs --eta, --preset or --params-file")
    return derive_ptt_params(eps, args.eta, args.family)


def _mechanism(args, epsilon=None):
    kind = getattr(args, "mechanism", "ptt")
    if kind == "laplace":
        return Laplace(_need_eps(args) if epsilon is None else epsilon)
    if kind == "duchi":
        return Duchi(_need_eps(args) if epsilon is None else epsilon)
    return Ptt(_ptt_params(args, epsilon))


def _mech_config(mech) -> dict:
    if isinstance(mech, Ptt):
        return {"mechanism": "ptt", "params": mech.params.to_dict()}
    return {"mechanism": mech.name, "epsilon": mech.epsilon}


# -- input parsing -----------------------------------------------------------

def _read_table(text: str, column: Optional[str], multidim: bool):
    """Parse newline-delimited reals or CSV with a header row.

    Returns an ``(n,)`` array, or ``(n, d)`` when ``multidim``.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CliError("no input values")
    first = lines[0].split(",")
    try:
        [float(c) for c in first]
        header = None
        body = lines
        offset = 1
    except ValueError:
        header = [c.strip() for c in first]
        body = lines[1:]
        offset = 2
    rows = list(csv.reader(body))
    if multidim:
        width = len(header) if header else len(rows[0]) if rows else 0
        out = []
        for i, row in enumerate(rows):
            if len(row) != width:
                raise CliError(f"row {i + offset}: expected {width} columns, got {len(row)}")
            try:
                out.append([float(c) for c in row])
            except ValueError:
                raise CliError(f"row {i + offset}: non-numeric token in {row!r}") from None
        return np.array(out, dtype=float).reshape(-1, width)
    if header is None:
        idx = 0
        if any(len(r) != 1 for r in rows):
            bad = next(i for i, r in enumerate(rows) if len(r) != 1)
            raise CliError(f"row {bad + offset}: expected one value per line")
    elif column is not None:
        if column not in header:
            raise CliError(f"column {column!r} not in header {header}")
        idx = header.index(column)
    elif len(header) == 1:
        idx = 0
    else:
        raise CliError("CSV input has several columns; pick one with --column")
    out = []
    for i, row in enumerate(rows):
        try:
            out.append(float(row[idx]))
        except (ValueError, IndexError):
            raise CliError(f"row {i + offset}: bad token {row[idx] if idx < len(row) else ''!r}") from None
    return np.array(out, dtype=float)


# -- subcommands -------------------------------------------------------------

def _cmd_perturb(args, stdin, out):
    mech = _mechanism(args)
    bounds = DomainBounds(*args.bounds) if args.bounds else None
    if args.unscale and bounds is None:
        raise CliError("--unscale needs --bounds")
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = stdin.read()
    raw = _read_table(text, args.column, args.multidim)
    try:
        unit = rescale_to_unit(raw, bounds) if bounds else raw
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if bounds is None and np.any(np.abs(unit) > 1.0):
        bad = int(np.flatnonzero(np.abs(unit).reshape(len(unit), -1).max(axis=1) > 1.0)[0])
        raise CliError(f"row {bad + 1}: value outside [-1, 1]; pass --bounds to rescale")
    rng = RandomSource(args.seed)
    w = csv.writer(out, lineterminator="\n")
    if args.multidim:
        reports = multidim_perturb(unit, mech, rng)
        vals = rescale_from_unit(reports.values, bounds) if args.unscale else reports.values
        d = reports.d
        w.writerow([f"out_{j + 1}" for j in range(d)] + ["chosen_index"])
        for row, j in zip(vals, reports.chosen_index):
            w.writerow([fmt(v) for v in row] + [int(j)])
    else:
        noisy = np.asarray(mech.perturb(unit, rng), dtype=float)
        if args.unscale:
            noisy = rescale_from_unit(noisy, bounds)
        w.writerow(["input", "output", "mechanism", "seed"])
        for x, y in zip(raw, noisy):
            w.writerow([fmt(x), fmt(y), mech.name, args.seed])
    cfg = _mech_config(mech)
    cfg.update(seed=args.seed, bounds=args.bounds, unscale=args.unscale, multidim=args.multidim)
    return cfg


def _cmd_params(args, stdin, out):
    params = _ptt_params(args)
    report = validate_params(params)
    if not report.ok and not params.analysis_only:
        raise ParameterError(f"derived parameters fail validation: {report.failed()}")
    out.write(params.to_json() + "\n")
    return {"params": params.to_dict()}


def _cmd_variance(args, stdin, out):
    if args.sweep == "eta":
        eps = _need_eps(args)
        grid = _grid(args.grid, DEFAULT_ETA_GRID, open_left=args.grid is None)
        pts = []
        for eta in grid:
            if eta < an.ETA_FLOOR:
                continue
            if args.q is not None:
                pts.append(CurvePoint(eta, an.fixed_q_variance(eta, eps, args.q, args.attr), f"fixed-q={fmt(args.q)}"))
            try:
                pts.append(CurvePoint(eta, an.normalized_variance(eta, eps, args.attr, args.family), "normalized"))
            except ParameterError:
                pass
        write_curve_csv(pts, out)
        return {"sweep": "eta", "epsilon": eps, "attr": args.attr, "q": args.q, "family": args.family}
    if args.sweep == "epsilon":
        pts = []
        for eps in _grid(args.grid, DEFAULT_EPS_GRID, log=True):
            mech = _mechanism(args, epsilon=float(eps))
            pts.append(CurvePoint(eps, an.variance_analytic(mech, args.attr), mech.name))
        write_curve_csv(pts, out)
        return {"sweep": "epsilon", "attr": args.attr, "mechanism": args.mechanism}
    mech = _mechanism(args)
    result = {"attr": args.attr, "variance": an.variance_analytic(mech, args.attr)}
    if isinstance(mech, Ptt):
        m = an.moments_by_quadrature(mech.params, args.attr)
        result["quadrature"] = {"mass": m.mass, "mean": m.mean, "variance": m.variance}
    out.write(json.dumps(result) + "\n")
    return _mech_config(mech) | {"attr": args.attr}


def _parse_attrs(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise CliError(f"malformed --attr {text!r}") from None


def _cmd_crossover(args, stdin, out):
    attrs = _parse_attrs(args.attr)
    pts = []
    for A in attrs:
        root = an.crossover_root(A, tuple(args.bracket))
        if root is not None:
            pts.append(CurvePoint(A, root, "root"))
    if args.grid is not None:
        for A in attrs:
            for eps in _grid(args.grid, DEFAULT_EPS_GRID, log=True):
                pts.append(CurvePoint(eps, an.crossover_gap(eps, A), f"F1(A={fmt(A)})"))
    write_curve_csv(pts, out)
    return {"attr": attrs, "bracket": args.bracket, "grid": args.grid}


def _cmd_optimize(args, stdin, out):
    if args.grid is not None or args.epsilon is None:
        pts = []
        for eps in _grid(args.grid, DEFAULT_EPS_GRID, log=True):
            pts.append(CurvePoint(eps, an.optimal_eta_closed_form(eps).eta0, "eta0"))
            m = an.min_variance_numeric(eps, args.attr, args.family)
            pts.append(CurvePoint(eps, m.eta_star, f"eta_star(A={fmt(args.attr)})"))
        write_curve_csv(pts, out)
        return {"grid": args.grid, "attr": args.attr, "family": args.family}
    opt = an.optimal_eta_closed_form(args.epsilon, args.q)
    m = an.min_variance_numeric(args.epsilon, args.attr, args.family)
    result = {"epsilon": args.epsilon, "eta0": opt.eta0, "residual": opt.residual,
              "a_fixed_q": opt.a, "q": args.q, "family": args.family, "attr": args.attr,
              "eta_star": m.eta_star, "var_star": m.var_star, "at_boundary": m.at_boundary,
              "eta_disagreement": m.eta_star - opt.eta0}
    out.write(json.dumps(result) + "\n")
    return {"epsilon": args.epsilon, "q": args.q, "attr": args.attr, "family": args.family}


def _cmd_feasibility(args, stdin, out):
    grid = _grid(args.grid, DEFAULT_ETA_GRID, open_left=args.grid is None)
    write_feasibility_csv(an.scan_eta_feasibility(grid), out)
    return {"grid": args.grid}


def _cmd_lower_bound(args, stdin, out):
    pts = []
    for eps in _grid(args.grid, DEFAULT_EPS_GRID, log=True):
        lb = an.lower_bound_curves(eps, args.eta)
        pts += [CurvePoint(eps, lb.g1, "g1"), CurvePoint(eps, lb.h1, "h1"), CurvePoint(eps, lb.h2, "h2")]
        try:
            prm = derive_ptt_params(eps, args.eta, PttFamily.TYPE_I)
            pts.append(CurvePoint(eps, an.ptt_variance(prm, 1.0), f"worst_case(eta={fmt(args.eta)})"))
        except ParameterError:
            pass
        pts.append(CurvePoint(eps, an.min_variance_numeric(eps, 1.0, "type-i").var_star, "min_worst_case"))
    write_curve_csv(pts, out)
    return {"eta": args.eta, "grid": args.grid}


def _cmd_compare(args, stdin, out):
    other = Duchi if args.against == "duchi" else Laplace
    label = "r" if args.attr is not None else "s"
    if args.grid is None:
        mech = _mechanism(args)
        gap = an.noisy_variance_gaps(mech, other(mech.epsilon), args.attr)
        out.write(json.dumps({label: gap, "against": args.against, "attr": args.attr}) + "\n")
        return _mech_config(mech) | {"against": args.against, "attr": args.attr}
    pts = []
    for eps in _grid(args.grid, DEFAULT_EPS_GRID, log=True):
        mech = _mechanism(args, epsilon=float(eps))
        pts.append(CurvePoint(eps, an.noisy_variance_gaps(mech, other(eps), args.attr),
                              f"{label}({mech.name} vs {args.against})"))
    write_curve_csv(pts, out)
    return {"against": args.against, "attr": args.attr, "grid": args.grid}


def _cmd_simulate(args, stdin, out):
    try:
        ns = [int(x) for x in args.n.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"malformed --n {args.n!r}") from None
    mech = _mechanism(args)
    cfg = ExperimentConfig(ns, mech, trials=args.trials, d=args.d, beta=args.beta,
                           distribution=ValueDistribution.parse(args.distribution),
                           master_seed=args.seed)
    table = run_scaling_experiment(cfg)
    table.to_csv(out)
    if args.fit_output:
        _atomic_write(args.fit_output, fit_error_slope(table).to_json() + "\n")
    return _mech_config(mech) | {"n": ns, "d": args.d, "trials": args.trials,
                                 "beta": args.beta, "distribution": args.distribution,
                                 "seed": args.seed}


def _cmd_audit(args, stdin, out):
    mech = _mechanism(args)
    inputs = _grid(args.grid, (-1.0, 1.0, 21))
    report = ldp_ratio_audit(mech, inputs)
    out.write(json.dumps(report.to_dict()) + "\n")
    return _mech_config(mech) | {"grid": args.grid}


def _cmd_constants(args, stdin, out):
    out.write(json.dumps(an.CONSTANTS.to_dict()) + "\n")
    return {}


_COMMANDS = {
    "perturb": _cmd_perturb, "params": _cmd_params, "variance": _cmd_variance,
    "crossover": _cmd_crossover, "optimize": _cmd_optimize, "feasibility": _cmd_feasibility,
    "lower-bound": _cmd_lower_bound, "compare": _cmd_compare, "simulate": _cmd_simulate,
    "audit": _cmd_audit, "constants": _cmd_constants,
}


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ptt-ldp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_command(argv: Sequence[str], stdin: TextIO = None, stdout: TextIO = None,
                stderr: TextIO = None) -> RunReport:
    """Parse ``argv``, run the subcommand and return its :class:`RunReport`."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    report = RunReport(EXIT_OK, config={"argv": list(argv)})
    try:
        args = build_parser().parse_args(list(argv))
        buf = io.StringIO()
        report.config.update(_COMMANDS[args.command](args, stdin, buf))
        target = getattr(args, "output", None)
        if target:
            _atomic_write(target, buf.getvalue())
            report.outputs.append(target)
        else:
            stdout.write(buf.getvalue())
    except OSError as exc:
        report.status, report.message = EXIT_IO, f"I/O error: {exc}"
    except (ValueError, ArithmeticError) as exc:
        report.status, report.message = EXIT_VALIDATION, f"error: {exc}"
    if report.status != EXIT_OK:
        stderr.write(report.message + "\n")
    elif "--echo" in argv:
        stderr.write(report.to_json() + "\n")
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if any(a in ("-h", "--help") for a in argv):
        try:
            build_parser().parse_args(list(argv))
        except SystemExit as exc:
            return int(exc.code or 0)
    return run_command(argv).status


if __name__ == "__main__":
    sys.exit(main())
