"""Command-line interface.

Subcommands
-----------
ml       evaluate the two-parameter Mittag-Leffler function
relax    sample relaxation curves for one or more orders as CSV
op       apply the log-kernel fractional operator to a chosen function
asym     tabulate exact stress against its large-time tail
cmcheck  run the complete-monotonicity finite-difference test
fit      estimate model parameters from a (t, stress) data file
figures  write the standard curve CSVs together with PNG renderings

Exit codes: 0 success, 2 usage error, 3 domain or validation error,
4 numerical failure (including a fit that did not converge).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .analysis import asymptotic_matching, check_complete_monotonicity
from .errors import (
    DomainError,
    GridError,
    NonConvergentError,
    ParseError,
    QuadratureFailure,
    ValidationError,
)
from .fitting import FitConfig, PARAM_NAMES, fit_relaxation, load_dataset
from .hadamard import OperatorParams, apply_operator
from .mlf import MLQuery, QuadratureConfig, ml_eval
from .models import (
    GridKind,
    GridSpec,
    RelaxationScenario,
    asymptotic_stress,
    sample_curve,
    stress_relaxation,
)

FIGURE_ORDERS = (0.25, 0.5, 0.75, 0.9, 1.0)
MATCHING_ORDERS = (0.25, 0.5, 0.75, 0.9, 0.95)


class OutputFormat(Enum):
    CSV = "csv"
    STRUCTURED_TEXT = "text"


@dataclass(frozen=True)
class OutputSpec:
    """Where results go and how numbers are rendered."""

    format: OutputFormat = OutputFormat.STRUCTURED_TEXT
    destination: str = "-"
    precision: int = 12

    def __post_init__(self):
        if not 6 <= self.precision <= 17:
            raise ValidationError(
                f"precision must be in [6, 17], got {self.precision}"
            )


def _fmt(value: float, precision: int) -> str:
    return format(float(value), f".{precision}g")


def _write_lines(lines: list[str], destination: str) -> None:
    text = "\n".join(lines) + "\n"
    if destination == "-":
        sys.stdout.write(text)
    else:
        Path(destination).write_text(text)


# ---------------------------------------------------------------------------
# flag parsing helpers (raise ArgumentTypeError so argparse exits with code 2)

def _precision_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"precision must be an integer, got {text!r}")
    if not 6 <= value <= 17:
        raise argparse.ArgumentTypeError(f"precision must be in [6, 17], got {value}")
    return value


def _grid_arg(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be min:max:count, got {text!r}"
        )
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return lo, hi, count


def _float_list_arg(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in text.split(",") if p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _name_list_arg(text: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    for name in names:
        if name not in PARAM_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown parameter {name!r}; choose from {', '.join(PARAM_NAMES)}"
            )
    return names


def _assign_list_arg(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        name, _, raw = item.partition("=")
        try:
            out[name.strip()] = float(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value in {item!r}")
    return out


def _bounds_list_arg(text: str) -> dict[str, tuple[float, float]]:
    out: dict[str, tuple[float, float]] = {}
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item or ":" not in item:
            raise argparse.ArgumentTypeError(
                f"expected name=lo:hi, got {item!r}"
            )
        name, _, raw = item.partition("=")
        lo_s, _, hi_s = raw.partition(":")
        try:
            out[name.strip()] = (float(lo_s), float(hi_s))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad bounds in {item!r}")
    return out


def _f_selector_arg(text: str) -> tuple[str, float]:
    if text == "eigen":
        return ("eigen", 0.0)
    kind, _, raw = text.partition(":")
    if kind in ("const", "logpow") and raw:
        try:
            return (kind, float(raw))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"function selector must be const:VALUE, logpow:EXPONENT or eigen, got {text!r}"
    )


# ---------------------------------------------------------------------------
# shared builders

def _add_param_flags(sp: argparse.ArgumentParser, with_sigma0: bool = False) -> None:
    sp.add_argument("--E", type=float, default=1.0, help="elastic modulus (default 1)")
    sp.add_argument("--theta", type=float, default=1.0,
                    help="strain-hardening coefficient (default 1)")
    sp.add_argument("--eta0", type=float, default=1.0,
                    help="initial viscosity (default 1)")
    if with_sigma0:
        sp.add_argument("--sigma0", type=float, default=1.0,
                        help="initial stress scale (default 1)")


def _add_output_flags(sp: argparse.ArgumentParser, formats: bool = False) -> None:
    sp.add_argument("--out", default="-", metavar="PATH",
                    help="output file, '-' for stdout (default)")
    sp.add_argument("--precision", type=_precision_arg, default=12,
                    help="significant digits, 6..17 (default 12)")
    if formats:
        sp.add_argument("--format", choices=[f.value for f in OutputFormat],
                        default=OutputFormat.STRUCTURED_TEXT.value,
                        help="text (key=value lines) or csv (default text)")


def _add_grid_flags(sp: argparse.ArgumentParser, required: bool = True) -> None:
    group = sp.add_mutually_exclusive_group(required=required)
    group.add_argument("--linear", type=_grid_arg, metavar="MIN:MAX:COUNT",
                       help="uniform time grid")
    group.add_argument("--log", type=_grid_arg, metavar="MIN:MAX:COUNT",
                       help="geometric time grid (MIN > 0)")


def _grid_from_ns(ns: argparse.Namespace) -> GridSpec:
    if getattr(ns, "linear", None) is not None:
        lo, hi, count = ns.linear
        return GridSpec(GridKind.LINEAR, lo, hi, count)
    lo, hi, count = ns.log
    return GridSpec(GridKind.LOGARITHMIC, lo, hi, count)


def _params_from_ns(ns: argparse.Namespace, nu: float) -> OperatorParams:
    return OperatorParams(nu=nu, E=ns.E, theta=ns.theta, eta0=ns.eta0)


def _scenario_from_ns(ns: argparse.Namespace, nu: float) -> RelaxationScenario:
    return RelaxationScenario(
        p=_params_from_ns(ns, nu), sigma0=getattr(ns, "sigma0", 1.0)
    )


def _out_spec(ns: argparse.Namespace, default: OutputFormat) -> OutputSpec:
    fmt = OutputFormat(getattr(ns, "format", default.value))
    return OutputSpec(format=fmt, destination=ns.out, precision=ns.precision)


def _emit_scalar(pairs: list[tuple[str, str]], spec: OutputSpec) -> None:
    if spec.format is OutputFormat.CSV:
        lines = [",".join(k for k, _ in pairs), ",".join(v for _, v in pairs)]
    else:
        lines = [f"{k}={v}" for k, v in pairs]
    _write_lines(lines, spec.destination)


# ---------------------------------------------------------------------------
# subcommands

def cmd_ml(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.STRUCTURED_TEXT)
    result = ml_eval(MLQuery(alpha=ns.alpha, beta=ns.beta, x=ns.x, tol=ns.tol))
    _emit_scalar(
        [
            ("value", _fmt(result.value, spec.precision)),
            ("regime", result.regime.value),
            ("est_error", _fmt(result.est_error, spec.precision)),
        ],
        spec,
    )
    return 0


def cmd_relax(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.CSV)
    grid = _grid_from_ns(ns)
    labels = [f"nu={format(nu, 'g')}" for nu in ns.nu]
    curves = {}
    for nu, label in zip(ns.nu, labels):
        sc = _scenario_from_ns(ns, nu)
        curves[label] = sample_curve(
            lambda t, nu=nu, sc=sc: stress_relaxation(t, nu, sc), grid
        )
    t = grid.points()
    lines = ["t," + ",".join(labels)]
    for i, ti in enumerate(t):
        row = [_fmt(ti, spec.precision)]
        row += [_fmt(curves[lb].values[i], spec.precision) for lb in labels]
        lines.append(",".join(row))
    _write_lines(lines, spec.destination)

    if ns.plot:
        from .plotting import save_curve_plot

        save_curve_plot(
            t,
            {lb: curves[lb].values for lb in labels},
            ns.plot,
            logx=grid.kind is GridKind.LOGARITHMIC,
        )
    return 0


def cmd_op(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.STRUCTURED_TEXT)
    p = _params_from_ns(ns, ns.nu)
    kind, arg = ns.f
    if kind == "const":
        f = lambda t: np.full_like(np.asarray(t, dtype=float), arg)
    elif kind == "logpow":
        f = lambda t: np.log(p.eta0 + p.theta * np.asarray(t, dtype=float)) ** arg
    else:
        sc = RelaxationScenario(p=p)
        f = lambda t: stress_relaxation(t, ns.nu, sc)
    q = QuadratureConfig(n_nodes=ns.nodes, refinement_levels=ns.levels, tol=ns.qtol)
    value = apply_operator(f, ns.t, p, q)
    _emit_scalar([("value", _fmt(value, spec.precision))], spec)
    return 0


def cmd_asym(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.CSV)
    sc = _scenario_from_ns(ns, ns.nu)
    if ns.t is not None:
        t_points = ns.t
    else:
        t_points = _grid_from_ns(ns).points()
    table = asymptotic_matching(ns.nu, sc, t_points)
    lines = ["t,exact,asymptotic,rel_error"]
    for row in table.rows:
        lines.append(
            ",".join(
                _fmt(v, spec.precision)
                for v in (row.t, row.exact, row.asymptotic, row.rel_error)
            )
        )
    _write_lines(lines, spec.destination)

    if ns.plot:
        from .plotting import save_matching_plot

        t = np.array([r.t for r in table.rows])
        label = f"nu={format(ns.nu, 'g')}"
        save_matching_plot(
            t,
            {label: np.array([r.exact for r in table.rows])},
            {label: np.array([r.asymptotic for r in table.rows])},
            ns.plot,
        )
    return 0


def cmd_cmcheck(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.CSV)
    lo, hi, count = ns.linear
    grid = GridSpec(GridKind.LINEAR, lo, hi, count)
    sc = _scenario_from_ns(ns, ns.nu)
    report = check_complete_monotonicity(
        lambda t: stress_relaxation(t, ns.nu, sc),
        grid,
        max_order=ns.max_order,
        tol=ns.tol,
    )
    lines = ["order,passed,worst_violation"]
    for m in range(1, report.max_order_checked + 1):
        lines.append(
            f"{m},{str(report.passed[m - 1]).lower()},"
            f"{_fmt(report.worst_violation[m - 1], spec.precision)}"
        )
    _write_lines(lines, spec.destination)
    return 0


def cmd_fit(ns: argparse.Namespace) -> int:
    spec = _out_spec(ns, OutputFormat.STRUCTURED_TEXT)
    dataset = load_dataset(ns.input)
    config = FitConfig(
        free_params=ns.free,
        bounds=ns.bounds,
        initial=ns.init,
        max_iters=ns.max_iters,
        tol=ns.tol,
        allow_degenerate=ns.allow_degenerate,
    )
    result = fit_relaxation(dataset, config)
    pairs = [(k, _fmt(v, spec.precision)) for k, v in result.estimates.items()]
    pairs += [
        ("residual", _fmt(result.residual, spec.precision)),
        ("iterations", str(result.iterations)),
        ("converged", str(result.converged).lower()),
    ]
    _emit_scalar(pairs, spec)
    return 0 if result.converged else 4


def cmd_figures(ns: argparse.Namespace) -> int:
    from .plotting import save_curve_plot, save_matching_plot

    outdir = Path(ns.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    precision = ns.precision
    written: list[Path] = []

    def emit_csv(name: str, header: list[str], columns: list[np.ndarray]) -> None:
        lines = [",".join(header)]
        for i in range(len(columns[0])):
            lines.append(",".join(_fmt(col[i], precision) for col in columns))
        path = outdir / name
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    # multi-order relaxation curves on linear and geometric grids
    for name, grid, logx in (
        ("relaxation_linear", GridSpec(GridKind.LINEAR, 0.0, 10.0, 201), False),
        ("relaxation_log", GridSpec(GridKind.LOGARITHMIC, 0.1, 100.0, 61), True),
    ):
        t = grid.points()
        curves = {}
        for nu in FIGURE_ORDERS:
            sc = RelaxationScenario(p=OperatorParams(nu=nu))
            curves[f"nu={format(nu, 'g')}"] = stress_relaxation(t, nu, sc)
        emit_csv(f"{name}.csv", ["t"] + list(curves), [t] + list(curves.values()))
        written.append(
            save_curve_plot(t, curves, outdir / f"{name}.png", logx=logx, dpi=ns.dpi)
        )

    # exact curves against their large-time tails on wide log axes
    t = np.geomspace(0.1, 1e8, 91)
    exact = {}
    asym = {}
    for nu in MATCHING_ORDERS:
        sc = RelaxationScenario(p=OperatorParams(nu=nu))
        label = f"nu={format(nu, 'g')}"
        exact[label] = stress_relaxation(t, nu, sc)
        asym[label] = asymptotic_stress(t, nu, sc)
    header = ["t"]
    columns = [t]
    for label in exact:
        header += [f"exact_{label}", f"asym_{label}"]
        columns += [exact[label], asym[label]]
    emit_csv("asymptotic_matching.csv", header, columns)
    written.append(
        save_matching_plot(t, exact, asym, outdir / "asymptotic_matching.png",
                           dpi=ns.dpi)
    )

    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logrelax",
        description="Ultra-slow stress relaxation: Mittag-Leffler evaluation, "
        "log-kernel fractional operator, diagnostics, and fitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ml", help="evaluate E_{alpha,beta}(x) for x <= 0")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    _add_output_flags(sp, formats=True)
    sp.set_defaults(func=cmd_ml)

    sp = sub.add_parser("relax", help="sample relaxation curves as CSV")
    sp.add_argument("--nu", type=_float_list_arg, required=True,
                    metavar="NU[,NU...]", help="comma-separated orders in (0,1]")
    _add_grid_flags(sp)
    _add_param_flags(sp, with_sigma0=True)
    sp.add_argument("--plot", metavar="PATH", default=None,
                    help="also render the curves to a PNG file")
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_relax)

    sp = sub.add_parser("op", help="apply the fractional operator to a function")
    sp.add_argument("--f", type=_f_selector_arg, required=True,
                    metavar="const:C|logpow:B|eigen")
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    _add_param_flags(sp)
    sp.add_argument("--nodes", type=int, default=2048,
                    help="transformed-grid size (default 2048)")
    sp.add_argument("--levels", type=int, default=2,
                    help="refinement levels (default 2)")
    sp.add_argument("--qtol", type=float, default=1e-3,
                    help="refinement relative tolerance (default 1e-3)")
    _add_output_flags(sp, formats=True)
    sp.set_defaults(func=cmd_op)

    sp = sub.add_parser("asym", help="exact stress vs large-time tail")
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--t", type=_float_list_arg, default=None,
                    metavar="T[,T...]", help="explicit time points")
    _add_grid_flags(sp, required=False)
    _add_param_flags(sp, with_sigma0=True)
    sp.add_argument("--plot", metavar="PATH", default=None)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_asym)

    sp = sub.add_parser("cmcheck", help="complete-monotonicity finite-difference test")
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--linear", type=_grid_arg, required=True,
                    metavar="MIN:MAX:COUNT", help="uniform time grid")
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_param_flags(sp, with_sigma0=True)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_cmcheck)

    sp = sub.add_parser("fit", help="fit model parameters to a data file")
    sp.add_argument("--input", required=True, metavar="PATH",
                    help="two-column (t, stress) text file")
    sp.add_argument("--free", type=_name_list_arg, default=("nu",),
                    metavar="NAME[,NAME...]",
                    help=f"free parameters among {', '.join(PARAM_NAMES)}")
    sp.add_argument("--init", type=_assign_list_arg, default={},
                    metavar="NAME=VALUE[,...]")
    sp.add_argument("--bounds", type=_bounds_list_arg, default={},
                    metavar="NAME=LO:HI[,...]")
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--allow-degenerate", action="store_true",
                    help="permit freeing E, theta and eta0 together")
    _add_output_flags(sp, formats=True)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("figures", help="write curve CSVs and PNG figures")
    sp.add_argument("--outdir", default="figures", metavar="DIR")
    sp.add_argument("--dpi", type=int, default=150)
    sp.add_argument("--precision", type=_precision_arg, default=12)
    sp.set_defaults(func=cmd_figures)

    return parser


def entrypoint(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if getattr(ns, "command", None) == "asym":
        if ns.t is None and ns.linear is None and ns.log is None:
            parser.error("asym requires --t, --linear or --log")
    try:
        return ns.func(ns)
    except (DomainError, GridError, ValidationError, ParseError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 3
    except (NonConvergentError, QuadratureFailure) as ex:
        print(f"numerical failure: {ex}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(entrypoint())
