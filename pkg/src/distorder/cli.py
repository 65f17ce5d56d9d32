"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or configuration
error, 3 domain, precondition or numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigurationError, DistOrderError, DomainError, NumericalError
from .weights import (
    WeightFunction,
    bump_weight,
    linear_weight,
    uniform_weight,
    validate,
    weight_from_json,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_DOMAIN = 3

BUNDLED_WEIGHTS = {
    "uniform": uniform_weight,
    "linear": linear_weight,
    "bump": bump_weight,
}


# {{{ configuration


@dataclass(frozen=True)
class GridSettings:
    T: float = 1.0
    n: int = 256


@dataclass(frozen=True)
class ContourSettings:
    gamma: float = 1.0
    omega: float = 0.75
    truncation_tol: float = 1.0e-12


@dataclass(frozen=True)
class StieltjesSettings:
    lambda_min: float = 1.0e-8
    lambda_max: float = 1.0e8
    panels: int = 2


@dataclass(frozen=True)
class Tolerances:
    symbol: float = 1.0e-10
    stieltjes: float = 1.0e-8
    moment: float = 1.0e-8
    contour: float = 1.0e-6
    operator: float = 1.0e-2
    resolvent: float = 2.0e-2
    calculus: float = 5.0e-2
    structure: float = 1.0e-10


@dataclass(frozen=True)
class RunConfig:
    weight: dict[str, Any] = field(default_factory=lambda: {"kind": "constant", "c": 1.0})
    grid: GridSettings = field(default_factory=GridSettings)
    contour: ContourSettings = field(default_factory=ContourSettings)
    stieltjes: StieltjesSettings = field(default_factory=StieltjesSettings)
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: str | None = None

    def __post_init__(self) -> None:
        g, c, s = self.grid, self.contour, self.stieltjes
        if not (g.T > 0 and math.isfinite(g.T)):
            raise ConfigurationError(f"grid.T must be positive: {g.T}")
        if int(g.n) != g.n or g.n < 2:
            raise ConfigurationError(f"grid.n must be an integer >= 2: {g.n}")
        if not 0.5 < c.omega < 1.0:
            raise ConfigurationError(f"contour.omega must lie in (1/2, 1): {c.omega}")
        if not c.gamma > 0:
            raise ConfigurationError(f"contour.gamma must be positive: {c.gamma}")
        if not 0 < c.truncation_tol < 1:
            raise ConfigurationError("contour.truncation_tol must lie in (0, 1)")
        if not 0 < s.lambda_min < s.lambda_max:
            raise ConfigurationError("need 0 < stieltjes.lambda_min < stieltjes.lambda_max")
        if s.panels < 1:
            raise ConfigurationError("stieltjes.panels must be positive")
        for name, value in asdict(self.tolerances).items():
            if not value > 0:
                raise ConfigurationError(f"tolerance {name} must be positive: {value}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        known = {"weight", "grid", "contour", "stieltjes", "tolerances", "out"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(
                weight=data.get("weight", cls().weight),
                grid=GridSettings(**data.get("grid", {})),
                contour=ContourSettings(**data.get("contour", {})),
                stieltjes=StieltjesSettings(**data.get("stieltjes", {})),
                tolerances=Tolerances(**data.get("tolerances", {})),
                out=data.get("out"),
            )
        except TypeError as exc:
            raise ConfigurationError(f"invalid config: {exc}") from None

    # {{{ derived objects

    def weight_function(self) -> WeightFunction:
        w = self.weight
        if isinstance(w, str) and w in BUNDLED_WEIGHTS:
            return BUNDLED_WEIGHTS[w]()
        return weight_from_json(w)

    def kernel(self):
        from .kernels import KernelEvaluator

        return KernelEvaluator(self.weight_function())

    def inverter(self, ke=None):
        from .contour import InverterConfig

        return InverterConfig(
            ke if ke is not None else self.kernel(),
            gamma=self.contour.gamma,
            omega=self.contour.omega,
            tol=self.contour.truncation_tol,
        )

    def grid_obj(self):
        from .gridops import Grid

        return Grid(self.grid.T, self.grid.n)

    def stieltjes_rule(self):
        from .kernels import StieltjesRule

        s = self.stieltjes
        return StieltjesRule(s.lambda_min, s.lambda_max, s.panels)

    # }}}


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by the JSON config file, overridden by flags."""
    cfg = RunConfig()
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config file must contain a JSON object")
        cfg = RunConfig.from_dict(data)

    if args.weight is not None:
        text = args.weight
        if text in BUNDLED_WEIGHTS:
            weight: Any = text
        elif text.lstrip().startswith("{"):
            try:
                weight = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"invalid weight JSON: {exc}") from None
        else:
            try:
                weight = json.loads(Path(text).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigurationError(f"cannot read weight {text}: {exc}") from None
        cfg = replace(cfg, weight=weight)

    grid = cfg.grid
    if args.grid_n is not None:
        grid = replace(grid, n=args.grid_n)
    if args.grid_T is not None:
        grid = replace(grid, T=args.grid_T)
    cfg = replace(cfg, grid=grid)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if getattr(args, "tolerance", None) is not None:
        t = args.tolerance
        cfg = replace(cfg, tolerances=Tolerances(*([t] * len(asdict(Tolerances())))))
    return cfg


def checked_weight(cfg: RunConfig) -> WeightFunction:
    w = cfg.weight_function()
    report = validate(w)
    if report:
        raise ConfigurationError("inadmissible weight:\n  " + "\n  ".join(report))
    return w


# }}}


# {{{ output


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(cfg: RunConfig, header: Sequence[str], rows: Sequence[Sequence[float]]) -> None:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v)) for v in row) + "\n")
    _emit(cfg, buf.getvalue())


def write_json(cfg: RunConfig, data: Any) -> None:
    _emit(cfg, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text, newline="\n")


# }}}


# {{{ commands


def cmd_kernel(cfg: RunConfig, s_list: Sequence[float]) -> int:
    from .kernels import KernelEvaluator, eval_K, eval_k, eval_k_prime, eval_L

    ke = KernelEvaluator(checked_weight(cfg))
    rows = [
        (s, eval_k(ke, s), eval_k_prime(ke, s), eval_K(ke, s).real, eval_L(ke, s).real)
        for s in s_list
    ]
    write_csv(cfg, ["s", "k", "k_prime", "K", "L"], rows)
    return EXIT_OK


def cmd_kappa(cfg: RunConfig, t_list: Sequence[float]) -> int:
    from .contour import eval_kappa

    inv = cfg.inverter()
    checked_weight(cfg)
    t = np.asarray(t_list, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    write_csv(cfg, ["t", "kappa"], [(ti, eval_kappa(inv, ti)) for ti in t])
    return EXIT_OK


DERIVATIVE_METHODS = ("conv", "spectral", "bp", "def4")


def _derivative(method: str, phi, ke):
    from . import gridops

    if method == "conv":
        return gridops.dist_derivative_conv(phi, ke)
    if method == "spectral":
        return gridops.dist_derivative_spectral(phi, ke.weight)
    if method == "bp":
        return gridops.dist_derivative_bp(phi, ke)
    if method == "def4":
        return gridops.dist_derivative_def4(phi, ke)
    raise ConfigurationError(f"unknown method {method!r}")


def cmd_deriv(cfg: RunConfig, source: str, method: str, compare_all: bool) -> int:
    from .gridops import SampledFunction, relative_interior_error
    from .kernels import KernelEvaluator

    ke = KernelEvaluator(checked_weight(cfg))
    phi = SampledFunction.from_csv(source)
    if not compare_all:
        out = _derivative(method, phi, ke)
        write_csv(cfg, ["t", "value"], zip(out.t, out.values))
        return EXIT_OK

    methods = [m for m in DERIVATIVE_METHODS if m != "bp" or phi.values[0] == 0.0]
    results = {m: _derivative(m, phi, ke) for m in methods}
    cols = [results[m].values for m in methods]
    write_csv(cfg, ["t", *methods], zip(phi.t, *cols))

    deviations = {
        f"{a}-{b}": relative_interior_error(results[a], results[b], phi.grid)
        for i, a in enumerate(methods)
        for b in methods[i + 1 :]
    }
    sys.stderr.write(json.dumps({"max_relative_deviation": deviations}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_integ(cfg: RunConfig, source: str) -> int:
    from .gridops import SampledFunction, dist_integral

    checked_weight(cfg)
    f = SampledFunction.from_csv(source)
    out = dist_integral(f, cfg.inverter())
    write_csv(cfg, ["t", "value"], zip(out.t, out.values))
    return EXIT_OK


def cmd_solve(cfg: RunConfig, lam: float) -> int:
    from .gridops import SampledFunction, dist_derivative_def4, max_interior_error, solve_eigen
    from .kernels import KernelEvaluator

    ke = KernelEvaluator(checked_weight(cfg))
    grid = cfg.grid_obj()
    u = solve_eigen(lam, ke, grid)
    residual = max_interior_error(dist_derivative_def4(u, ke), u.scaled(lam), grid)
    write_csv(cfg, ["t", "u"], zip(u.t, u.values))
    sys.stderr.write(json.dumps({"lambda": lam, "residual": residual}) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verification import run_all

    checked_weight(cfg)
    report = run_all(cfg)
    write_json(cfg, report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_contour_dump(cfg: RunConfig, s: float, lam: float) -> int:
    from .contour import resolvent_contour

    checked_weight(cfg)
    if not s > 0:
        raise DomainError(f"s must be positive: {s}")
    c = resolvent_contour(cfg.inverter(), lam, s).contour
    write_csv(
        cfg,
        ["re_z", "im_z", "re_w", "im_w"],
        zip(c.z.real, c.z.imag, c.w.real, c.w.imag),
    )
    return EXIT_OK


# }}}


# {{{ argument parsing


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 2 for usage errors too
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--weight", help="weight: JSON text, JSON file or uniform|linear|bump")
    common.add_argument("--grid-n", type=int, help="number of grid cells")
    common.add_argument("--grid-T", type=float, help="interval length")
    common.add_argument("--out", help="output path (default: standard output)")

    parser = _Parser(prog="distorder", description="Distributed-order calculus tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", parents=[common], help="tabulate k, k', K and L")
    p.add_argument("--s", type=_float_list, default=[0.1, 0.5, 1.0, math.e, 10.0])

    p = sub.add_parser("kappa", parents=[common], help="tabulate the integral kernel")
    p.add_argument("--t", type=_float_list, default=[1e-3, 1e-2, 0.1, 0.5, 1.0])

    p = sub.add_parser("deriv", parents=[common], help="distributed-order derivative of a CSV")
    p.add_argument("input")
    p.add_argument("--method", choices=DERIVATIVE_METHODS, default="conv")
    p.add_argument("--compare-all", action="store_true")

    p = sub.add_parser("integ", parents=[common], help="distributed-order integral of a CSV")
    p.add_argument("input")

    p = sub.add_parser("solve", parents=[common], help="solve D u = lambda u, u(0) = 1")
    p.add_argument("--lambda", dest="lam", type=float, required=True)

    p = sub.add_parser("verify", parents=[common], help="run the verification suites")
    p.add_argument("--tolerance", type=float, help="override every tolerance")

    p = sub.add_parser("contour-dump", parents=[common], help="contour nodes and weights")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.s)
        if args.command == "kappa":
            return cmd_kappa(cfg, args.t)
        if args.command == "deriv":
            return cmd_deriv(cfg, args.input, args.method, args.compare_all)
        if args.command == "integ":
            return cmd_integ(cfg, args.input)
        if args.command == "solve":
            return cmd_solve(cfg, args.lam)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "contour-dump":
            return cmd_contour_dump(cfg, args.s, args.lam)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except NumericalError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except (ConfigurationError, OSError, DistOrderError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    raise AssertionError(f"unhandled command {args.command}")


# }}}


if __name__ == "__main__":
    raise SystemExit(main())
