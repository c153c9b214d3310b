"""Command-line front end: solve benchmarks, multipliers, convergence studies, audits.

Subcommands
-----------
solve        integrate a problem and dump the node values as CSV
multipliers  monodromy matrix eigenvalues plus a stability verdict
convergence  error-versus-M (or N) table with fitted order
audit        per-interval conservation/positivity report for SIR-like models

All output is CSV with a ``# key = value`` header block echoing the
fully resolved configuration, floats printed as %.17g, so repeated runs
with the same configuration produce byte-identical files.  Exit codes:
0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .dde import LinearDDEProblem, monodromy, solve, stability_verdict
from .linalg import NumericalFailure
from .magnus_linear import LINEAR_ORDERS, MagnusConvergenceWarning
from .magnus_nonlinear import NONLINEAR_ORDERS
from .models import builtin_problem

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class ConfigError(Exception):
    """Invalid or inconsistent run configuration (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    problem: str = "example1"
    params: dict = field(default_factory=dict)
    N: int = 20
    M: int = 32
    order: Optional[int] = None         # filled per problem kind
    t_final: Optional[float] = None
    periods: Optional[float] = None
    out: Optional[str] = None
    store_steps: bool = False
    jobs: int = 1
    warn_as_error: bool = False
    stability_tol: float = 1e-9
    m_list: Optional[list] = None
    n_list: Optional[list] = None
    slope_floor: float = 0.0


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_param_item(item: str):
    if "=" not in item:
        raise ConfigError(f"field 'param': expected key=value, got {item!r}")
    key, _, value = item.partition("=")
    return key.strip(), _parse_value(value.strip())


def read_config_file(path: str):
    """Parse a key = value config file mirroring the command-line flags.

    Keys use the flag names with dashes or underscores; problem
    parameters are written as ``param.<name> = <value>``.  ``#`` starts
    a comment.
    """
    values = {}
    params = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise ConfigError(f"field 'config': cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"field 'config': {path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key.startswith("param."):
            params[key[len("param."):]] = _parse_value(value)
        else:
            values[key] = value
    return values, params


_INT_KEYS = {"N", "M", "order", "jobs"}
_FLOAT_KEYS = {"t_final", "periods", "stability_tol", "slope_floor"}
_BOOL_KEYS = {"store_steps", "warn_as_error"}
_LIST_KEYS = {"m_list", "n_list"}


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key in _LIST_KEYS:
            return _parse_int_list(value)
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: cannot parse {value!r}") from exc
    return value


def _parse_int_list(text: str):
    try:
        items = [int(part) for part in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer list from {text!r}") from exc
    if not items or any(v < 1 for v in items):
        raise ConfigError(f"integer list must contain positive values: {text!r}")
    return items


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and command line (later wins)."""
    cfg = RunConfig(command=args.command)
    params = {}
    if getattr(args, "config", None):
        file_values, file_params = read_config_file(args.config)
        for key, value in file_values.items():
            if not hasattr(cfg, key) or key in ("command", "params"):
                raise ConfigError(f"field {key!r}: unknown configuration key")
            setattr(cfg, key, _coerce(key, value))
        params.update(file_params)
    for key in ("problem", "N", "M", "order", "t_final", "periods", "out",
                "store_steps", "jobs", "warn_as_error", "stability_tol",
                "m_list", "n_list", "slope_floor"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    for item in getattr(args, "param", None) or []:
        key, value = _parse_param_item(item)
        params[key] = value
    cfg.params = params
    return cfg


def _build_benchmark(cfg: RunConfig):
    try:
        bench = builtin_problem(cfg.problem, **cfg.params)
    except KeyError as exc:
        raise ConfigError(f"field 'problem': {exc.args[0]}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'param': {exc}") from exc
    return bench


def _fill_order(cfg: RunConfig, problem) -> None:
    linear = isinstance(problem, LinearDDEProblem)
    admissible = LINEAR_ORDERS if linear else NONLINEAR_ORDERS
    if cfg.order is None:
        cfg.order = 6 if linear else 3
    if cfg.order not in admissible:
        kind = "linear" if linear else "quasilinear"
        raise ConfigError(
            f"field 'order': {cfg.order} invalid for {kind} problems; "
            f"admissible orders: {', '.join(str(o) for o in admissible)}")


def _validate_common(cfg: RunConfig) -> None:
    if cfg.N < 1:
        raise ConfigError("field 'N': must be >= 1")
    if cfg.M < 1:
        raise ConfigError("field 'M': must be >= 1")
    if cfg.jobs < 1:
        raise ConfigError("field 'jobs': must be >= 1")
    if cfg.stability_tol < 0:
        raise ConfigError("field 'stability_tol': must be >= 0")


def _resolve_horizon(cfg: RunConfig, problem, *, need_time: bool) -> Optional[float]:
    """Enforce 'exactly one of t_final / periods' and return the horizon."""
    if cfg.t_final is not None and cfg.periods is not None:
        raise ConfigError("fields 't_final'/'periods': give exactly one of them")
    if cfg.t_final is not None:
        if cfg.t_final <= 0:
            raise ConfigError("field 't_final': must be positive")
        return cfg.t_final
    if cfg.periods is not None:
        if cfg.periods <= 0:
            raise ConfigError("field 'periods': must be positive")
        period = getattr(problem, "period", None)
        if period is None:
            raise ConfigError("field 'periods': problem has no period")
        return cfg.periods * period
    if need_time:
        raise ConfigError("fields 't_final'/'periods': one of them is required")
    return None


def _header_pairs(cfg: RunConfig, extra=()):
    pairs = [("generator", f"ddemagnus {__version__}"), ("command", cfg.command),
             ("problem", cfg.problem)]
    for key in sorted(cfg.params):
        pairs.append((f"param.{key}", _fmt(cfg.params[key])))
    for key in ("N", "M", "order", "t_final", "periods", "jobs",
                "store_steps", "warn_as_error", "stability_tol"):
        value = getattr(cfg, key)
        if value is not None:
            pairs.append((key, _fmt(value)))
    if cfg.m_list is not None:
        pairs.append(("m_list", _fmt(cfg.m_list)))
    if cfg.n_list is not None:
        pairs.append(("n_list", _fmt(cfg.n_list)))
    pairs.extend(extra)
    return pairs


def _write_csv(cfg: RunConfig, header_pairs, columns, rows) -> None:
    lines = [f"# {key} = {value}" for key, value in header_pairs]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _solve_rows(trajectory):
    """CSV rows (interval, node_index, time, component_index, value)."""
    d = trajectory.d
    theta = trajectory.grid.nodes_shifted
    rows = []

    def emit(interval, window_end, state):
        blocks = state.reshape(len(theta), d)
        for j, t_node in enumerate(window_end + theta):
            for c in range(d):
                rows.append((interval, j, float(t_node), c, float(blocks[j, c])))

    if trajectory.steps is not None:
        for k, bucket in enumerate(trajectory.steps, start=1):
            for t_step, state in bucket:
                emit(k, t_step, state)
    else:
        for k in range(1, len(trajectory.times)):
            emit(k, float(trajectory.times[k]), trajectory.states[k])
    return rows


def cmd_solve(cfg: RunConfig) -> int:
    bench = _build_benchmark(cfg)
    _fill_order(cfg, bench.problem)
    _validate_common(cfg)
    horizon = _resolve_horizon(cfg, bench.problem, need_time=True)
    trajectory = solve(bench.problem, cfg.N, cfg.M, cfg.order, horizon,
                       store_steps=cfg.store_steps)
    header = _header_pairs(cfg, extra=[("columns_per_interval",
                                        _fmt((cfg.N + 1) * bench.problem.d))])
    _write_csv(cfg, header,
               ["interval", "node_index", "time", "component_index", "value"],
               _solve_rows(trajectory))
    return EXIT_OK


def cmd_multipliers(cfg: RunConfig) -> int:
    bench = _build_benchmark(cfg)
    _fill_order(cfg, bench.problem)
    _validate_common(cfg)
    if not isinstance(bench.problem, LinearDDEProblem):
        raise ConfigError("field 'problem': multipliers need a linear periodic problem")
    if cfg.t_final is not None:
        raise ConfigError("field 't_final': multipliers use --periods, not --t-final")
    periods = cfg.periods if cfg.periods is not None else 1.0
    if periods <= 0:
        raise ConfigError("field 'periods': must be positive")
    if bench.problem.period is None:
        raise ConfigError("field 'problem': problem has no period")
    problem = bench.problem
    if periods != 1.0:
        problem = replace(problem, period=periods * problem.period)
    result = monodromy(problem, cfg.N, cfg.M, cfg.order)
    verdict = stability_verdict(result, cfg.stability_tol)
    dominant = abs(result.dominant)
    header = _header_pairs(cfg, extra=[
        ("stability_verdict", verdict),
        ("dominant_modulus", _fmt(dominant)),
    ])
    rows = [(rank, float(mu.real), float(mu.imag), float(abs(mu)))
            for rank, mu in enumerate(result.multipliers, start=1)]
    _write_csv(cfg, header, ["rank", "re", "im", "modulus"], rows)
    if cfg.out:
        print(f"stability: {verdict} (dominant modulus {dominant:.17g})")
    return EXIT_OK


def fitted_order(values, errors, floor: float = 0.0):
    """Least-squares slope of log(error) against log(1/value).

    Points at or below ``floor`` (already saturated at round-off or at
    the spectral floor) are dropped, keeping at least two points.
    """
    values = np.asarray(values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > floor
    if keep.sum() < 2:
        keep = np.ones_like(keep)
    safe = np.maximum(errors[keep], 1e-300)
    slope = np.polyfit(np.log(values[keep]), np.log(safe), 1)[0]
    return -float(slope)


def _study_error(bench, cfg: RunConfig, N: int, M: int, horizon, metric: str) -> float:
    if metric == "multiplier":
        problem = bench.problem
        if cfg.periods is not None and cfg.periods != 1.0:
            problem = replace(problem, period=cfg.periods * problem.period)
        result = monodromy(problem, N, M, cfg.order)
        # track the dominant multiplier against the reference; at coarse M
        # some other branch can sit accidentally closer to the reference,
        # which would hide the scheme's convergence order
        return float(abs(result.dominant - bench.reference_multiplier))
    trajectory = solve(bench.problem, N, M, cfg.order, horizon)
    return float(trajectory.mean_error(bench.exact))


def cmd_convergence(cfg: RunConfig) -> int:
    bench = _build_benchmark(cfg)
    _fill_order(cfg, bench.problem)
    _validate_common(cfg)
    if (cfg.m_list is None) == (cfg.n_list is None):
        raise ConfigError("fields 'M-list'/'N-list': give exactly one of them")
    if cfg.periods is not None:
        if not isinstance(bench.problem, LinearDDEProblem):
            raise ConfigError("field 'periods': multiplier study needs a linear problem")
        if bench.reference_multiplier is None:
            raise ConfigError("field 'problem': no reference multiplier available")
        metric = "multiplier"
        horizon = None
    else:
        if bench.exact is None:
            raise ConfigError("field 'problem': no exact solution available; "
                              "use --periods with a reference multiplier instead")
        metric = "solution"
        horizon = _resolve_horizon(cfg, bench.problem, need_time=True)

    if cfg.m_list is not None:
        label, points = "M", sorted(cfg.m_list)
        runs = [(cfg.N, M) for M in points]
    else:
        label, points = "N", sorted(cfg.n_list)
        runs = [(N, cfg.M) for N in points]

    def run(pair):
        return _study_error(bench, cfg, pair[0], pair[1], horizon, metric)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            errors = list(pool.map(run, runs))
    else:
        errors = [run(pair) for pair in runs]

    rows = []
    for i, (point, err) in enumerate(zip(points, errors)):
        if i == 0 or errors[i - 1] <= 0 or err <= 0:
            local = float("nan")
        else:
            local = math.log(errors[i - 1] / err) / math.log(point / points[i - 1])
        rows.append((point, err, local))
    overall = fitted_order(points, errors, cfg.slope_floor)
    header = _header_pairs(cfg, extra=[("metric", metric),
                                       ("fitted_order", _fmt(overall))])
    _write_csv(cfg, header, [label, "error", "local_order"], rows)
    return EXIT_OK


def cmd_audit(cfg: RunConfig) -> int:
    bench = _build_benchmark(cfg)
    _fill_order(cfg, bench.problem)
    _validate_common(cfg)
    if bench.conserved_total is None:
        raise ConfigError("field 'problem': conservation audit needs a "
                          "population-conserving model (e.g. sir)")
    horizon = _resolve_horizon(cfg, bench.problem, need_time=True)
    trajectory = solve(bench.problem, cfg.N, cfg.M, cfg.order, horizon)
    total = bench.conserved_total
    d = trajectory.d
    rows = []
    for k in range(1, len(trajectory.times)):
        blocks = trajectory.states[k].reshape(cfg.N + 1, d)
        totals = np.abs(blocks.sum(axis=1) - total)
        rows.append((k, float(trajectory.times[k]), float(totals.mean()),
                     float(totals[0]), float(blocks.min())))
    header = _header_pairs(cfg, extra=[("conserved_total", _fmt(total))])
    _write_csv(cfg, header,
               ["interval", "end_time", "mean_total_error",
                "boundary_total_error", "min_component"],
               rows)
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "multipliers": cmd_multipliers,
    "convergence": cmd_convergence,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", help="builtin problem name "
                        "(example1, mathieu, nonlinear-scalar, sir)")
    common.add_argument("--N", type=int, help="collocation intervals (N+1 nodes)")
    common.add_argument("--M", type=int, help="Magnus steps per delay interval")
    common.add_argument("--order", type=int,
                        help="integrator order: 2/4/6 linear, 2/3 quasilinear")
    common.add_argument("--t-final", dest="t_final", type=float,
                        help="integration horizon (exclusive with --periods)")
    common.add_argument("--periods", type=float,
                        help="horizon as a multiple of the problem period")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="problem parameter override (repeatable)")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--store-steps", dest="store_steps", action="store_true",
                        default=None, help="emit every Magnus step, not just "
                        "interval endpoints")
    common.add_argument("--config", help="key = value file mirroring these flags")
    common.add_argument("--jobs", type=int, help="worker threads for sweeps")
    common.add_argument("--warn-as-error", dest="warn_as_error",
                        action="store_true", default=None,
                        help="escalate Magnus convergence warnings to failures")
    common.add_argument("--stability-tol", dest="stability_tol", type=float,
                        help="half-width of the marginal band around |mu| = 1")

    parser = argparse.ArgumentParser(
        prog="ddemagnus",
        description="Spectral-Magnus delay differential equation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common],
                   help="integrate and dump node values")
    sub.add_parser("multipliers", parents=[common],
                   help="characteristic multipliers and stability verdict")
    conv = sub.add_parser("convergence", parents=[common],
                          help="error table against M or N")
    conv.add_argument("--M-list", dest="m_list", type=_parse_int_list,
                      help="comma-separated step counts, e.g. 4,8,16,32")
    conv.add_argument("--N-list", dest="n_list", type=_parse_int_list,
                      help="comma-separated node counts")
    conv.add_argument("--slope-floor", dest="slope_floor", type=float,
                      help="ignore errors at/below this value when fitting")
    sub.add_parser("audit", parents=[common],
                   help="per-interval conservation and positivity report")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.warn_as_error:
            warnings.simplefilter("error", MagnusConvergenceWarning)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MagnusConvergenceWarning as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
