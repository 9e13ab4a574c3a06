"""Command-line front end: reproducible data files for every observable.

Each subcommand writes machine-readable output (CSV with '#' header lines, or
JSON lines) with full provenance in the header and 17-significant-digit
floats, so identical invocations produce byte-identical files.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, fractal, oracle, spectral, survival, universal
from .errors import QuadratureConvergenceError, WellQuenchError

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    delta: float = 0.0
    n_modes: int | None = None
    tolerance: float | None = None
    out: str | None = None
    fmt: str = "csv"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.n_modes is None) == (self.tolerance is None):
            raise UsageError("exactly one of --n / --tol must be set")
        if self.n_modes is not None and self.n_modes < 1:
            raise UsageError("--n must be >= 1")
        if self.tolerance is not None and self.tolerance <= 0:
            raise UsageError("--tol must be positive")
        if self.delta < 0:
            raise UsageError("--delta must be >= 0")

    def resolve_modes(self, config: spectral.WellConfig, observable: str) -> int:
        if self.n_modes is not None:
            return self.n_modes
        return spectral.truncation_for_tolerance(config, observable, self.tolerance)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_table(path, header: dict, columns: list[str], rows, fmt: str):
    """Shared writer: '#'-header CSV or JSON lines, deterministic formatting."""
    lines = []
    if fmt == "csv":
        for key, value in header.items():
            lines.append(f"# {key} = {value if isinstance(value, str) else _fmt(value)}")
        lines.append("# columns: " + ",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
    elif fmt == "jsonl":
        lines.append(json.dumps({"meta": header}, sort_keys=True))
        for row in rows:
            record = {c: (float(v) if not isinstance(v, (int, np.integer)) else int(v))
                      for c, v in zip(columns, row)}
            lines.append(json.dumps(record, sort_keys=True))
    else:
        raise UsageError(f"unknown format {fmt!r}")
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def _base_header(cfg: RunConfig, well: spectral.WellConfig, n_modes: int,
                 **extra) -> dict:
    header = {
        "artifact_version": __version__,
        "delta": well.delta,
        "width": well.width,
        "period": well.period,
        "n_modes": n_modes,
    }
    if cfg.tolerance is not None:
        header["tolerance"] = cfg.tolerance
    header.update(extra)
    return header


def cmd_coeffs(cfg: RunConfig) -> int:
    well = spectral.WellConfig(cfg.delta)
    n_modes = cfg.resolve_modes(well, "coefficients")
    coeffs = spectral.mode_coefficients(well, n_modes)
    header = _base_header(cfg, well, n_modes,
                          completeness_deficit=coeffs.completeness_deficit)
    rows = [(n + 1, coeffs.values[n]) for n in range(n_modes)]
    _write_table(cfg.out, header, ["n", "a_n"], rows, cfg.fmt)
    return EXIT_OK


def cmd_evolve(cfg: RunConfig) -> int:
    well = spectral.WellConfig(cfg.delta)
    n_modes = cfg.n_modes if cfg.n_modes is not None else 800
    nx = cfg.extras.get("nx", 512)
    nt = cfg.extras.get("nt", 512)
    x_grid = np.linspace(0.0, well.width, nx)
    t_grid = np.linspace(0.0, well.period, nt)
    coeffs = spectral.mode_coefficients(well, n_modes)
    field_ = spectral.density_field(well, coeffs, x_grid, t_grid)
    header = _base_header(cfg, well, n_modes, nx=nx, nt=nt,
                          x_min=0.0, x_max=well.width,
                          t_min=0.0, t_max=well.period)
    columns = ["t"] + [f"x{i}" for i in range(nx)]
    rows = ([t] + list(row) for t, row in zip(t_grid, field_.values))
    _write_table(cfg.out, header, columns, rows, cfg.fmt)
    return EXIT_OK


def cmd_escape(cfg: RunConfig) -> int:
    well = spectral.WellConfig(cfg.delta)
    n_modes = cfg.resolve_modes(well, "survival")
    t_min = cfg.extras.get("t_min", 1e-8)
    t_max = cfg.extras.get("t_max", 1e-2)
    points = cfg.extras.get("points", 121)
    spacing = cfg.extras.get("spacing", "log")
    if points < 2 or t_max <= t_min:
        raise UsageError("need points >= 2 and --t-max > --t-min")
    if spacing == "log":
        if t_min <= 0:
            raise UsageError("--t-min must be positive for log spacing")
        times = np.logspace(math.log10(t_min), math.log10(t_max), points)
    elif spacing == "linear":
        times = np.linspace(t_min, t_max, points)
    else:
        raise UsageError(f"unknown spacing {spacing!r}")
    exact = survival.escape_probability_exact(well, times, n_modes)
    small = survival.escape_small_delta(well, times, n_modes)
    integral = np.array([survival.escape_integral(well.delta, float(t))
                         for t in times])
    free = survival.asymptote_free(times)
    confined = survival.asymptote_confined(well.delta, times)
    header = _base_header(cfg, well, n_modes,
                          crossover_time=survival.crossover_time(well.delta),
                          spacing=spacing)
    rows = zip(times, exact, small, integral, free, confined)
    _write_table(cfg.out, header,
                 ["t", "exact", "small_delta", "integral",
                  "asymptote_free", "asymptote_confined"],
                 rows, cfg.fmt)
    return EXIT_OK


def cmd_universal(cfg: RunConfig) -> int:
    n_modes = cfg.n_modes if cfg.n_modes is not None else universal.DEFAULT_MODES
    xi_min = cfg.extras.get("xi_min", 0.0)
    xi_max = cfg.extras.get("xi_max", 1.0)
    points = cfg.extras.get("points", 512)
    if points < 2 or xi_max <= xi_min:
        raise UsageError("need points >= 2 and --xi-max > --xi-min")
    xi = np.linspace(xi_min, xi_max, points)
    values = universal.universal_function(xi, n_modes)
    tail = universal.universal_tail_bound(n_modes)
    header = {
        "artifact_version": __version__,
        "n_modes": n_modes,
        "xi_min": xi_min, "xi_max": xi_max, "points": points,
        "tail_bound": tail,
    }
    _write_table(cfg.out, header, ["xi", "F", "tail_bound"],
                 ((x, v, tail) for x, v in zip(xi, values)), cfg.fmt)
    valleys_out = cfg.extras.get("valleys_out")
    if valleys_out:
        p_max = cfg.extras.get("p_max", 4)
        valleys = universal.valley_locations(p_max, n_modes=min(n_modes, 10**5))
        vheader = {"artifact_version": __version__, "p_max": p_max,
                   "n_modes": min(n_modes, 10**5)}
        vrows = [(e.numerator, e.denominator_root, e.location, e.depth)
                 for e in valleys.entries]
        _write_table(valleys_out, vheader, ["q", "p", "location", "depth"],
                     vrows, cfg.fmt)
    return EXIT_OK


def cmd_fractal(cfg: RunConfig) -> int:
    n_modes = cfg.n_modes if cfg.n_modes is not None else 10**5
    if cfg.extras.get("selftest"):
        eps = np.logspace(-5, -2, 10)
        fit = fractal.dimension_fit(eps, eps**-0.25)
        print(f"selftest dimension = {fit.dimension:.6f}")
        return EXIT_OK if abs(fit.dimension - 1.25) < 1e-9 else EXIT_VERIFICATION
    if cfg.extras.get("histogram"):
        epsilon = cfg.extras.get("epsilon", 1e-5)
        sample = fractal.phase_sum_samples(epsilon)
        report = fractal.normality_diagnostics(sample,
                                               bins=cfg.extras.get("bins", 61))
        header = {
            "artifact_version": __version__, "epsilon": epsilon,
            "cutoff": sample.cutoff, "count": sample.values.size,
            "mean": report.mean, "std": report.std,
            "skewness": report.skewness,
            "excess_kurtosis": report.excess_kurtosis,
        }
        rows = zip(report.bin_edges[:-1], report.bin_edges[1:], report.counts)
        _write_table(cfg.out, header, ["bin_left", "bin_right", "count"],
                     rows, cfg.fmt)
        return EXIT_OK
    if cfg.extras.get("sigma"):
        epsilons = cfg.extras.get("epsilons", [1e-6, 1e-5, 1e-4, 1e-3])
        slope, samples = fractal.phase_sum_scaling(epsilons)
        header = {"artifact_version": __version__, "sigma_slope": slope}
        rows = [(s.epsilon, s.std) for s in samples]
        _write_table(cfg.out, header, ["epsilon", "sigma"], rows, cfg.fmt)
        return EXIT_OK
    base = cfg.extras.get("base_intervals", 10**5)
    strides = cfg.extras.get("strides",
                             [1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70,
                              100, 150, 200, 300, 500, 700, 1000])
    fit, lengths = fractal.profile_dimension(strides, base_intervals=base,
                                             n_modes=n_modes)
    header = {
        "artifact_version": __version__, "n_modes": n_modes,
        "base_intervals": base,
        "dimension": fit.dimension, "slope": fit.slope,
        "residual": fit.residual,
    }
    rows = [(m.ruler, m.chord, m.variation) for m in lengths]
    _write_table(cfg.out, header, ["epsilon", "l_chord", "l_variation"],
                 rows, cfg.fmt)
    return EXIT_OK


def _oracle_checks(coarse: bool) -> list[dict]:
    """The oracle invariants as named checks with measured values."""
    checks = []
    well = spectral.WellConfig(0.2)
    n_points = 1025 if not coarse else 65
    # stationary eigenmode: density must not move
    mode = oracle.eigenmode_state(well, {1: 1.0 + 0.0j}, n_points)
    dt = 4.0 * mode.dx**2
    evolved = oracle.propagate(mode, dt, 400)
    drift = float(np.abs(np.abs(evolved.amplitudes) ** 2
                         - np.abs(mode.amplitudes) ** 2).max())
    checks.append({"name": "stationary_mode_density", "value": drift,
                   "threshold": 1e-8, "ok": drift < 1e-8})
    # unitarity over many steps
    state = oracle.initial_state(well, n_points)
    walked = oracle.propagate(state, dt, 1000)
    norm_drift = abs(walked.norm - state.norm)
    checks.append({"name": "norm_drift_1000_steps", "value": norm_drift,
                   "threshold": 1e-10, "ok": norm_drift < 1e-10})
    # quadrature constants against their closed forms
    free = oracle.adaptive_quadrature("free", tol=1e-9)
    confined = oracle.adaptive_quadrature("confined", tol=1e-9)
    err_free = abs(free - survival.FREE_KERNEL_CONSTANT)
    err_conf = abs(confined - survival.CONFINED_KERNEL_CONSTANT)
    checks.append({"name": "free_kernel_constant", "value": err_free,
                   "threshold": 1e-6, "ok": err_free < 1e-6})
    checks.append({"name": "confined_kernel_constant", "value": err_conf,
                   "threshold": 1e-6, "ok": err_conf < 1e-6})
    # grid propagator against the spectral wavefunction
    n_cn = 1025 if not coarse else 65
    t_target = 0.005
    start = oracle.initial_state(well, n_cn)
    dt = 8.0 * start.dx**2
    steps = int(math.ceil(t_target / dt))
    moved = oracle.propagate(start, t_target / steps, steps)
    coeffs = spectral.mode_coefficients(well, 2000)
    reference = spectral.wavefunction(well, coeffs, moved.x_grid, t_target)
    l2 = float(np.sqrt(moved.dx * np.sum(np.abs(moved.amplitudes - reference) ** 2)))
    checks.append({"name": "propagator_vs_spectral_l2", "value": l2,
                   "threshold": 2e-3, "ok": l2 < 2e-3})
    # survival amplitude against the overlap quadrature
    amp = survival.survival_amplitude(well, t_target, 2000)
    target = oracle.from_samples(moved.x_grid, reference, t_target)
    quad = oracle.overlap(oracle.initial_state(well, n_cn), target)
    diff = abs(amp - quad)
    checks.append({"name": "survival_vs_overlap", "value": diff,
                   "threshold": 1e-6, "ok": diff < 1e-6})
    return checks


def cmd_oracle_check(cfg: RunConfig) -> int:
    checks = _oracle_checks(bool(cfg.extras.get("coarse")))
    ok = all(c["ok"] for c in checks)
    if cfg.extras.get("json"):
        sys.stdout.write(json.dumps({"ok": ok, "checks": checks},
                                    sort_keys=True) + "\n")
    else:
        for c in checks:
            status = "PASS" if c["ok"] else "FAIL"
            print(f"[{status}] {c['name']}: {c['value']:.3e} "
                  f"(threshold {c['threshold']:.1e})")
        print("oracle checks:", "all passed" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_VERIFICATION


def _read_config_file(path: str) -> dict:
    """Flat key = value document; '#' starts a comment."""
    values = {}
    with open(path) as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {raw.strip()!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    # value options default to None so a config file can fill them in;
    # the effective defaults live in _EXTRA_KEYS and _config_from_args
    parser = argparse.ArgumentParser(
        prog="wellquench",
        description="Sudden wall-shift dynamics: escape laws, the universal "
                    "limit profile, and its fractal dimension.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file; flags override")
        p.add_argument("--delta", type=float, help="wall shift")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--n", type=int, help="mode count")
        group.add_argument("--tol", type=float, help="truncation tolerance")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "jsonl"], dest="fmt")

    p = sub.add_parser("coeffs", help="expansion coefficient table")
    common(p)

    p = sub.add_parser("evolve", help="probability density over one period")
    common(p)
    p.add_argument("--nx", type=int)
    p.add_argument("--nt", type=int)

    p = sub.add_parser("escape", help="escape probability time series")
    common(p)
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--spacing", choices=["log", "linear"])

    p = sub.add_parser("universal", help="limit profile samples and valleys")
    common(p)
    p.add_argument("--xi-min", type=float)
    p.add_argument("--xi-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--valleys-out", help="also write the valley list here")
    p.add_argument("--p-max", type=int)

    p = sub.add_parser("fractal", help="curve lengths, dimension, phase sums")
    common(p)
    p.add_argument("--base-intervals", type=int)
    p.add_argument("--histogram", action="store_true", default=None,
                   help="emit the phase-sum histogram instead of lengths")
    p.add_argument("--epsilon", type=float, help="ruler for --histogram")
    p.add_argument("--bins", type=int)
    p.add_argument("--sigma", action="store_true", default=None,
                   help="emit (epsilon, sigma) rows instead of lengths")
    p.add_argument("--selftest", action="store_true", default=None,
                   help="fit a synthetic eps^-1/4 law and exit")

    p = sub.add_parser("oracle-check", help="run the independent-oracle suite")
    p.add_argument("--coarse", action="store_true",
                   help="deliberately coarse grids (expected to fail)")
    p.add_argument("--json", action="store_true")
    return parser


def _as_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


# per-command extras: name -> (cast from config text, default)
_EXTRA_KEYS: dict[str, dict] = {
    "coeffs": {},
    "evolve": {"nx": (int, 512), "nt": (int, 512)},
    "escape": {"t_min": (float, 1e-8), "t_max": (float, 1e-2),
               "points": (int, 121), "spacing": (str, "log")},
    "universal": {"xi_min": (float, 0.0), "xi_max": (float, 1.0),
                  "points": (int, 512), "valleys_out": (str, None),
                  "p_max": (int, 4)},
    "fractal": {"base_intervals": (int, 10**5), "histogram": (_as_bool, False),
                "epsilon": (float, 1e-5), "bins": (int, 61),
                "sigma": (_as_bool, False), "selftest": (_as_bool, False)},
}

_DELTA_DEFAULTS = {"coeffs": 0.0, "evolve": 0.2, "escape": 0.003,
                   "universal": 0.0, "fractal": 0.0}

_COMMANDS = {
    "coeffs": cmd_coeffs,
    "evolve": cmd_evolve,
    "escape": cmd_escape,
    "universal": cmd_universal,
    "fractal": cmd_fractal,
}


def _config_from_args(args) -> RunConfig:
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name, cast, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_values:
            return cast(file_values[name])
        return default

    n_modes = pick("n", int, None)
    tolerance = pick("tol", float, None)
    if n_modes is not None and tolerance is not None:
        raise UsageError("give either a mode count or a tolerance, not both")
    if n_modes is None and tolerance is None:
        # per-command defaults: coefficient/escape sweeps by tolerance,
        # grid-valued commands by an explicit mode count
        if args.command == "coeffs":
            tolerance = 1e-6
        elif args.command == "escape":
            tolerance = 1e-12
        else:
            n_modes = {"evolve": 800, "universal": universal.DEFAULT_MODES,
                       "fractal": 10**5}[args.command]
    extras = {}
    for key, (cast, default) in _EXTRA_KEYS[args.command].items():
        extras[key] = pick(key, cast, default)
    return RunConfig(
        delta=float(pick("delta", float, _DELTA_DEFAULTS[args.command])),
        n_modes=n_modes, tolerance=tolerance,
        out=pick("out", str, None), fmt=pick("fmt", str, "csv"),
        extras=extras,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "oracle-check":
            cfg = RunConfig(delta=0.2, n_modes=1, tolerance=None,
                            extras={"coarse": args.coarse, "json": args.json})
            return cmd_oracle_check(cfg)
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except WellQuenchError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
