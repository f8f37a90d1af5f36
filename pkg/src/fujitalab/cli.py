"""Batch front end: read a config file, run one experiment, write CSV.

Usage:

    fujitalab <command> --config experiment.conf [--out results/]

The command may also live inside the config (``command = ...``); a
command given on the command line wins.  Exit codes: 0 on success, 2
for configuration problems, 3 when the parameter tuple violates a
hypothesis of the theory (reported before any computation starts), 4
when a computation ran but failed its own quality gates.

Every CSV artifact starts with ``# params: ...`` comment lines that
record the full resolved configuration, then a header row.  Files are
UTF-8 with LF line endings, comma separated, ``.`` decimal point.
Identical configs produce byte-identical outputs.
"""

import argparse
import csv
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from .blowup import (SCAN_CSV_COLUMNS, BlowupConfig, calibrate_amplitude,
                     scan_threshold)
from .capacity import (FIT_CSV_COLUMNS, capacity_exponent_fit,
                       log_capacity_fit)
from .config import COMMANDS, ExperimentConfig, load_config, schema_help
from .errors import (ConfigError, HypothesisViolation, NumericalFailure,
                     PoorFit)
from .exponents import (REPORT_CSV_COLUMNS, build_report, default_r,
                        derived_weights, report_csv_row, report_text,
                        require_admissible_q, require_valid)
from .mild import (CONVERGENCE_CSV_COLUMNS, TRAJECTORY_CSV_COLUMNS,
                   MildConfig, convergence_csv_rows, solve_global_small,
                   solve_local_Lq, trajectory_csv_rows)
from .radial import RadialField, RadialGrid, field_from_callable
from .semigroup import SemigroupOp, smoothing_slope, weighted_smoothing_check
from .transform import residual_check, transform_params

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NUMERICAL = 4


def _write_csv(path: str, columns: Sequence[str], rows: Sequence[Sequence],
               comments: Sequence[str]) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write("# %s\n" % line)
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _grid_for(cfg: ExperimentConfig) -> RadialGrid:
    r_min = cfg.options["grid_r_min"]
    return RadialGrid.log_spaced(
        cfg.options["grid_r_max"], m=cfg.options["grid_m"],
        r_min=(None if r_min == 0.0 else r_min),
        sigma1=cfg.params.sigma1)


def _field(cfg: ExperimentConfig, key: str, grid: RadialGrid) -> RadialField:
    profile = cfg.options[key].build()
    return field_from_callable(grid, profile, float(cfg.params.N))


def _out_path(out_dir: str, name: str) -> str:
    return os.path.join(out_dir, name)


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _run_exponents(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    r = cfg.options["r"]
    report = build_report(cfg.params, None if r == 0.0 else r)
    path = _out_path(out_dir, "exponents.csv")
    _write_csv(path, REPORT_CSV_COLUMNS, [report_csv_row(report)],
               ["params: " + cfg.describe()])
    sys.stdout.write(report_text(report))
    print("wrote %s" % path)


def _run_transform_check(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    tp = transform_params(cfg.params)
    from .blowup import integrate_nonlinear       # local import: heavy module
    grid = _grid_for(cfg)
    u0 = _field(cfg, "u0", grid)
    w = _field(cfg, "w", grid)
    w_profile = cfg.options["w"].build()
    t_end = cfg.options["t_end"]
    n_snap = cfg.options["n_snapshots"]
    samples = list(np.linspace(t_end / n_snap, t_end, n_snap))
    run_cfg = BlowupConfig(dt_init=cfg.options["dt_init"],
                           t_max=1.05 * t_end)
    out = integrate_nonlinear(u0, w, cfg.params, run_cfg,
                              sample_times=samples)
    times = [t for t, _ in out.snapshots]
    fields = [f for _, f in out.snapshots]
    residuals = residual_check(times, fields, w_profile, cfg.params)
    rows = [[times[k + 1], res] for k, res in enumerate(residuals)]
    path = _out_path(out_dir, "transform_check.csv")
    _write_csv(path, ["t", "residual_sup"], rows,
               ["params: " + cfg.describe(),
                "transform: theta=%.12g sbar=%.12g nbar=%.12g lambda=%.12g"
                % (tp.theta, tp.sbar, tp.nbar, tp.lam),
                "run status: %s" % out.status])
    print("wrote %s (max residual %.3e)" % (path, max(residuals)))


def _run_semigroup_check(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    from .radial import powerlaw_profile
    grid = _grid_for(cfg)
    op = SemigroupOp(grid, cfg.params)
    a, b = cfg.options["lq_a"], cfg.options["lq_b"]
    gamma = cfg.options["gamma"]
    times = np.geomspace(cfg.options["t_lo"], cfg.options["t_hi"],
                         cfg.options["n_times"])
    source = field_from_callable(grid, powerlaw_profile(cfg.params.N / a),
                                 float(cfg.params.N))
    if gamma == 0.0:
        fit = smoothing_slope(op, a, b, source, times)
        label = "L^%g -> L^%g smoothing" % (a, b)
    else:
        fit = weighted_smoothing_check(op, a, b, gamma, source, times)
        label = "weighted (gamma=%g) L^%g -> L^%g smoothing" % (gamma, a, b)
    rows = [[float(t), float(n)] for t, n in zip(fit.times, fit.norms)]
    path = _out_path(out_dir, "semigroup_check.csv")
    _write_csv(path, ["t", "norm"], rows,
               ["params: " + cfg.describe(),
                "check: %s" % label,
                "fit: fitted=%.10g theory=%.10g r_squared=%.8f rel_err=%.4g"
                % (fit.fitted, fit.theory, fit.r_squared,
                   fit.relative_error)])
    print("wrote %s (slope %.6g vs theory %.6g)"
          % (path, fit.fitted, fit.theory))


def _run_mild_solve(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    r_opt = cfg.options["r"]
    r = default_r(cfg.params) if r_opt == 0.0 else r_opt
    derived_weights(cfg.params, r)       # hypothesis gate before any compute
    grid = _grid_for(cfg)
    u0 = _field(cfg, "u0", grid)
    w = _field(cfg, "w", grid)
    mcfg = MildConfig(r=r, t_max=cfg.options["t_max"],
                      n_times=cfg.options["n_times"],
                      picard_tol=cfg.options["picard_tol"],
                      max_picard=cfg.options["max_picard"],
                      duhamel_substeps=cfg.options["duhamel_substeps"])
    sol = solve_global_small(u0, w, cfg.params, mcfg)
    comments = ["params: " + cfg.describe(),
                "metric: r=%.10g mu=%.10g" % (sol.r, sol.mu),
                "converged: %s after %d iterations, x_norm=%.10g"
                % (sol.converged, len(sol.diffs), sol.trajectory.x_norm)]
    traj_path = _out_path(out_dir, "mild_trajectory.csv")
    _write_csv(traj_path, TRAJECTORY_CSV_COLUMNS,
               trajectory_csv_rows(sol.trajectory, sol.r, sol.mu), comments)
    conv_path = _out_path(out_dir, "mild_convergence.csv")
    _write_csv(conv_path, CONVERGENCE_CSV_COLUMNS,
               convergence_csv_rows(sol.diffs, sol.ratios), comments)
    print("wrote %s and %s (converged=%s)" % (traj_path, conv_path,
                                              sol.converged))


def _run_blowup_scan(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    p_lo, p_hi = cfg.options["p_lo"], cfg.options["p_hi"]
    if not 1.0 < p_lo < p_hi:
        raise ConfigError("need 1 < p_lo < p_hi, got %g and %g"
                          % (p_lo, p_hi))
    amp = cfg.options["amplitude"]
    if amp < 0.0:
        raise ConfigError("amplitude must be nonnegative (0 = calibrate); "
                          "the scan needs positive forcing mass")
    grid = _grid_for(cfg)
    bcfg = BlowupConfig(dt_init=cfg.options["dt_init"],
                        dt_min=cfg.options["dt_min"],
                        blowup_norm_cap=cfg.options["norm_cap"],
                        t_max=cfg.options["t_max"])
    calibrated = amp == 0.0
    if calibrated:
        amp = calibrate_amplitude(cfg.params, bcfg, grid=grid)
    report = scan_threshold(cfg.params, (p_lo, p_hi), amp, bcfg, grid=grid,
                            bracket_width=cfg.options["bracket_width"])
    rows = [[row.p, row.outcome, row.t_star_or_tmax, row.max_norm]
            for row in report.rows]
    path = _out_path(out_dir, "blowup_scan.csv")
    _write_csv(path, SCAN_CSV_COLUMNS, rows,
               ["params: " + cfg.describe(),
                "amplitude: %.10g%s" % (amp,
                                        " (calibrated)" if calibrated else ""),
                "bracket: [%.10g, %.10g], theory p*=%.10g"
                % (report.bracket[0], report.bracket[1],
                   report.p_star_theory),
                "note: %s" % report.note])
    print("wrote %s (bracket [%.5g, %.5g], theory p*=%.5g)"
          % (path, report.bracket[0], report.bracket[1],
             report.p_star_theory))


def _run_capacity_fit(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    radii = list(cfg.options["radii"])
    path = _out_path(out_dir, "capacity_fit.csv")
    base_comments = ["params: " + cfg.describe()]
    if cfg.options["log_case"]:
        try:
            report = log_capacity_fit(cfg.params, radii)
        except PoorFit as exc:
            if exc.report is not None:
                _write_report_log(path, exc.report, base_comments,
                                  poor=str(exc))
            raise
        _write_report_log(path, report, base_comments)
        print("wrote %s (log slope %.6g vs theory %.6g)"
              % (path, report.fit.fitted, report.fit.theory))
        return
    m = cfg.options["t_exponent"]
    try:
        report = capacity_exponent_fit(cfg.params, radii,
                                       t_exponent=(None if m == 0.0 else m))
    except PoorFit as exc:
        if exc.report is not None:
            _write_report_fit(path, exc.report, base_comments,
                              poor=str(exc))
        raise
    _write_report_fit(path, report, base_comments)
    print("wrote %s (time slope %.6g vs theory %.6g)"
          % (path, report.time_fit.fitted, report.time_fit.theory))


def _write_report_fit(path: str, report, comments: List[str],
                      poor: Optional[str] = None) -> None:
    extra = [
        "T rule: T = R^%.10g" % report.t_exponent,
        "time fit: fitted=%.10g theory=%.10g r_squared=%.8f"
        % (report.time_fit.fitted, report.time_fit.theory,
           report.time_fit.r_squared),
        "space fit: fitted=%.10g theory=%.10g r_squared=%.8f"
        % (report.space_fit.fitted, report.space_fit.theory,
           report.space_fit.r_squared),
        "combined fit: fitted=%.10g theory=%.10g r_squared=%.8f"
        % (report.combined_fit.fitted, report.combined_fit.theory,
           report.combined_fit.r_squared),
        "nonexistence predicted: %s; fitted slopes negative: %s"
        % (report.nonexistence_predicted, report.slopes_negative),
    ]
    if poor:
        extra.append("QUALITY GATE FAILED: %s" % poor)
    rows = []
    for k, big_r in enumerate(report.radii):
        rows.append([float(big_r), float(big_r) ** report.t_exponent,
                     float(report.time_raw[k]), float(report.space_raw[k]),
                     report.time_fit.fitted, report.time_fit.theory])
    _write_csv(path, FIT_CSV_COLUMNS, rows, comments + extra)


def _write_report_log(path: str, report, comments: List[str],
                      poor: Optional[str] = None) -> None:
    extra = ["log-cutoff critical-case fit in log(log R)",
             "fit: fitted=%.10g theory=%.10g r_squared=%.8f"
             % (report.fit.fitted, report.fit.theory,
                report.fit.r_squared)]
    if poor:
        extra.append("QUALITY GATE FAILED: %s" % poor)
    rows = [[float(r), float(v), report.fit.fitted, report.fit.theory]
            for r, v in zip(report.radii, report.values)]
    _write_csv(path, ["R", "I_space", "fitted_slope", "theory_slope"],
               rows, comments + extra)


def _run_local_solve(cfg: ExperimentConfig, out_dir: str) -> None:
    require_valid(cfg.params)
    q = cfg.options["q"]
    require_admissible_q(cfg.params, q)   # hypothesis gate before compute
    grid = _grid_for(cfg)
    u0 = _field(cfg, "u0", grid)
    w = _field(cfg, "w", grid)
    mcfg = MildConfig(picard_tol=cfg.options["picard_tol"],
                      max_picard=cfg.options["max_picard"],
                      n_times=cfg.options["n_times"])
    sol = solve_local_Lq(u0, w, cfg.params, q, cfg.options["horizon"], mcfg)
    path = _out_path(out_dir, "local_trajectory.csv")
    _write_csv(path, TRAJECTORY_CSV_COLUMNS,
               trajectory_csv_rows(sol.trajectory, sol.q, 0.0),
               ["params: " + cfg.describe(),
                "existence horizon: T=%.10g of guess %.10g"
                % (sol.t_end, cfg.options["horizon"]),
                "ball radius: %.10g, probe constants C1=%.10g C2=%.10g"
                % (sol.radius, sol.c1, sol.c2),
                "trace continuity: max jump %.6g vs scheme modulus %.6g"
                % (sol.continuity_jump, sol.scheme_tol),
                "converged: %s" % sol.converged])
    print("wrote %s (T=%.6g)" % (path, sol.t_end))


_DISPATCH = {
    "exponents": _run_exponents,
    "transform-check": _run_transform_check,
    "semigroup-check": _run_semigroup_check,
    "mild-solve": _run_mild_solve,
    "blowup-scan": _run_blowup_scan,
    "capacity-fit": _run_capacity_fit,
    "local-solve": _run_local_solve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fujitalab",
        description="Numerical experiments around critical-exponent theory "
                    "of weighted reaction-diffusion equations.")
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="experiment to run; overrides the config's "
                             "command key")
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--out", help="output directory (overrides the "
                                      "config's out_dir)")
    parser.add_argument("--schema", action="store_true",
                        help="print the config schema and exit")
    args = parser.parse_args(argv)

    if args.schema:
        print(schema_help())
        return EXIT_OK

    try:
        if not args.config:
            raise ConfigError("--config is required")
        cfg = load_config(args.config, args.command)
        out_dir = args.out if args.out else cfg.out_dir
        _DISPATCH[cfg.command](cfg, out_dir)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolation as exc:
        print("hypothesis violation: %s" % exc, file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalFailure as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
