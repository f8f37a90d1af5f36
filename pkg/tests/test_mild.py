import math

import numpy as np
import pytest
from scipy.linalg import solve_banded

from fujitalab import mild, radial, semigroup
from fujitalab.errors import Inadmissible, Overflow
from fujitalab.exponents import ProblemParams, derived_weights


def _params(p=3.0, rho=-0.5, s2=-0.1):
    return ProblemParams(N=3, sigma1=0.0, sigma2=s2, rho=rho, p=p)


def _grid(m=384):
    return radial.RadialGrid.log_spaced(30.0, m, r_min=0.03)


def _gaussian(grid, amp):
    return radial.field_from_callable(
        grid, radial.gaussian_profile(0.0, 1.0, amp), 3.0)


def _bump(grid, amp):
    return radial.field_from_callable(grid, radial.bump_profile(1.0, amp), 3.0)


# ---------------------------------------------------------------------------
# forcing response
# ---------------------------------------------------------------------------

def test_forcing_response_vanishes_without_forcing():
    g = _grid(128)
    w = radial.RadialField(g, np.zeros(g.m), 3.0)
    traj = mild.duhamel_forcing(w, _params(), np.geomspace(0.01, 1.0, 12))
    assert traj.x_norm == 0.0
    assert all(np.all(f.values == 0.0) for f in traj.fields)


def test_forcing_response_is_linear_in_the_profile():
    g = _grid(128)
    t_grid = np.geomspace(0.01, 1.0, 12)
    one = mild.duhamel_forcing(_bump(g, 1.0), _params(), t_grid)
    two = mild.duhamel_forcing(_bump(g, 2.0), _params(), t_grid)
    for a, b in zip(one.fields, two.fields):
        assert np.allclose(2.0 * a.values, b.values, rtol=1e-12, atol=1e-300)


def test_forcing_response_against_direct_march():
    # independent check: implicit Euler with the t^rho factor integrated
    # exactly over each step, far more steps than the response quadrature
    params = _params()
    g = _grid()
    w = _bump(g, 1.0)
    t_end = 0.5
    t_grid = np.geomspace(5e-3, t_end, 16)
    traj = mild.duhamel_forcing(w, params, t_grid)

    op = semigroup.SemigroupOp(g, params)
    n_steps = 1500
    h = t_end / n_steps
    rho1 = params.rho + 1.0
    u = np.zeros(g.m)
    for k in range(n_steps):
        t0 = k * h
        ck = ((t0 + h) ** rho1 - t0 ** rho1) / rho1
        u = solve_banded((1, 1), op.step_matrix_banded(h), u + ck * w.values,
                         check_finite=False)
    meas = g.nodes ** 2 * g.cell_widths()
    diff = traj.fields[-1].values - u
    rel = math.sqrt(float(np.sum(diff ** 2 * meas) / np.sum(u ** 2 * meas)))
    assert rel < 0.02


# ---------------------------------------------------------------------------
# fixed-point iteration
# ---------------------------------------------------------------------------

def test_picard_of_zero_is_the_linear_part():
    params = _params()
    g = _grid(256)
    u0 = _gaussian(g, 1e-3)
    cfg = mild.MildConfig(t_max=2.0, n_times=16)
    times = np.geomspace(2e-3, 2.0, 16)
    zero = mild.Trajectory(
        times=times,
        fields=[u0.with_values(np.zeros(g.m)) for _ in times],
        x_norm=0.0)
    stepped = mild.picard_step(zero, u0, None, params, cfg)
    op = semigroup.SemigroupOp(g, params)
    ref = op.evolve_through(u0, list(times), substeps=cfg.duhamel_substeps)
    for got, want in zip(stepped.fields, ref):
        scale = float(np.max(np.abs(want.values))) or 1.0
        assert np.allclose(got.values, want.values, atol=1e-12 * scale)


def test_global_solution_certificate():
    params = _params()
    g = _grid(256)
    cfg = mild.MildConfig(t_max=2.0, n_times=32)
    sol = mild.solve_global_small(_gaussian(g, 1e-3), _bump(g, 1e-3), params, cfg)
    assert sol.converged
    assert len(sol.diffs) >= 2
    assert all(r < 0.5 for r in sol.ratios)
    assert sol.trajectory.x_norm > 0.0
    # applying the map once more must move the iterate less than 2 tol
    again = mild.picard_step(sol.trajectory, _gaussian(g, 1e-3),
                             _bump(g, 1e-3), params, cfg)
    resid = mild.x_distance(again, sol.trajectory, sol.mu, sol.r)
    assert resid < 2.0 * cfg.picard_tol


def test_contraction_tightens_as_data_shrink():
    params = _params()
    g = _grid(256)
    cfg = mild.MildConfig(t_max=2.0, n_times=16)
    first_ratios = []
    for scale in (4e-3, 2e-3, 1e-3):
        sol = mild.solve_global_small(_gaussian(g, scale), _bump(g, scale),
                                      params, cfg)
        assert sol.converged
        first_ratios.append(sol.ratios[0])
    assert first_ratios[0] > first_ratios[1] > first_ratios[2]


def test_contraction_speed_scales_like_nonlinearity_order():
    # the first contraction ratio behaves like C M^(p-1); its log-log
    # slope across data scales pins the nonlinearity order
    params = _params()
    g = _grid(256)
    cfg = mild.MildConfig(t_max=2.0, n_times=16)
    scales = (0.01, 0.1)
    ratios = []
    for s in scales:
        sol = mild.solve_global_small(_gaussian(g, s), None, params, cfg)
        ratios.append(sol.ratios[0])
    slope = math.log(ratios[1] / ratios[0]) / math.log(scales[1] / scales[0])
    assert slope == pytest.approx(params.p - 1.0, abs=0.25)


def test_large_data_overflow_is_reported():
    params = _params()
    g = _grid(256)
    cfg = mild.MildConfig(t_max=2.0, n_times=16, max_picard=12)
    with pytest.raises(Overflow):
        mild.solve_global_small(_gaussian(g, 1.0e3), None, params, cfg)


# ---------------------------------------------------------------------------
# containers and metrics
# ---------------------------------------------------------------------------

def test_trajectory_validation():
    g = _grid(128)
    f = radial.RadialField(g, np.zeros(g.m), 3.0)
    with pytest.raises(ValueError):
        mild.Trajectory(times=np.array([0.0, 1.0]), fields=[f, f], x_norm=0.0)
    with pytest.raises(ValueError):
        mild.Trajectory(times=np.array([1.0, 0.5]), fields=[f, f], x_norm=0.0)


def test_x_distance_demands_common_grid():
    g = _grid(128)
    f = radial.RadialField(g, np.zeros(g.m), 3.0)
    a = mild.Trajectory(times=np.array([0.5, 1.0]), fields=[f, f], x_norm=0.0)
    b = mild.Trajectory(times=np.array([0.5, 2.0]), fields=[f, f], x_norm=0.0)
    with pytest.raises(ValueError):
        mild.x_distance(a, b, 0.5, 2.0)


def test_config_validation():
    with pytest.raises(ValueError):
        mild.MildConfig(picard_tol=0.0)
    with pytest.raises(ValueError):
        mild.MildConfig(n_times=4)
    with pytest.raises(ValueError):
        mild.MildConfig(max_picard=1)


def test_csv_row_builders():
    g = _grid(128)
    f = radial.RadialField(g, np.ones(g.m), 3.0)
    traj = mild.Trajectory(times=np.array([0.5, 1.0]), fields=[f, f],
                           x_norm=1.0)
    rows = mild.trajectory_csv_rows(traj, r=2.0, mu=0.25)
    assert len(rows) == 2
    assert len(rows[0]) == len(mild.TRAJECTORY_CSV_COLUMNS)
    conv = mild.convergence_csv_rows([1.0, 0.1], [0.1])
    assert conv[0][2] == "" and conv[1][2] == 0.1


# ---------------------------------------------------------------------------
# weak-form residual
# ---------------------------------------------------------------------------

def _solved(cfg):
    params = _params()
    g = radial.RadialGrid.log_spaced(30.0, 512, r_min=0.03)
    u0 = _gaussian(g, 1e-3)
    w = _bump(g, 1e-3)
    sol = mild.solve_global_small(u0, w, params, cfg)
    assert sol.converged
    return sol, u0, w, params


def test_weak_residual_small_and_refining():
    test_fn = mild.bump_test_function(t_end=2.0, r_lo=0.0, r_hi=10.0)
    coarse_sol, u0, w, params = _solved(mild.MildConfig(t_max=5.0, n_times=64))
    coarse = mild.weak_residual(coarse_sol.trajectory, u0, w, params, test_fn)
    fine_sol, _, _, _ = _solved(
        mild.MildConfig(t_max=5.0, n_times=128, duhamel_substeps=6))
    fine = mild.weak_residual(fine_sol.trajectory, u0, w, params, test_fn)
    assert coarse < 0.01
    assert fine < coarse


def test_weak_residual_rejects_oversized_test_support():
    sol, u0, w, params = _solved(mild.MildConfig(t_max=2.0, n_times=16))
    with pytest.raises(ValueError):
        mild.weak_residual(sol.trajectory, u0, w, params,
                           mild.bump_test_function(3.0, 0.0, 10.0))
    with pytest.raises(ValueError):
        mild.weak_residual(sol.trajectory, u0, w, params,
                           mild.bump_test_function(1.0, 0.0, 60.0))


def test_test_function_shape():
    fn = mild.bump_test_function(t_end=1.0, r_lo=0.0, r_hi=8.0)
    assert fn.eta(np.array([0.0]))[0] == 1.0
    assert fn.eta(np.array([0.99]))[0] < 0.01
    r = np.array([3.0, 9.0])
    chi = fn.chi(r)
    assert chi[0] == 1.0 and chi[1] == 0.0


# ---------------------------------------------------------------------------
# local-in-time solver
# ---------------------------------------------------------------------------

def test_local_solution_basics():
    params = ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=0.0, p=2.0)
    g = _grid(256)
    sol = mild.solve_local_Lq(_gaussian(g, 0.5), _bump(g, 0.5), params,
                              q=4.0, horizon_guess=1.0)
    assert sol.converged
    assert 0.0 < sol.t_end <= 1.0
    assert sol.radius > 0.0 and sol.c1 > 0.0 and sol.c2 > 0.0
    assert sol.continuity_jump < 5.0 * sol.scheme_tol
    assert sol.trajectory.times[-1] == pytest.approx(sol.t_end, rel=1e-12)


def test_local_zero_data_runs_the_full_horizon():
    params = ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=0.0, p=2.0)
    g = _grid(128)
    u0 = radial.RadialField(g, np.zeros(g.m), 3.0)
    sol = mild.solve_local_Lq(u0, None, params, q=4.0, horizon_guess=0.7)
    assert sol.t_end == pytest.approx(0.7)
    assert sol.trajectory.x_norm == 0.0
    assert sol.converged


def test_local_rejects_inadmissible_index():
    params = ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=0.0, p=2.0)
    g = _grid(128)
    with pytest.raises(Inadmissible):
        mild.solve_local_Lq(_gaussian(g, 0.5), None, params,
                            q=1.5, horizon_guess=1.0)
