"""Mild-solution solvers built on the Duhamel integral form.

The forced problem is recast as the fixed-point equation

    u(t) = S(t) u0 + F(u)(t) + H(t),
    F(u)(t) = int_0^t S(t-s) ( r^(s2-s1) |u(s)|^p ) ds,
    H(t)    = int_0^t S(t-s) ( s^rho  r^(-s1)  w ) ds,

where S is the semigroup of the weighted linear part.  Two constructions
share one quadrature engine: a global small-data solver contracting in the
time-weighted norm sup_t t^mu ||u(t)||_{L^r}, and a local-in-time solver
working in plain C([0,T]; L^q).

Every time integral marches a running accumulator forward across a
log-spaced grid of stored times.  Each stored interval is cut into midpoint
slices; the slice source is pre-smoothed by a half-slice of implicit Euler
before joining the Crank-Nicolson march, because rough sources (negative
radial powers in particular) ring under trapezoidal stepping.  The cell
touching t = 0 is special for both integrals: the forcing factor s^rho is
integrated analytically there against a propagator frozen at the substep
midpoint, and the nonlinear source uses a frozen power-law-in-time model
anchored at the first stored time.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .errors import (HypothesisViolation, NotContracting, NoValidT,
                     NumericalFailure, Overflow)
from .exponents import (ProblemParams, default_r, derived_weights,
                        local_alpha, require_admissible_q, require_valid)
from .radial import RadialField, lq_norm, sphere_area
from .semigroup import SCHEME_IE, SemigroupOp

OVERFLOW_GUARD = 1e30

# substeps used for each slice-sized semigroup march
_SLICE_SUBSTEPS = 2


@dataclass(frozen=True)
class MildConfig:
    """Knobs shared by the global and local fixed-point solvers.

    r and mu define the contraction metric of the global solver; both
    default to the admissible-window midpoint values when left None.
    q_local is the Lebesgue index of the local theory.  t_max is the
    horizon surrogate of the global construction; stored times are
    log-spaced on [1e-3 t_max, t_max] with n_times points, since the
    t^mu weight cannot be evaluated at t = 0.
    """

    r: Optional[float] = None
    mu: Optional[float] = None
    max_picard: int = 20
    picard_tol: float = 1e-10
    duhamel_substeps: int = 4
    t_max: float = 10.0
    q_local: float = 4.0
    n_times: int = 64

    def __post_init__(self):
        if not self.picard_tol > 0.0:
            raise ValueError("picard_tol must be positive")
        if self.max_picard < 2:
            raise ValueError("max_picard must be at least 2")
        if self.duhamel_substeps < 1:
            raise ValueError("duhamel_substeps must be at least 1")
        if not self.t_max > 0.0:
            raise ValueError("t_max must be positive")
        if self.n_times < 8:
            raise ValueError("n_times must be at least 8")


@dataclass
class Trajectory:
    """Field snapshots at increasing positive times plus their sup-metric.

    x_norm records sup_j times[j]^mu * ||fields[j]||_{L^r} for whatever
    (mu, r) the producing solver used; difference trajectories are
    measured with the same weights through x_distance.
    """

    times: np.ndarray
    fields: List[RadialField]
    x_norm: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("times must be a nonempty 1-d array")
        if t[0] <= 0.0 or np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be positive and strictly increasing")
        if len(self.fields) != t.size:
            raise ValueError("need one field per time, got %d fields for %d "
                             "times" % (len(self.fields), t.size))
        for f in self.fields:
            if not np.all(np.isfinite(f.values)):
                raise ValueError("trajectory fields must be finite")
        self.times = t

    def norms(self, q: float, weight: float = 0.0) -> np.ndarray:
        return np.array([lq_norm(f, q, weight) for f in self.fields])

    def max_values(self) -> np.ndarray:
        return np.array([float(np.max(np.abs(f.values))) for f in self.fields])

    def weighted_sup(self, mu: float, q: float) -> float:
        return float(np.max(self.times ** mu * self.norms(q)))


def x_distance(a: Trajectory, b: Trajectory, mu: float, r: float) -> float:
    """sup_j t_j^mu ||a_j - b_j||_{L^r} over the common time grid."""
    if a.times.size != b.times.size or np.any(a.times != b.times):
        raise ValueError("trajectories live on different time grids")
    best = 0.0
    for t, fa, fb in zip(a.times, a.fields, b.fields):
        d = lq_norm(fa.with_values(fa.values - fb.values), r)
        best = max(best, t ** mu * d)
    return best


def _time_grid(t_max: float, n_times: int) -> np.ndarray:
    return np.geomspace(1e-3 * t_max, t_max, n_times)


def _metric_for(params: ProblemParams, cfg: MildConfig) -> Tuple[float, float]:
    """(mu, r) of the contraction metric, window-derived when unset.

    Outside the global theory (empty window) the fallback (0, 2) turns the
    X-norm into a plain sup of L^2 norms, which keeps the forcing and
    trajectory reports meaningful for diagnostics.
    """
    if cfg.r is not None and cfg.mu is not None:
        return cfg.mu, cfg.r
    try:
        r = cfg.r if cfg.r is not None else default_r(params)
        mu = cfg.mu if cfg.mu is not None else derived_weights(params, r).mu
        return mu, r
    except HypothesisViolation:
        return 0.0, 2.0


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

def _forcing_values(op: SemigroupOp, src: np.ndarray, rho: float,
                    times: np.ndarray, nsub: int) -> List[np.ndarray]:
    """March the forcing integral H across the stored times.

    src is the spatial part r^(-s1) w; the time factor s^rho is exact on
    the substep touching s = 0 and midpoint-sampled elsewhere.
    """
    out = []
    acc = np.zeros_like(src)
    t_prev = 0.0
    for t in times:
        h = (t - t_prev) / nsub
        src_half = op.evolve_values(src, 0.5 * h, substeps=_SLICE_SUBSTEPS,
                                    scheme=SCHEME_IE)
        for m in range(nsub):
            if t_prev == 0.0 and m == 0:
                c = h ** (1.0 + rho) / (1.0 + rho)
            else:
                s_mid = t_prev + (m + 0.5) * h
                c = h * s_mid ** rho
            acc = op.evolve_values(acc, h, substeps=_SLICE_SUBSTEPS)
            acc += c * src_half
        out.append(acc.copy())
        t_prev = t
    return out


def _nonlinear_values(op: SemigroupOp, u_vals: Sequence[np.ndarray],
                      params: ProblemParams, times: np.ndarray, nsub: int,
                      head_theta: float) -> List[np.ndarray]:
    """March the nonlinear integral F[u] across the stored times.

    On the head cell (0, times[0]] the source is modelled as
    (s/t_1)^head_theta g(t_1), the self-similar profile of the weighted
    construction (head_theta = -p mu) or a frozen constant (0) for the
    local theory; head_theta > -1 keeps the cell integrable.  Interior
    slices interpolate u log-linearly in time between stored snapshots.
    """
    if head_theta <= -1.0:
        raise ValueError("head cell diverges for exponent %g" % head_theta)
    r = op.grid.nodes
    wgt = r ** (params.sigma2 - params.sigma1)
    p = params.p

    def g_of(vals: np.ndarray) -> np.ndarray:
        return wgt * np.abs(vals) ** p

    out = []
    acc = np.zeros_like(u_vals[0])
    t1 = times[0]
    t_prev = 0.0
    for j, t in enumerate(times):
        h = (t - t_prev) / nsub
        if j == 0:
            src_half = op.evolve_values(g_of(u_vals[0]), 0.5 * h,
                                        substeps=_SLICE_SUBSTEPS,
                                        scheme=SCHEME_IE)
            for m in range(nsub):
                if m == 0:
                    c = h ** (1.0 + head_theta) / ((1.0 + head_theta)
                                                   * t1 ** head_theta)
                else:
                    s_mid = (m + 0.5) * h
                    c = h * (s_mid / t1) ** head_theta
                acc = op.evolve_values(acc, h, substeps=_SLICE_SUBSTEPS)
                acc += c * src_half
        else:
            lo, hi = u_vals[j - 1], u_vals[j]
            log_ratio = math.log(t / t_prev)
            for m in range(nsub):
                s_mid = t_prev + (m + 0.5) * h
                frac = math.log(s_mid / t_prev) / log_ratio
                src = g_of((1.0 - frac) * lo + frac * hi)
                src_half = op.evolve_values(src, 0.5 * h,
                                            substeps=_SLICE_SUBSTEPS,
                                            scheme=SCHEME_IE)
                acc = op.evolve_values(acc, h, substeps=_SLICE_SUBSTEPS)
                acc += h * src_half
        if not np.all(np.isfinite(acc)):
            raise Overflow("nonlinear integral lost finiteness at t=%g" % t)
        out.append(acc.copy())
        t_prev = t
    return out


def _linear_values(op: SemigroupOp, u0: RadialField,
                   w: Optional[RadialField], params: ProblemParams,
                   times: np.ndarray, nsub: int) -> List[np.ndarray]:
    """S(t) u0 + H(t) at the stored times, as raw value arrays."""
    if np.any(u0.values != 0.0):
        s_parts = [f.values for f in
                   op.evolve_through(u0, list(times), substeps=nsub)]
    else:
        s_parts = [np.zeros_like(u0.values) for _ in times]
    if w is not None and np.any(w.values != 0.0):
        src = op.grid.nodes ** (-params.sigma1) * w.values
        h_parts = _forcing_values(op, src, params.rho, times, nsub)
        return [s + h for s, h in zip(s_parts, h_parts)]
    return s_parts


def _wrap(u0: RadialField, times: np.ndarray, vals: List[np.ndarray],
          mu: float, r: float) -> Trajectory:
    fields = [u0.with_values(v) for v in vals]
    xn = 0.0
    for t, f in zip(times, fields):
        xn = max(xn, t ** mu * lq_norm(f, r))
    return Trajectory(times=times, fields=fields, x_norm=xn)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def duhamel_forcing(w: RadialField, params: ProblemParams,
                    t_grid: Sequence[float],
                    cfg: Optional[MildConfig] = None) -> Trajectory:
    """Forcing response H(t) on the given times by substep quadrature."""
    require_valid(params)
    cfg = cfg if cfg is not None else MildConfig()
    times = np.asarray(t_grid, dtype=float)
    mu, r = _metric_for(params, cfg)
    if not np.any(w.values != 0.0):
        zeros = [np.zeros_like(w.values) for _ in times]
        return _wrap(w, times, zeros, mu, r)
    op = SemigroupOp(w.grid, params)
    src = w.grid.nodes ** (-params.sigma1) * w.values
    vals = _forcing_values(op, src, params.rho, times, cfg.duhamel_substeps)
    return _wrap(w, times, vals, mu, r)


def picard_step(u_n: Trajectory, u0: RadialField, w: Optional[RadialField],
                params: ProblemParams, cfg: Optional[MildConfig] = None,
                linear: Optional[Trajectory] = None,
                head_theta: Optional[float] = None,
                metric: Optional[Tuple[float, float]] = None) -> Trajectory:
    """One fixed-point application G(u) = S(t) u0 + F(u) + H.

    linear may carry a precomputed S(t) u0 + H trajectory on the same time
    grid to avoid recomputing it on every iteration.  Raises Overflow when
    any output value exceeds the divergence guard.
    """
    require_valid(params)
    cfg = cfg if cfg is not None else MildConfig()
    times = u_n.times
    op = SemigroupOp(u0.grid, params)
    mu, r = metric if metric is not None else _metric_for(params, cfg)
    theta = head_theta if head_theta is not None else -params.p * mu
    if linear is None:
        lin_vals = _linear_values(op, u0, w, params, times,
                                  cfg.duhamel_substeps)
    else:
        lin_vals = [f.values for f in linear.fields]
    f_vals = _nonlinear_values(op, [f.values for f in u_n.fields], params,
                               times, cfg.duhamel_substeps, theta)
    out = [a + b for a, b in zip(lin_vals, f_vals)]
    worst = max(float(np.max(np.abs(v))) for v in out)
    if worst > OVERFLOW_GUARD:
        raise Overflow("iterate reached %g, beyond the %g guard"
                       % (worst, OVERFLOW_GUARD))
    return _wrap(u0, times, out, mu, r)


@dataclass
class GlobalSolution:
    """Fixed point of the weighted-metric construction plus its certificate."""

    trajectory: Trajectory
    diffs: List[float]
    ratios: List[float]
    converged: bool
    r: float
    mu: float


def solve_global_small(u0: RadialField, w: Optional[RadialField],
                       params: ProblemParams,
                       cfg: Optional[MildConfig] = None) -> GlobalSolution:
    """Picard iteration in the t^mu-weighted L^r metric.

    The seed is the linear part G(0); iteration stops when consecutive
    iterates differ by less than picard_tol in the X norm.  Per-iteration
    contraction ratios are reported; three consecutive ratios at or above
    one abort with NotContracting, the signature of data too large for the
    small-data regime.
    """
    require_valid(params)
    cfg = cfg if cfg is not None else MildConfig()
    r = cfg.r if cfg.r is not None else default_r(params)
    mu = cfg.mu if cfg.mu is not None else derived_weights(params, r).mu
    times = _time_grid(cfg.t_max, cfg.n_times)
    op = SemigroupOp(u0.grid, params)
    nsub = cfg.duhamel_substeps

    lin_vals = _linear_values(op, u0, w, params, times, nsub)
    linear = _wrap(u0, times, lin_vals, mu, r)

    u_prev = linear
    diffs = [linear.x_norm]          # iterate 1 against the zero iterate 0
    ratios: List[float] = []
    if diffs[0] < cfg.picard_tol:
        return GlobalSolution(u_prev, diffs, ratios, True, r, mu)

    converged = False
    for _ in range(1, cfg.max_picard):
        u_next = picard_step(u_prev, u0, w, params, cfg, linear=linear,
                             head_theta=-params.p * mu, metric=(mu, r))
        d = x_distance(u_next, u_prev, mu, r)
        ratios.append(d / diffs[-1])
        diffs.append(d)
        u_prev = u_next
        if len(ratios) >= 3 and all(q >= 1.0 for q in ratios[-3:]):
            raise NotContracting(
                "difference ratios %s show no contraction; the data is "
                "likely outside the small-data regime"
                % ["%.3g" % q for q in ratios[-3:]])
        if d < cfg.picard_tol:
            converged = True
            break
    return GlobalSolution(u_prev, diffs, ratios, converged, r, mu)


@dataclass
class LocalSolution:
    """Local-in-time fixed point with its existence-window bookkeeping."""

    trajectory: Trajectory
    t_end: float
    q: float
    radius: float
    c1: float
    c2: float
    continuity_jump: float
    scheme_tol: float
    diffs: List[float]
    ratios: List[float]
    converged: bool


def solve_local_Lq(u0: RadialField, w: Optional[RadialField],
                   params: ProblemParams, q: float, horizon_guess: float,
                   cfg: Optional[MildConfig] = None) -> LocalSolution:
    """Local existence run in C([0,T]; L^q) with an empirical horizon.

    The closure inequality R(T) = C1 T^(1-alpha) M^p + C2 |f|_q T^(rho+1)
    <= M/2 selects the horizon: C1 and C2 are measured from probe
    evaluations of the two Duhamel integrals on the linear trace (the
    theory's constants are non-constructive), M is twice the sup of the
    linear response, and T is the largest admissible time up to the guess.
    Raises NoValidT when even the smallest probe step fails the
    inequality, and NumericalFailure when the fixed point's L^q trace
    jumps by more than five times the linear trace's own grid modulus.
    """
    require_valid(params)
    require_admissible_q(params, q)
    if not horizon_guess > 0.0:
        raise ValueError("horizon_guess must be positive")
    cfg = cfg if cfg is not None else MildConfig()
    alpha = local_alpha(params, q)
    nsub = cfg.duhamel_substeps
    op = SemigroupOp(u0.grid, params)

    probe_times = _time_grid(horizon_guess, cfg.n_times)
    lin_probe = _linear_values(op, u0, w, params, probe_times, nsub)
    lin_norms = np.array([lq_norm(u0.with_values(v), q) for v in lin_probe])
    m0 = float(np.max(lin_norms))
    if m0 == 0.0:
        zeros = [np.zeros_like(u0.values) for _ in probe_times]
        traj = _wrap(u0, probe_times, zeros, 0.0, q)
        return LocalSolution(traj, horizon_guess, q, 0.0, 0.0, 0.0,
                             0.0, cfg.picard_tol, [0.0], [], True)
    radius = 2.0 * m0

    f_probe = _nonlinear_values(op, lin_probe, params, probe_times, nsub, 0.0)
    c1 = max(lq_norm(u0.with_values(v), q)
             / (t ** (1.0 - alpha) * m0 ** params.p)
             for t, v in zip(probe_times, f_probe))
    f_norm = 0.0
    c2 = 0.0
    if w is not None and np.any(w.values != 0.0):
        src = u0.grid.nodes ** (-params.sigma1) * w.values
        f_norm = lq_norm(u0.with_values(src), q)
        h_probe = _forcing_values(op, src, params.rho, probe_times, nsub)
        c2 = max(lq_norm(u0.with_values(v), q)
                 / (f_norm * t ** (params.rho + 1.0))
                 for t, v in zip(probe_times, h_probe))

    def closure(t_end: float) -> float:
        return (c1 * t_end ** (1.0 - alpha) * radius ** params.p
                + c2 * f_norm * t_end ** (params.rho + 1.0))

    t_floor = 1e-6 * horizon_guess
    if closure(t_floor) > 0.5 * radius:
        raise NoValidT("closure value %g exceeds %g even at T=%g"
                       % (closure(t_floor), 0.5 * radius, t_floor))
    if closure(horizon_guess) <= 0.5 * radius:
        t_end = horizon_guess
    else:
        lo, hi = t_floor, horizon_guess
        for _ in range(80):
            mid = math.sqrt(lo * hi)
            if closure(mid) <= 0.5 * radius:
                lo = mid
            else:
                hi = mid
        t_end = lo

    times = _time_grid(t_end, cfg.n_times)
    lin_vals = _linear_values(op, u0, w, params, times, nsub)
    linear = _wrap(u0, times, lin_vals, 0.0, q)
    u_prev = linear
    diffs = [linear.x_norm]
    ratios: List[float] = []
    converged = diffs[0] < cfg.picard_tol
    if not converged:
        for _ in range(1, cfg.max_picard):
            u_next = picard_step(u_prev, u0, w, params, cfg, linear=linear,
                                 head_theta=0.0, metric=(0.0, q))
            d = x_distance(u_next, u_prev, 0.0, q)
            ratios.append(d / diffs[-1])
            diffs.append(d)
            u_prev = u_next
            if len(ratios) >= 3 and all(s >= 1.0 for s in ratios[-3:]):
                raise NotContracting(
                    "local iteration not contracting, ratios %s"
                    % ["%.3g" % s for s in ratios[-3:]])
            if d < cfg.picard_tol:
                converged = True
                break

    trace = u_prev.norms(q)
    lin_trace = linear.norms(q)
    jump = float(np.max(np.abs(np.diff(trace))))
    scheme_tol = max(float(np.max(np.abs(np.diff(lin_trace)))),
                     cfg.picard_tol)
    if jump > 5.0 * scheme_tol:
        raise NumericalFailure(
            "L^q trace jumps by %g, beyond 5x the scheme modulus %g"
            % (jump, scheme_tol))
    return LocalSolution(u_prev, t_end, q, radius, c1, c2, jump,
                         scheme_tol, diffs, ratios, converged)


# ---------------------------------------------------------------------------
# weak-form residual
# ---------------------------------------------------------------------------

def _s5(x: np.ndarray) -> np.ndarray:
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def _ds5(x: np.ndarray) -> np.ndarray:
    return 30.0 * x * x * (1.0 - x) * (1.0 - x)


def _d2s5(x: np.ndarray) -> np.ndarray:
    return 60.0 * x * (1.0 - 3.0 * x + 2.0 * x * x)


@dataclass(frozen=True)
class SpaceTimeTest:
    """Separable C^2 test function eta(t) chi(r), compactly supported.

    eta equals 1 on [0, t_flat] and ramps to 0 at t_end; chi ramps up on
    [r_lo, r_a], holds 1, and ramps down to 0 at r_hi.  The factors and
    the radial derivatives chi', chi'' are quintic-smoothstep polynomials,
    so the weak-form pairing needs no numerical differentiation.
    """

    t_flat: float
    t_end: float
    r_lo: float
    r_a: float
    r_b: float
    r_hi: float

    def eta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        x = np.clip((self.t_end - t) / (self.t_end - self.t_flat), 0.0, 1.0)
        return _s5(x)

    def eta_d1(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        width = self.t_end - self.t_flat
        x = (self.t_end - t) / width
        inside = (x > 0.0) & (x < 1.0)
        return np.where(inside, -_ds5(np.clip(x, 0.0, 1.0)) / width, 0.0)

    def _chi_pieces(self, r):
        r = np.asarray(r, dtype=float)
        up_w = self.r_a - self.r_lo
        dn_w = self.r_hi - self.r_b
        xu = np.clip((r - self.r_lo) / up_w, 0.0, 1.0)
        xd = np.clip((self.r_hi - r) / dn_w, 0.0, 1.0)
        return r, xu, xd, up_w, dn_w

    def chi(self, r) -> np.ndarray:
        _, xu, xd, _, _ = self._chi_pieces(r)
        return _s5(xu) * _s5(xd)

    def chi_d1(self, r) -> np.ndarray:
        r, xu, xd, up_w, dn_w = self._chi_pieces(r)
        on_up = (r > self.r_lo) & (r < self.r_a)
        on_dn = (r > self.r_b) & (r < self.r_hi)
        out = np.zeros_like(r)
        out = np.where(on_up, _ds5(xu) / up_w, out)
        out = np.where(on_dn, -_ds5(xd) / dn_w, out)
        return out

    def chi_d2(self, r) -> np.ndarray:
        r, xu, xd, up_w, dn_w = self._chi_pieces(r)
        on_up = (r > self.r_lo) & (r < self.r_a)
        on_dn = (r > self.r_b) & (r < self.r_hi)
        out = np.zeros_like(r)
        out = np.where(on_up, _d2s5(xu) / up_w ** 2, out)
        out = np.where(on_dn, _d2s5(xd) / dn_w ** 2, out)
        return out


def bump_test_function(t_end: float, r_lo: float, r_hi: float,
                       t_flat_frac: float = 0.5) -> SpaceTimeTest:
    """Standard plateau test function on [0, t_end] x [r_lo, r_hi]."""
    if not (0.0 <= r_lo < r_hi and t_end > 0.0):
        raise ValueError("need 0 <= r_lo < r_hi and t_end > 0")
    span = r_hi - r_lo
    return SpaceTimeTest(t_flat=t_flat_frac * t_end, t_end=t_end,
                         r_lo=r_lo, r_a=r_lo + 0.25 * span,
                         r_b=r_hi - 0.25 * span, r_hi=r_hi)


def weak_residual(traj: Trajectory, u0: RadialField,
                  w: Optional[RadialField], params: ProblemParams,
                  test: SpaceTimeTest) -> float:
    """Relative defect of the distributional form of the equation.

    Pairs the trajectory against eta(t) chi(r): the sum of the evolution
    term int u (r^s1 Q_t + Lap Q), the source term
    int (r^s2 |u|^p + t^rho w) Q, and the initial pairing
    int r^s1 u0 Q(0) vanishes for exact solutions.  Returns |sum| divided
    by the largest term magnitude; time quadrature is trapezoidal over
    the stored grid with u(0) = u0 prepended, except the t^rho factor of
    the forcing, which separates and is integrated adaptively.

    The test support must end inside the trajectory horizon and inside
    the radial grid, otherwise the truncated quadrature is meaningless.
    """
    require_valid(params)
    if test.t_end > traj.times[-1]:
        raise ValueError("test support [0, %g] exceeds the trajectory "
                         "horizon %g" % (test.t_end, traj.times[-1]))
    grid = u0.grid
    if test.r_hi > grid.nodes[-1]:
        raise ValueError("test support reaches r=%g beyond the grid edge %g"
                         % (test.r_hi, grid.nodes[-1]))
    r = grid.nodes
    cw = grid.cell_widths()
    area = sphere_area(float(params.N))
    meas = area * r ** (params.N - 1.0) * cw
    chi = test.chi(r)
    lap_chi = test.chi_d2(r) + (params.N - 1.0) / r * test.chi_d1(r)
    w_s1 = r ** params.sigma1
    w_s2 = r ** params.sigma2

    times = np.concatenate(([0.0], traj.times))
    vals = [u0.values] + [f.values for f in traj.fields]
    evo = np.empty(times.size)
    src = np.empty(times.size)
    for i, (t, v) in enumerate(zip(times, vals)):
        eta, eta_d = float(test.eta(t)), float(test.eta_d1(t))
        evo[i] = float(np.sum(v * (w_s1 * eta_d * chi + eta * lap_chi)
                              * meas))
        src[i] = float(np.sum(w_s2 * np.abs(v) ** params.p * eta * chi
                              * meas))
    term_evo = float(np.trapezoid(evo, times))
    term_src = float(np.trapezoid(src, times))

    term_force = 0.0
    if w is not None and np.any(w.values != 0.0):
        space = float(np.sum(w.values * chi * meas))
        tfac, _ = quad(lambda s: s ** params.rho * float(test.eta(s)),
                       0.0, test.t_end, limit=200)
        term_force = space * tfac
    term_init = float(np.sum(w_s1 * u0.values * chi * meas))

    total = term_evo + term_src + term_force + term_init
    scale = max(abs(term_evo), abs(term_src) + abs(term_force),
                abs(term_init))
    if scale == 0.0:
        return 0.0
    return abs(total) / scale


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

TRAJECTORY_CSV_COLUMNS = ["t", "Lr_norm", "weighted_norm", "max_value"]

CONVERGENCE_CSV_COLUMNS = ["iteration", "x_norm_diff", "ratio"]


def trajectory_csv_rows(traj: Trajectory, r: float, mu: float) -> List[list]:
    norms = traj.norms(r)
    maxes = traj.max_values()
    return [[float(t), float(n), float(t ** mu * n), float(m)]
            for t, n, m in zip(traj.times, norms, maxes)]


def convergence_csv_rows(diffs: Sequence[float],
                         ratios: Sequence[float]) -> List[list]:
    rows = []
    for k, d in enumerate(diffs):
        ratio = ratios[k - 1] if 1 <= k <= len(ratios) else ""
        rows.append([k + 1, float(d), ratio])
    return rows
