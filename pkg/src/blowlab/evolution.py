"""Time evolution in both frames.

Physical frame: u_t = u_xx + |u|^(p-1) u on an interval (Dirichlet) or a ball
(radial, Dirichlet at r = R), by Strang splitting with the reaction substep
solved exactly,

    u(dt) = u0 (1 - (p-1) dt |u0|^(p-1))^(-1/(p-1)),

and Crank-Nicolson diffusion. The step policy dt = theta (max|u|)^(1-p)
follows the blow-up so the run reaches any cap in O(log) steps.

Rescaled frame: w(y, s) with y = (x-a)/sqrt(T-t), s = -log(T-t),
w = (T-t)^(1/(p-1)) u, solving

    w_s = w_yy - (y/2) w_y - w/(p-1) + |w|^(p-1) w

by a semi-implicit step (linear part implicit, nonlinearity explicit) that
keeps the constants 0 and kappa fixed to solver roundoff.

The weighted energy with rho = (4 pi)^(-n/2) exp(-|y|^2/4) (unit mass),

    E(w) = int [ |grad w|^2 / 2 + w^2 / (2(p-1)) - |w|^(p+1)/(p+1) ] rho dy,

decreases along the rescaled flow with dissipation rate int |w_s|^2 rho dy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eig, solve_banded
from scipy.optimize import minimize_scalar

from .calculus import SampledField
from .errors import DomainError, NumericError, UsageError
from .exponents import ProblemParams, kappa
from .quadrature import sphere_area


@dataclass(frozen=True)
class EnergyValue:
    total: float
    dirichlet: float
    quadratic: float
    potential: float


def _energy_parts(values, grad_sq, weights, norm, p) -> EnergyValue:
    d = 0.5 * float(np.dot(weights, grad_sq)) * norm
    q = float(np.dot(weights, values**2)) / (2.0 * (p - 1.0)) * norm
    pot = float(np.dot(weights, np.abs(values) ** (p + 1.0))) / (p + 1.0) * norm
    return EnergyValue(total=d + q - pot, dirichlet=d, quadratic=q, potential=pot)


def energy(w, params: ProblemParams, y: np.ndarray | None = None,
           geometry: str = "interval") -> EnergyValue:
    """Weighted energy of a rescaled state.

    Accepts a SampledField (quadrature grid; exact for the polynomial part)
    or an array of mesh values with the mesh y. Mesh integrals use the
    trapezoid rule against the normalized Gaussian; constants are then only
    as exact as the truncated tail, so checks at 1e-10 should use fields.
    """
    p = params.p
    if isinstance(w, SampledField):
        norm = (4.0 * math.pi) ** (-w.grid.n / 2.0)
        return _energy_parts(w.values, w.grad_sq(), w.grid.weights, norm, p)
    if y is None:
        raise UsageError("mesh energy needs the mesh")
    w = np.asarray(w, dtype=float)
    h = y[1] - y[0]
    grad = np.gradient(w, h, edge_order=2)
    if geometry == "interval":
        n = 1
        dens = (4.0 * math.pi) ** (-0.5) * np.exp(-y * y / 4.0)
    elif geometry == "ball":
        n = params.n
        dens = ((4.0 * math.pi) ** (-n / 2.0) * np.exp(-y * y / 4.0)
                * sphere_area(n) * np.maximum(y, 0.0) ** (n - 1))
    else:
        raise UsageError(f"unknown geometry {geometry!r}")
    d = float(np.trapezoid(0.5 * grad**2 * dens, y))
    q = float(np.trapezoid(w * w / (2.0 * (p - 1.0)) * dens, y))
    pot = float(np.trapezoid(np.abs(w) ** (p + 1.0) / (p + 1.0) * dens, y))
    return EnergyValue(total=d + q - pot, dirichlet=d, quadratic=q, potential=pot)


def exact_energy_kappa(params: ProblemParams) -> float:
    """E(kappa) = (1/2 - 1/(p+1)) kappa^(p+1)."""
    p = params.p
    return (0.5 - 1.0 / (p + 1.0)) * kappa(p) ** (p + 1.0)


def rescale_to_similarity(u: np.ndarray, x: np.ndarray, t: float, T: float,
                          a: float, y_out: np.ndarray,
                          params: ProblemParams) -> tuple[np.ndarray, float, np.ndarray]:
    """(w on y_out, s, validity mask). Outside the sampled x-range w is nan."""
    if not T > t:
        raise UsageError(f"need T > t, got T = {T}, t = {t}")
    lam = math.sqrt(T - t)
    xt = a + lam * np.asarray(y_out)
    mask = (xt >= x[0]) & (xt <= x[-1])
    spl = CubicSpline(x, u)
    w = np.full(xt.shape, np.nan)
    w[mask] = (T - t) ** (1.0 / (params.p - 1.0)) * spl(xt[mask])
    return w, -math.log(T - t), mask


# ---------------------------------------------------------------------------
# rescaled frame


def _rescaled_banded(y: np.ndarray, params: ProblemParams, ds: float,
                     geometry: str) -> np.ndarray:
    """Banded (I - ds A) with A = Lap - (y/2) d/dy - 1/(p-1), Neumann walls."""
    m = y.size
    h = y[1] - y[0]
    p, n = params.p, params.n
    r = ds / (h * h)
    lo = np.zeros(m)
    di = np.zeros(m)
    up = np.zeros(m)
    for i in range(m):
        yi = y[i]
        if geometry == "ball" and i == 0:
            # smooth radial origin: Lap w = n w_rr, no drift
            a_lo, a_di, a_up = 0.0, -2.0 * n * r, 2.0 * n * r
            drift = 0.0
        else:
            a_lo, a_di, a_up = r, -2.0 * r, r
            if geometry == "ball":
                curv = ds * (n - 1.0) / (yi * 2.0 * h)
                a_lo -= curv
                a_up += curv
            drift = ds * (-yi / 2.0) / (2.0 * h)
        a_lo -= drift
        a_up += drift
        a_di -= ds / (p - 1.0)
        if i == 0 and geometry != "ball":
            a_up += a_lo
            a_lo = 0.0
        if i == m - 1:
            a_lo += a_up
            a_up = 0.0
        lo[i], di[i], up[i] = -a_lo, 1.0 - a_di, -a_up
    ab = np.zeros((3, m))
    ab[0, 1:] = up[:-1]
    ab[1, :] = di
    ab[2, :-1] = lo[1:]
    return ab


@dataclass
class RescaledRun:
    params: ProblemParams
    y: np.ndarray
    ds: float
    geometry: str
    s_values: np.ndarray
    energies: np.ndarray
    sup_dev: np.ndarray          # sup |w - kappa| per recorded state
    states: np.ndarray | None    # (nrec, m) when recorded
    status: str                  # 'completed' | 'blew-up'
    events: dict = dc_field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        if self.states is None:
            raise UsageError("run was not recorded densely")
        return self.states[-1]


class RescaledFlow:
    """Semi-implicit integrator for the rescaled equation on [-L, L] (interval,
    Neumann) or [0, L] (ball, Neumann)."""

    def __init__(self, params: ProblemParams, L: float = 8.0, m: int = 801,
                 ds: float = 1e-2, geometry: str = "interval", cap: float = 1e6):
        if L < 8.0:
            raise UsageError(f"domain half-width must be >= 8, got {L}")
        if geometry not in ("interval", "ball"):
            raise UsageError(f"unknown geometry {geometry!r}")
        if ds <= 0.0 or m < 9:
            raise UsageError("need ds > 0 and a reasonable mesh")
        self.params = params
        self.geometry = geometry
        self.cap = cap
        self.ds = ds
        self.y = np.linspace(-L, L, m) if geometry == "interval" else np.linspace(0.0, L, m)
        self._ab = _rescaled_banded(self.y, params, ds, geometry)

    def step(self, w: np.ndarray) -> np.ndarray:
        p = self.params.p
        rhs = w + self.ds * np.abs(w) ** (p - 1.0) * w
        return solve_banded((1, 1), self._ab, rhs)

    def run(self, w0, s_end: float, record_states: bool = True) -> RescaledRun:
        w = (np.asarray(w0(self.y), dtype=float) if callable(w0)
             else np.asarray(w0, dtype=float).copy())
        if w.shape != self.y.shape:
            raise UsageError("initial state does not match the mesh")
        kap = kappa(self.params.p)
        nsteps = int(round(s_end / self.ds))
        s_vals = [0.0]
        energies = [energy(w, self.params, self.y, self.geometry).total]
        sup_dev = [float(np.abs(w - kap).max())]
        states = [w.copy()] if record_states else None
        status = "completed"
        events = {}
        for k in range(nsteps):
            w = self.step(w)
            if not np.all(np.isfinite(w)) or np.abs(w).max() > self.cap:
                status = "blew-up"
                events["cap_at_s"] = (k + 1) * self.ds
                break
            s_vals.append((k + 1) * self.ds)
            energies.append(energy(w, self.params, self.y, self.geometry).total)
            sup_dev.append(float(np.abs(w - kap).max()))
            if record_states:
                states.append(w.copy())
        return RescaledRun(
            params=self.params, y=self.y, ds=self.ds, geometry=self.geometry,
            s_values=np.array(s_vals), energies=np.array(energies),
            sup_dev=np.array(sup_dev),
            states=np.array(states) if record_states else None,
            status=status, events=events,
        )


def step_rescaled(w: np.ndarray, y: np.ndarray, params: ProblemParams,
                  ds: float, geometry: str = "interval") -> np.ndarray:
    """One semi-implicit step (convenience wrapper; builds the matrix)."""
    ab = _rescaled_banded(np.asarray(y, dtype=float), params, ds, geometry)
    rhs = w + ds * np.abs(w) ** (params.p - 1.0) * w
    return solve_banded((1, 1), ab, rhs)


def linearized_matrix(y: np.ndarray, params: ProblemParams,
                      geometry: str = "interval") -> np.ndarray:
    """Dense mesh matrix of Lap - (y/2) d/dy - 1/(p-1) + p kappa^(p-1), the
    flow linearized about the constant profile, with the stepper's stencils."""
    y = np.asarray(y, dtype=float)
    m = y.size
    ab = _rescaled_banded(y, params, 1.0, geometry)
    dense = np.zeros((m, m))
    idx = np.arange(m)
    dense[idx, idx] = ab[1]
    dense[idx[:-1], idx[1:]] = ab[0][1:]
    dense[idx[1:], idx[:-1]] = ab[2][:-1]
    A = np.eye(m) - dense
    kap = kappa(params.p)
    return A + params.p * kap ** (params.p - 1.0) * np.eye(m)


def stable_mode_state(y: np.ndarray, params: ProblemParams, amp: float,
                      geometry: str = "interval", target: float = -1.0) -> np.ndarray:
    """kappa plus amp times the discrete linearized eigenmode whose decay rate
    is closest to target (default -1, the first mode below the constant)."""
    L = linearized_matrix(y, params, geometry)
    mu, vecs = eig(L)
    mu = mu.real
    j = int(np.argmin(np.abs(mu - target)))
    v = vecs[:, j].real
    v /= np.abs(v).max()
    if v[np.abs(y).argmin()] < 0.0:
        v = -v
    return kappa(params.p) + amp * v


@dataclass(frozen=True)
class DissipationReport:
    s_lo: float
    s_hi: float
    lhs: float            # int int |w_s|^2 rho dy ds
    rhs: float            # E(s_lo) - E(s_hi)
    rel_err: float
    holds: bool


def dissipation_check(run: RescaledRun, s_a: float, s_b: float,
                      tol: float = 0.02) -> DissipationReport:
    """Check int_{s_a}^{s_b} int |w_s|^2 rho dy ds = E(a) - E(b) within tol.

    w_s from centered differences of the recorded states, so the window is
    snapped inward by one recording step at each end."""
    if run.states is None:
        raise UsageError("dissipation check needs a densely recorded run")
    s = run.s_values
    if s_b <= s_a:
        raise UsageError("need s_a < s_b")
    i_a = max(1, int(np.searchsorted(s, s_a)))
    i_b = min(s.size - 2, int(np.searchsorted(s, s_b)))
    if i_b - i_a < 8:
        raise UsageError("recorded states are too sparse in the requested window")
    ds = run.ds
    y = run.y
    if run.geometry == "interval":
        dens = (4.0 * math.pi) ** (-0.5) * np.exp(-y * y / 4.0)
    else:
        n = run.params.n
        dens = ((4.0 * math.pi) ** (-n / 2.0) * np.exp(-y * y / 4.0)
                * sphere_area(n) * np.maximum(y, 0.0) ** (n - 1))
    ws = (run.states[i_a + 1:i_b + 2] - run.states[i_a - 1:i_b]) / (2.0 * ds)
    rates = np.array([np.trapezoid(v * v * dens, y) for v in ws])
    lhs = float(np.trapezoid(rates, dx=ds))
    rhs = float(run.energies[i_a] - run.energies[i_b + 1])
    rel = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return DissipationReport(s_lo=float(s[i_a]), s_hi=float(s[i_b + 1]),
                             lhs=lhs, rhs=rhs, rel_err=rel, holds=rel <= tol)


# ---------------------------------------------------------------------------
# physical frame


@dataclass
class Snapshot:
    t: float
    max_u: float
    u: np.ndarray


@dataclass
class BlowupRun:
    params: ProblemParams
    x: np.ndarray
    geometry: str
    status: str                  # 'blew-up' | 'global-existence'
    t_end: float
    times: np.ndarray
    sup_u: np.ndarray
    min_u: float
    u_final: np.ndarray
    snapshots: list
    T_est: float | None
    fit: dict
    a_est: float | None
    meta: dict = dc_field(default_factory=dict)


def _diffusion_banded(x: np.ndarray, dt: float, geometry: str, n: int) -> np.ndarray:
    """Crank-Nicolson left matrix (I - dt/2 Lap), Dirichlet outer wall."""
    m = x.size
    h = x[1] - x[0]
    r = 0.5 * dt / (h * h)
    lo = np.full(m, -r)
    di = np.full(m, 1.0 + 2.0 * r)
    up = np.full(m, -r)
    if geometry == "ball":
        lo[0], di[0], up[0] = 0.0, 1.0 + 2.0 * n * r, -2.0 * n * r
        for i in range(1, m - 1):
            curv = 0.5 * dt * (n - 1.0) / (x[i] * 2.0 * h)
            lo[i] = -r + curv
            up[i] = -r - curv
    lo[-1], di[-1], up[-1] = 0.0, 1.0, 0.0
    lo[0] = 0.0
    if geometry == "interval":
        di[0], up[0] = 1.0, 0.0
    ab = np.zeros((3, m))
    ab[0, 1:] = up[:-1]
    ab[1, :] = di
    ab[2, :-1] = lo[1:]
    return ab


def _diffusion_rhs(u: np.ndarray, x: np.ndarray, dt: float, geometry: str,
                   n: int) -> np.ndarray:
    h = x[1] - x[0]
    r = 0.5 * dt / (h * h)
    rhs = u.copy()
    lap = np.zeros_like(u)
    lap[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    if geometry == "ball":
        lap[0] = 2.0 * n * (u[1] - u[0])
        curv = dt * (n - 1.0) / (x[1:-1] * 4.0 * h)
        rhs[1:-1] = u[1:-1] + r * lap[1:-1] + curv * (u[2:] - u[:-2])
        rhs[0] = u[0] + r * lap[0]
    else:
        rhs[1:-1] = u[1:-1] + r * lap[1:-1]
        rhs[0] = 0.0
    rhs[-1] = 0.0
    return rhs


def _reaction_exact(u: np.ndarray, dt: float, p: float, big: float) -> np.ndarray:
    """Exact flow of u' = |u|^(p-1) u; arguments driven past the pole are sent
    to +-big so the cap check fires on the next inspection."""
    au = np.abs(u)
    z = 1.0 - (p - 1.0) * dt * au ** (p - 1.0)
    out = np.where(z > 0.0, u * np.maximum(z, 1e-300) ** (-1.0 / (p - 1.0)),
                   np.sign(u) * big)
    return out


def _parabola_argmax(x: np.ndarray, u: np.ndarray) -> float:
    i = int(np.argmax(u))
    if i == 0 or i == u.size - 1:
        return float(x[i])
    denom = u[i - 1] - 2.0 * u[i] + u[i + 1]
    if denom == 0.0:
        return float(x[i])
    return float(x[i] + 0.5 * (x[1] - x[0]) * (u[i - 1] - u[i + 1]) / denom)


def fit_blowup_time(times: np.ndarray, sups: np.ndarray, p: float,
                    decade: float = 10.0) -> dict:
    """Least-squares fit of log(max u) = log C - beta log(T - t) over the last
    decade of growth, with a bounded 1-D search over T past the end."""
    if times.size < 8:
        raise UsageError("not enough history to fit a blow-up time")
    mask = sups >= sups[-1] / decade
    if mask.sum() < 8:
        mask = np.zeros_like(mask)
        mask[-8:] = True
    tt, uu = times[mask], sups[mask]
    t_end = times[-1]
    tail = uu[-1] ** (1.0 - p) / (p - 1.0)   # pure-reaction remaining time

    def sse(T):
        X = np.log(T - tt)
        Y = np.log(uu)
        A = np.vstack([np.ones_like(X), X]).T
        coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
        r = Y - A @ coef
        return float(r @ r), coef

    # search log((T - t_end)/tail): the sse minimum is sharp on the tail
    # scale, which a linear bracket spanning [1e-3, 100] tails cannot resolve
    res = minimize_scalar(lambda xi: sse(t_end + tail * math.exp(xi))[0],
                          bounds=(math.log(1e-3), math.log(100.0)),
                          method="bounded", options={"xatol": 1e-12})
    T_est = float(t_end + tail * math.exp(res.x))
    err, coef = sse(T_est)
    return {"T_est": T_est, "exponent": float(-coef[1]), "logC": float(coef[0]),
            "sse": err, "points": int(mask.sum())}


def solve_physical(u0, params: ProblemParams, R: float = 2.0, m: int = 4001,
                   geometry: str = "interval", theta: float = 0.05,
                   u_cap: float = 1e8, t_max: float = 10.0,
                   diffusion: bool = True, fixed_dt: float | None = None,
                   snapshot_levels: np.ndarray | None = None) -> BlowupRun:
    """Run the physical problem until blow-up (max |u| >= u_cap), t_max, or a
    numeric failure. theta <= 0.2 keeps dt within the stability policy
    dt <= 0.2 (max|u|)^(1-p)."""
    if geometry not in ("interval", "ball"):
        raise UsageError(f"unknown geometry {geometry!r}")
    if not 0.0 < theta <= 0.2:
        raise UsageError(f"theta must lie in (0, 0.2], got {theta}")
    if R <= 0.0 or m < 9:
        raise UsageError("need R > 0 and a reasonable mesh")
    x = np.linspace(-R, R, m) if geometry == "interval" else np.linspace(0.0, R, m)
    u = np.asarray(u0(x), dtype=float) if callable(u0) else np.asarray(u0, dtype=float).copy()
    if u.shape != x.shape:
        raise UsageError("initial data does not match the mesh")
    p, n = params.p, params.n
    big = 10.0 * u_cap

    sup0 = float(np.abs(u).max())
    if sup0 == 0.0:
        sup0 = 1.0
    if snapshot_levels is None:
        # half-decade ladder from above the initial size up to the cap
        lead = 10.0 ** np.arange(math.floor(math.log10(sup0 * 4.0)) + 1.0,
                                 math.log10(u_cap) - 0.25, 0.5)
        snapshot_levels = lead
    levels = sorted(float(v) for v in snapshot_levels)
    next_level = 0

    times = [0.0]
    sups = [float(u.max())]
    snapshots = [Snapshot(t=0.0, max_u=float(u.max()), u=u.copy())]
    min_u = float(u.min())
    t = 0.0
    status = None
    while True:
        amax = float(np.abs(u).max())
        if amax >= u_cap:
            status = "blew-up"
            break
        if t >= t_max:
            status = "global-existence"
            break
        if not math.isfinite(amax):
            raise NumericError("state left float range", payload={"t": t})
        dt = fixed_dt if fixed_dt is not None else theta * amax ** (1.0 - p)
        dt = min(dt, 0.2 * amax ** (1.0 - p), t_max - t)
        if dt <= 0.0 or not math.isfinite(dt):
            raise NumericError(f"step size underflow at t = {t}", payload={"t": t})
        u = _reaction_exact(u, 0.5 * dt, p, big)
        if diffusion:
            ab = _diffusion_banded(x, dt, geometry, n)
            u = solve_banded((1, 1), ab, _diffusion_rhs(u, x, dt, geometry, n))
        u = _reaction_exact(u, 0.5 * dt, p, big)
        t += dt
        times.append(t)
        sups.append(float(u.max()))
        min_u = min(min_u, float(u.min()))
        while next_level < len(levels) and u.max() >= levels[next_level]:
            snapshots.append(Snapshot(t=t, max_u=float(u.max()), u=u.copy()))
            next_level += 1

    times = np.array(times)
    sups = np.array(sups)
    fit = {}
    T_est = None
    a_est = None
    if status == "blew-up":
        fit = fit_blowup_time(times, sups, p)
        T_est = fit["T_est"]
        a_est = _parabola_argmax(x, snapshots[-1].u)
        snapshots.append(Snapshot(t=t, max_u=float(u.max()), u=u.copy()))
    return BlowupRun(params=params, x=x, geometry=geometry, status=status,
                     t_end=float(t), times=times, sup_u=sups, min_u=min_u,
                     u_final=u.copy(), snapshots=snapshots,
                     T_est=T_est, fit=fit, a_est=a_est,
                     meta={"theta": theta, "u_cap": u_cap, "t_max": t_max,
                           "diffusion": diffusion, "R": R, "m": m,
                           "fixed_dt": fixed_dt})


# ---------------------------------------------------------------------------
# convergence-to-kappa pipeline


@dataclass(frozen=True)
class WindowRow:
    t: float
    T_minus_t: float
    s: float
    sup_dev: float      # sup_{|y| <= K} |w - kappa|
    min_H: float        # min of w/(p-1) + y w_y / 2 on the window


@dataclass
class ConvergenceReport:
    params: ProblemParams
    K: float
    conv_tol: float
    T_est: float
    a_est: float
    rows: list
    decreasing: bool
    final_sup: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.params.n, "p": self.params.p, "K": self.K,
            "conv_tol": self.conv_tol, "T_est": self.T_est, "a_est": self.a_est,
            "rows": [{"t": r.t, "T_minus_t": r.T_minus_t, "s": r.s,
                      "sup_dev": r.sup_dev, "min_H": r.min_H} for r in self.rows],
            "decreasing": self.decreasing, "final_sup": self.final_sup,
            "passed": self.passed,
        }


def convergence_pipeline(run: BlowupRun, K: float = 1.0, conv_tol: float = 0.05,
                         min_snapshots: int = 3, max_rows: int = 5,
                         resolution_factor: float = 4.0) -> ConvergenceReport:
    """Rescale stored snapshots around (T_est, a_est) and check that
    sup_{|y|<=K} |w - kappa| decreases over >= min_snapshots times and ends
    below conv_tol. H on the window is reported per row."""
    if run.status != "blew-up":
        raise UsageError("the convergence pipeline needs a run that blew up")
    T, a = run.T_est, run.a_est
    p = run.params.p
    kap = kappa(p)
    h = float(run.x[1] - run.x[0])
    sup_start = run.sup_u[0]
    yg = np.linspace(-K, K, 201)
    rows = []
    for snap in run.snapshots:
        Tt = T - snap.t
        if Tt <= 0.0:
            continue
        lam = math.sqrt(Tt)
        if lam < resolution_factor * h:        # window thinner than the mesh
            continue
        if a - 1.05 * K * lam < run.x[0] or a + 1.05 * K * lam > run.x[-1]:
            continue
        if snap.max_u < 100.0 * sup_start:     # not yet in the blow-up regime
            continue
        spl = CubicSpline(run.x, snap.u)
        w = Tt ** (1.0 / (p - 1.0)) * spl(a + lam * yg)
        w_y = Tt ** (1.0 / (p - 1.0)) * lam * spl(a + lam * yg, 1)
        Hw = w / (p - 1.0) + 0.5 * yg * w_y
        rows.append(WindowRow(t=snap.t, T_minus_t=float(Tt), s=float(-math.log(Tt)),
                              sup_dev=float(np.abs(w - kap).max()),
                              min_H=float(Hw.min())))
    rows = rows[-max_rows:]
    sups = [r.sup_dev for r in rows]
    decreasing = len(rows) >= min_snapshots and all(
        b < a for a, b in zip(sups[:-1], sups[1:]))
    final = sups[-1] if sups else math.inf
    return ConvergenceReport(params=run.params, K=K, conv_tol=conv_tol,
                             T_est=float(T), a_est=float(a), rows=rows,
                             decreasing=decreasing, final_sup=float(final),
                             passed=bool(decreasing and final < conv_tol))
