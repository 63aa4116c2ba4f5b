"""One-dimensional finite-volume solver for the six-field balance laws.

Strang splitting with the relaxation half-steps outermost.  The homogeneous
relaxation subproblem dPi/dt = -Pi/tau (at frozen rho, v, eps) is solved in
closed form, so stiffness costs nothing and no implicit solve is needed.
The hyperbolic substep is a first-order Rusanov (local Lax-Friedrichs)
update, optionally second-order MUSCL with a minmod limiter and a two-stage
SSP time integration.

Cell data lives in arrays of shape (6, N) with rows (F, F_x, F_y, F_z,
F_ll, G_ll); a five-row variant provides the reference solver for the
equilibrium subsystem (the classical polyatomic gas dynamics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .gas import GasSpec

WAVE_SPEED_SAFETY = 1.1
BOUNDARIES = ("periodic", "outflow", "reflective")
SCHEMES = ("rusanov", "muscl")
LIMITERS = ("minmod", "none")
SCENARIO_KINDS = ("riemann", "smooth_wave", "uniform_relaxation")
PROJECTION_PULLBACK = 0.999
ABORT_PROJECTION_FRACTION = 0.01


class SolverError(RuntimeError):
    """Fatal solver failure (inadmissible data beyond repair, bad setup)."""


# ---------------------------------------------------------------------------
# vectorized state algebra
# ---------------------------------------------------------------------------

def primitive_fields(U: np.ndarray, spec: GasSpec) -> dict[str, np.ndarray]:
    """Primitive arrays (rho, vx, vy, vz, v2, eps, p, T, Pi) from (6, N) data."""
    rho = U[0]
    if np.any(rho <= 0):
        raise SolverError("non-positive density in solver state")
    vx, vy, vz = U[1] / rho, U[2] / rho, U[3] / rho
    v2 = vx * vx + vy * vy + vz * vz
    rho_eps = 0.5 * (U[5] - rho * v2)
    if np.any(rho_eps <= 0):
        raise SolverError("non-positive internal energy in solver state")
    p = 2.0 * rho_eps / spec.D
    Pi = (U[4] - rho * v2) / 3.0 - p
    T = p / (spec.gas_constant * rho)
    return {
        "rho": rho, "vx": vx, "vy": vy, "vz": vz, "v2": v2,
        "eps": rho_eps / rho, "p": p, "T": T, "Pi": Pi,
    }


def flux_fields(U: np.ndarray, spec: GasSpec) -> np.ndarray:
    """Physical flux along x for (6, N) data."""
    w = primitive_fields(U, spec)
    ppi = w["p"] + w["Pi"]
    out = np.empty_like(U)
    out[0] = U[1]
    out[1] = U[1] * w["vx"] + ppi
    out[2] = U[2] * w["vx"]
    out[3] = U[3] * w["vx"]
    out[4] = (5.0 * ppi + w["rho"] * w["v2"]) * w["vx"]
    out[5] = (U[5] + 2.0 * ppi) * w["vx"]
    return out


def max_wave_speed(U: np.ndarray, spec: GasSpec, safety: float = WAVE_SPEED_SAFETY) -> float:
    """CFL bound max(|v_x| + safety * sqrt(5 (p+Pi) / 3 rho)) over cells.

    The nonequilibrium acoustic speed carries (p + Pi), not p: for
    Pi > 0.21 p the equilibrium value under-estimates the spectrum even
    with the 10% safety margin, so the bound is evaluated on (p + Pi).
    """
    w = primitive_fields(U, spec)
    c = np.sqrt(5.0 * (w["p"] + w["Pi"]) / (3.0 * w["rho"]))
    return float(np.max(np.abs(w["vx"]) + safety * c))


def _interface_speed(UL: np.ndarray, UR: np.ndarray, spec: GasSpec) -> np.ndarray:
    wl = primitive_fields(UL, spec)
    wr = primitive_fields(UR, spec)
    cl = np.abs(wl["vx"]) + np.sqrt(5.0 * (wl["p"] + wl["Pi"]) / (3.0 * wl["rho"]))
    cr = np.abs(wr["vx"]) + np.sqrt(5.0 * (wr["p"] + wr["Pi"]) / (3.0 * wr["rho"]))
    return np.maximum(cl, cr)


def entropy_density_fields(U: np.ndarray, spec: GasSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell entropy density h and specific nonequilibrium part k.

    Vectorized mirror of the closure formulas, evaluated in log space.
    Cells outside the admissibility window get NaN (their entropy does not
    exist); callers only see such cells transiently before projection.
    """
    w = primitive_fields(U, spec)
    rho, p, Pi = w["rho"], w["p"], w["Pi"]
    z = Pi / p
    dm3 = spec.D - 3.0
    with np.errstate(invalid="ignore", divide="ignore"):
        log_xi = np.log(rho) - np.log(2.0 * (p + Pi))
        # 2 rho eps - 3 (p + Pi) = (D - 3) p - 3 Pi
        log_zeta = np.log(rho) + math.log(dm3) - math.log(spec.m) - np.log(dm3 * p - 3.0 * Pi)
        log_omega = (
            np.log(rho)
            - math.log(spec.m)
            - 1.5 * math.log(math.pi)
            - gammaln(0.5 * dm3)
            + 1.5 * log_xi
            + 0.5 * dm3 * log_zeta
        )
        rgas = spec.gas_constant
        h = rgas * rho * (0.5 * spec.D - log_omega)
        k = 0.5 * rgas * (3.0 * np.log1p(z) + dm3 * np.log1p(-3.0 * z / dm3))
    return h, k


# ---------------------------------------------------------------------------
# grid and scenario containers
# ---------------------------------------------------------------------------

@dataclass
class Grid1D:
    """Uniform cell-averaged grid of conserved six-field states."""

    x_left: float
    x_right: float
    U: np.ndarray                  # shape (6, N)
    boundary: str = "periodic"

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float)
        if self.U.ndim != 2 or self.U.shape[0] != 6:
            raise SolverError(f"grid data must have shape (6, N), got {self.U.shape}")
        if self.N < 4:
            raise SolverError(f"need at least 4 cells, got {self.N}")
        if self.boundary not in BOUNDARIES:
            raise SolverError(f"unknown boundary policy {self.boundary!r}")
        if not self.x_right > self.x_left:
            raise SolverError("empty domain")

    @property
    def N(self) -> int:
        return self.U.shape[1]

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.N

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.N) + 0.5) * self.dx

    def with_data(self, U: np.ndarray) -> "Grid1D":
        return Grid1D(x_left=self.x_left, x_right=self.x_right, U=U, boundary=self.boundary)


@dataclass(frozen=True)
class Scenario:
    """A complete run description.

    kind selects the initial condition:
      riemann            - two constant states split at x_split
      smooth_wave        - small right-moving acoustic mode of the relaxed
                           (five-field) dynamics, optionally with the
                           first-order consistent Pi profile
      uniform_relaxation - spatially uniform state with Pi0 = z0 * p
    """

    kind: str = "smooth_wave"
    spec: GasSpec = field(default_factory=GasSpec)
    N: int = 200
    x_left: float = 0.0
    x_right: float = 1.0
    cfl: float = 0.45
    t_end: float = 0.5
    output_cadence: float = 0.0      # 0: snapshots only at t = 0 and t_end
    boundary: str = "periodic"
    scheme: str = "rusanov"
    limiter: str = "minmod"
    # riemann parameters
    rho_left: float = 1.0
    p_left: float = 1.0
    rho_right: float = 0.125
    p_right: float = 0.1
    v_left: float = 0.0
    v_right: float = 0.0
    pi_left: float = 0.0
    pi_right: float = 0.0
    x_split: float = 0.5
    # smooth-wave parameters
    rho0: float = 1.0
    T0: float = 1.0
    amplitude: float = 1e-2
    wavelength: float = 0.0          # 0: one period across the domain
    pi_init: str = "zero"            # "zero" | "ns"
    # uniform-relaxation parameters
    z0: float = 0.3

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise SolverError(f"unknown scenario kind {self.kind!r}")
        if not 0.0 < self.cfl < 1.0:
            raise SolverError(f"CFL must lie in (0, 1), got {self.cfl}")
        if not self.t_end > 0.0:
            raise SolverError(f"end time must be positive, got {self.t_end}")
        if self.scheme not in SCHEMES:
            raise SolverError(f"unknown scheme {self.scheme!r}")
        if self.limiter not in LIMITERS:
            raise SolverError(f"unknown limiter {self.limiter!r}")
        if self.boundary not in BOUNDARIES:
            raise SolverError(f"unknown boundary policy {self.boundary!r}")
        if self.output_cadence < 0.0:
            raise SolverError("output cadence must be nonnegative")


@dataclass
class TimeSeries:
    """Snapshots and per-step diagnostics of a run."""

    x: np.ndarray
    snapshot_times: list[float] = field(default_factory=list)
    snapshots: list[dict[str, np.ndarray]] = field(default_factory=list)
    diag_t: list[float] = field(default_factory=list)
    total_F: list[float] = field(default_factory=list)
    total_Fx: list[float] = field(default_factory=list)
    total_Gll: list[float] = field(default_factory=list)
    total_Fll: list[float] = field(default_factory=list)
    total_entropy: list[float] = field(default_factory=list)
    max_abs_z: list[float] = field(default_factory=list)
    projections: list[int] = field(default_factory=list)   # cumulative
    limiter_fraction: float = 0.0    # max per-step fraction of clipped slopes
    dx: float = 0.0
    periodic: bool = True

    def pi_at(self, snapshot: int = -1) -> np.ndarray:
        return self.snapshots[snapshot]["Pi"]

    def velocity_at(self, snapshot: int = -1) -> np.ndarray:
        return self.snapshots[snapshot]["vx"]


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------

def _pack(rho, vx, p, Pi, spec, vy=None, vz=None) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    vx = np.broadcast_to(np.asarray(vx, dtype=float), rho.shape)
    vy = np.zeros_like(rho) if vy is None else np.asarray(vy, dtype=float)
    vz = np.zeros_like(rho) if vz is None else np.asarray(vz, dtype=float)
    p = np.broadcast_to(np.asarray(p, dtype=float), rho.shape)
    Pi = np.broadcast_to(np.asarray(Pi, dtype=float), rho.shape)
    v2 = vx * vx + vy * vy + vz * vz
    U = np.empty((6, rho.size))
    U[0] = rho
    U[1] = rho * vx
    U[2] = rho * vy
    U[3] = rho * vz
    U[4] = rho * v2 + 3.0 * (p + Pi)
    U[5] = rho * v2 + spec.D * p
    return U


def bulk_viscosity(p, spec: GasSpec):
    """nu = (2/3) ((D - 3) / D) p tau, the stiff-limit coefficient of
    Pi = -nu dv/dx."""
    return 2.0 / 3.0 * (spec.D - 3.0) / spec.D * p * spec.tau


def initial_grid(sc: Scenario) -> Grid1D:
    """Build the cell-averaged initial data for a scenario."""
    spec = sc.spec
    x = sc.x_left + (np.arange(sc.N) + 0.5) * (sc.x_right - sc.x_left) / sc.N
    if sc.kind == "riemann":
        left = x < sc.x_split
        rho = np.where(left, sc.rho_left, sc.rho_right)
        p = np.where(left, sc.p_left, sc.p_right)
        vx = np.where(left, sc.v_left, sc.v_right)
        Pi = np.where(left, sc.pi_left, sc.pi_right)
        U = _pack(rho, vx, p, Pi, spec)
    elif sc.kind == "smooth_wave":
        lam = sc.wavelength if sc.wavelength > 0 else (sc.x_right - sc.x_left)
        kwave = 2.0 * math.pi / lam
        p0 = spec.gas_constant * sc.rho0 * sc.T0
        gamma_eq = (spec.D + 2.0) / spec.D
        c_eq = math.sqrt(gamma_eq * p0 / sc.rho0)
        shape = np.sin(kwave * (x - sc.x_left))
        rho = sc.rho0 * (1.0 + sc.amplitude * shape)
        vx = c_eq * sc.amplitude * shape
        p = p0 * (1.0 + gamma_eq * sc.amplitude * shape)
        if sc.pi_init == "ns":
            dvdx = c_eq * sc.amplitude * kwave * np.cos(kwave * (x - sc.x_left))
            Pi = -bulk_viscosity(p, spec) * dvdx
        else:
            Pi = np.zeros_like(x)
        U = _pack(rho, vx, p, Pi, spec)
    else:  # uniform_relaxation
        p0 = spec.gas_constant * sc.rho0 * sc.T0
        U = _pack(np.full(sc.N, sc.rho0), 0.0, p0, sc.z0 * p0, spec)
    return Grid1D(x_left=sc.x_left, x_right=sc.x_right, U=U, boundary=sc.boundary)


# ---------------------------------------------------------------------------
# substeps
# ---------------------------------------------------------------------------

def _pad(U: np.ndarray, boundary: str, ng: int) -> np.ndarray:
    if boundary == "periodic":
        return np.concatenate([U[:, -ng:], U, U[:, :ng]], axis=1)
    ghost_l = np.repeat(U[:, :1], ng, axis=1)
    ghost_r = np.repeat(U[:, -1:], ng, axis=1)
    if boundary == "reflective":
        ghost_l = U[:, :ng][:, ::-1].copy()
        ghost_r = U[:, -ng:][:, ::-1].copy()
        ghost_l[1] *= -1.0
        ghost_r[1] *= -1.0
    return np.concatenate([ghost_l, U, ghost_r], axis=1)


def _rusanov_flux(UL: np.ndarray, UR: np.ndarray, spec: GasSpec) -> np.ndarray:
    a = _interface_speed(UL, UR, spec)
    return 0.5 * (flux_fields(UL, spec) + flux_fields(UR, spec)) - 0.5 * a * (UR - UL)


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.where(np.abs(a) < np.abs(b), a, b)
    return np.where(a * b <= 0.0, 0.0, out)


def _divergence(U: np.ndarray, g: Grid1D, spec: GasSpec, scheme: str,
                limiter: str) -> tuple[np.ndarray, int]:
    """-d/dx of the numerical flux, plus the count of limited slopes."""
    clipped = 0
    if scheme == "rusanov":
        Up = _pad(U, g.boundary, 1)
        UL = Up[:, :-1]
        UR = Up[:, 1:]
        F = _rusanov_flux(UL, UR, spec)
    else:
        Up = _pad(U, g.boundary, 2)
        fwd = Up[:, 2:] - Up[:, 1:-1]
        bwd = Up[:, 1:-1] - Up[:, :-2]
        if limiter == "minmod":
            slope = _minmod(bwd, fwd)
            clipped = int(np.count_nonzero((bwd * fwd <= 0.0) & ((bwd != 0.0) | (fwd != 0.0))))
        else:
            slope = 0.5 * (bwd + fwd)
        left_face = Up[:, 1:-1] + 0.5 * slope    # right edge of each cell
        right_face = Up[:, 1:-1] - 0.5 * slope   # left edge of each cell
        UL = left_face[:, :-1]
        UR = right_face[:, 1:]
        F = _rusanov_flux(UL, UR, spec)
    return -(F[:, 1:] - F[:, :-1]) / g.dx, clipped


def _project_admissible(U: np.ndarray, spec: GasSpec) -> int:
    """Pull Pi back inside the window at fixed rho, v, eps; return count."""
    w = primitive_fields(U, spec)
    p, Pi = w["p"], w["Pi"]
    lower = -p
    upper = (spec.D - 3.0) / 3.0 * p
    bad_low = Pi <= lower
    bad_high = Pi >= upper
    count = int(np.count_nonzero(bad_low) + np.count_nonzero(bad_high))
    if count:
        Pi = np.where(bad_low, PROJECTION_PULLBACK * lower, Pi)
        Pi = np.where(bad_high, PROJECTION_PULLBACK * upper, Pi)
        U[4] = w["rho"] * w["v2"] + 3.0 * (p + Pi)
    return count


def hyperbolic_step(g: Grid1D, dt: float, spec: GasSpec, scheme: str = "rusanov",
                    limiter: str = "minmod") -> tuple[Grid1D, int, int]:
    """One conservative transport step.

    Rusanov is a forward-Euler monotone update; MUSCL reconstructs limited
    slopes and uses two-stage SSP time integration.  Returns the new grid,
    the number of admissibility projections and the number of limited
    slopes (nonsmoothness indicator).
    """
    if scheme == "rusanov":
        rhs, clipped = _divergence(g.U, g, spec, scheme, limiter)
        U_new = g.U + dt * rhs
    else:
        rhs1, c1 = _divergence(g.U, g, spec, scheme, limiter)
        U_stage = g.U + dt * rhs1
        rhs2, c2 = _divergence(U_stage, g, spec, scheme, limiter)
        U_new = 0.5 * (g.U + U_stage + dt * rhs2)
        clipped = max(c1, c2)
    projections = _project_admissible(U_new, spec)
    return g.with_data(U_new), projections, clipped


def relaxation_step_exact(g: Grid1D, dt: float, spec: GasSpec) -> Grid1D:
    """Exact solution of the homogeneous relaxation subproblem.

    Holding F, F_i, G_ll (hence rho, v, eps, p) fixed:
    Pi <- Pi * exp(-dt/tau) and F_ll is rebuilt as rho v^2 + 3 (p + Pi).
    Admissibility can only improve since |Pi| shrinks toward 0.
    """
    w = primitive_fields(g.U, spec)
    decay = math.exp(-dt / spec.tau)
    U_new = g.U.copy()
    U_new[4] = w["rho"] * w["v2"] + 3.0 * (w["p"] + w["Pi"] * decay)
    return g.with_data(U_new)


# ---------------------------------------------------------------------------
# time marching
# ---------------------------------------------------------------------------

def _record_diag(ts: TimeSeries, t: float, U: np.ndarray, dx: float,
                 spec: GasSpec, projections: int):
    w = primitive_fields(U, spec)
    h, _ = entropy_density_fields(U, spec)
    ts.diag_t.append(t)
    ts.total_F.append(float(np.sum(U[0])) * dx)
    ts.total_Fx.append(float(np.sum(U[1])) * dx)
    ts.total_Gll.append(float(np.sum(U[5])) * dx)
    ts.total_Fll.append(float(np.sum(U[4])) * dx)
    ts.total_entropy.append(float(np.sum(h)) * dx)
    ts.max_abs_z.append(float(np.max(np.abs(w["Pi"] / w["p"]))))
    ts.projections.append(projections)


def _record_snapshot(ts: TimeSeries, t: float, U: np.ndarray, spec: GasSpec):
    w = primitive_fields(U, spec)
    h, k = entropy_density_fields(U, spec)
    ts.snapshot_times.append(t)
    ts.snapshots.append({
        "rho": w["rho"].copy(),
        "vx": w["vx"].copy(),
        "T": w["T"].copy(),
        "p": w["p"].copy(),
        "Pi": w["Pi"].copy(),
        "Pi_over_p": (w["Pi"] / w["p"]).copy(),
        "h": h,
        "k": k,
    })


def run_scenario(sc: Scenario, initial: Grid1D | None = None) -> TimeSeries:
    """March a scenario to its end time and record diagnostics.

    Strang splitting: half relaxation, full hyperbolic step, half
    relaxation.  The time step honors the CFL bound and is clipped to land
    exactly on output-cadence times and on t_end.  A step that projects
    more than 1% of the cells aborts with a diagnostic dump.

    `initial` overrides the scenario's built-in initial condition.
    """
    spec = sc.spec
    g = initial_grid(sc) if initial is None else initial
    ts = TimeSeries(x=g.centers, dx=g.dx, periodic=(sc.boundary == "periodic"))
    t = 0.0
    total_proj = 0
    _record_diag(ts, t, g.U, g.dx, spec, total_proj)
    _record_snapshot(ts, t, g.U, spec)
    next_out = sc.output_cadence if sc.output_cadence > 0 else sc.t_end

    max_steps = 10_000_000
    for _ in range(max_steps):
        if t >= sc.t_end - 1e-14 * sc.t_end:
            break
        vmax = max_wave_speed(g.U, spec)
        dt = sc.cfl * g.dx / vmax
        dt = min(dt, sc.t_end - t, next_out - t if next_out > t else dt)
        g = relaxation_step_exact(g, 0.5 * dt, spec)
        g, projections, clipped = hyperbolic_step(g, dt, spec, sc.scheme, sc.limiter)
        g = relaxation_step_exact(g, 0.5 * dt, spec)
        t += dt
        total_proj += projections
        if projections > ABORT_PROJECTION_FRACTION * g.N:
            w = primitive_fields(g.U, spec)
            raise SolverError(
                f"admissibility projection hit {projections}/{g.N} cells at "
                f"t = {t:.6g}; max |Pi/p| = {np.max(np.abs(w['Pi'] / w['p'])):.3g}; "
                "the run is not trustworthy at this resolution/CFL"
            )
        if sc.scheme == "muscl" and g.N:
            ts.limiter_fraction = max(ts.limiter_fraction, clipped / (6.0 * g.N))
        _record_diag(ts, t, g.U, g.dx, spec, total_proj)
        if t >= next_out - 1e-14 * max(next_out, 1.0):
            _record_snapshot(ts, t, g.U, spec)
            next_out = min(next_out + sc.output_cadence, sc.t_end) if sc.output_cadence > 0 else sc.t_end
            if next_out <= t:
                next_out = sc.t_end
    else:
        raise SolverError("step budget exhausted")
    if ts.snapshot_times[-1] < sc.t_end - 1e-12 * sc.t_end:
        _record_snapshot(ts, t, g.U, spec)
    return ts


# ---------------------------------------------------------------------------
# equilibrium (five-field) reference solver
# ---------------------------------------------------------------------------

def _euler_primitive(U: np.ndarray, spec: GasSpec) -> dict[str, np.ndarray]:
    rho = U[0]
    vx, vy, vz = U[1] / rho, U[2] / rho, U[3] / rho
    v2 = vx * vx + vy * vy + vz * vz
    rho_eps = 0.5 * (U[4] - rho * v2)
    if np.any(rho_eps <= 0):
        raise SolverError("non-positive internal energy in reference solver")
    p = 2.0 * rho_eps / spec.D
    return {"rho": rho, "vx": vx, "vy": vy, "vz": vz, "v2": v2, "p": p,
            "T": p / (spec.gas_constant * rho)}


def _euler_flux(U: np.ndarray, spec: GasSpec) -> np.ndarray:
    w = _euler_primitive(U, spec)
    out = np.empty_like(U)
    out[0] = U[1]
    out[1] = U[1] * w["vx"] + w["p"]
    out[2] = U[2] * w["vx"]
    out[3] = U[3] * w["vx"]
    out[4] = (U[4] + 2.0 * w["p"]) * w["vx"]
    return out


def _euler_speed(U: np.ndarray, spec: GasSpec) -> np.ndarray:
    w = _euler_primitive(U, spec)
    return np.abs(w["vx"]) + np.sqrt((spec.D + 2.0) / spec.D * w["p"] / w["rho"])


def euler_reference(sc: Scenario) -> TimeSeries:
    """Run the same scheme on the five-field equilibrium subsystem.

    The dynamic pressure is dropped entirely (lam_ll frozen at its
    equilibrium value); state rows are (F, F_x, F_y, F_z, G_ll).
    """
    spec = sc.spec
    g6 = initial_grid(sc)
    U = np.delete(g6.U, 4, axis=0)  # drop the F_ll row
    dx = g6.dx
    ts = TimeSeries(x=g6.centers, dx=dx, periodic=(sc.boundary == "periodic"))

    def record(t):
        w = _euler_primitive(U, spec)
        U6 = np.empty((6, U.shape[1]))
        U6[0:4] = U[0:4]
        U6[4] = w["rho"] * w["v2"] + 3.0 * w["p"]
        U6[5] = U[4]
        h, k = entropy_density_fields(U6, spec)
        ts.snapshot_times.append(t)
        ts.snapshots.append({
            "rho": w["rho"].copy(), "vx": w["vx"].copy(), "T": w["T"].copy(),
            "p": w["p"].copy(), "Pi": np.zeros_like(w["p"]),
            "Pi_over_p": np.zeros_like(w["p"]), "h": h, "k": k,
        })
        ts.diag_t.append(t)
        ts.total_F.append(float(np.sum(U[0])) * dx)
        ts.total_Fx.append(float(np.sum(U[1])) * dx)
        ts.total_Gll.append(float(np.sum(U[4])) * dx)
        ts.total_Fll.append(float(np.sum(U6[4])) * dx)
        ts.total_entropy.append(float(np.sum(h)) * dx)
        ts.max_abs_z.append(0.0)
        ts.projections.append(0)

    def divergence(U_in):
        clipped = 0
        if sc.scheme == "rusanov":
            Up = _pad(U_in, sc.boundary, 1)
            UL, UR = Up[:, :-1], Up[:, 1:]
        else:
            Up = _pad(U_in, sc.boundary, 2)
            fwd = Up[:, 2:] - Up[:, 1:-1]
            bwd = Up[:, 1:-1] - Up[:, :-2]
            slope = _minmod(bwd, fwd) if sc.limiter == "minmod" else 0.5 * (bwd + fwd)
            UL = (Up[:, 1:-1] + 0.5 * slope)[:, :-1]
            UR = (Up[:, 1:-1] - 0.5 * slope)[:, 1:]
        a = np.maximum(_euler_speed(UL, spec), _euler_speed(UR, spec))
        F = 0.5 * (_euler_flux(UL, spec) + _euler_flux(UR, spec)) - 0.5 * a * (UR - UL)
        return -(F[:, 1:] - F[:, :-1]) / dx, clipped

    record(0.0)
    t = 0.0
    next_out = sc.output_cadence if sc.output_cadence > 0 else sc.t_end
    for _ in range(10_000_000):
        if t >= sc.t_end - 1e-14 * sc.t_end:
            break
        # match the six-field step-size logic: |v| + 1.1 c
        w = _euler_primitive(U, spec)
        vmax = float(np.max(np.abs(w["vx"]) + WAVE_SPEED_SAFETY
                            * np.sqrt((spec.D + 2.0) / spec.D * w["p"] / w["rho"])))
        dt = sc.cfl * dx / vmax
        dt = min(dt, sc.t_end - t, next_out - t if next_out > t else dt)
        if sc.scheme == "rusanov":
            rhs, _ = divergence(U)
            U = U + dt * rhs
        else:
            rhs1, _ = divergence(U)
            U1 = U + dt * rhs1
            rhs2, _ = divergence(U1)
            U = 0.5 * (U + U1 + dt * rhs2)
        t += dt
        if t >= next_out - 1e-14 * max(next_out, 1.0):
            record(t)
            next_out = min(next_out + sc.output_cadence, sc.t_end) if sc.output_cadence > 0 else sc.t_end
            if next_out <= t:
                next_out = sc.t_end
    if ts.snapshot_times[-1] < sc.t_end - 1e-12 * sc.t_end:
        record(t)
    return ts


# ---------------------------------------------------------------------------
# stiff-limit diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NsLimitReport:
    """Deviation of the computed Pi field from -nu dv/dx.

    Pointwise relative deviations are evaluated on the mask of cells whose
    target magnitude is at least mask_fraction of the field maximum (the
    relation is singular where dv/dx vanishes) and away from non-periodic
    boundaries.
    """

    max_rel_deviation: float
    l2_rel_deviation: float
    n_masked_cells: int
    mask_fraction: float
    reduced_confidence: bool
    x: np.ndarray
    pi: np.ndarray
    target: np.ndarray


def ns_limit_diagnostic(ts: TimeSeries, spec: GasSpec, snapshot: int = -1,
                        mask_fraction: float = 0.5, boundary_margin: int = 8,
                        limiter_activity_threshold: float = 0.03) -> NsLimitReport:
    """Compare the recorded Pi with the first-order relaxation limit.

    The target is -nu dv/dx with nu = (2/3)((D-3)/D) p tau evaluated with
    the local pressure, dv/dx by central differences on the snapshot grid.
    """
    snap = ts.snapshots[snapshot]
    vx = snap["vx"]
    p = snap["p"]
    pi = snap["Pi"]
    dx = ts.dx
    if ts.periodic:
        dvdx = (np.roll(vx, -1) - np.roll(vx, 1)) / (2.0 * dx)
        interior = np.ones_like(vx, dtype=bool)
    else:
        dvdx = np.gradient(vx, dx)
        interior = np.zeros_like(vx, dtype=bool)
        interior[boundary_margin:-boundary_margin] = True
    target = -bulk_viscosity(p, spec) * dvdx
    scale = float(np.max(np.abs(target[interior])))
    if scale == 0.0:
        raise SolverError("no velocity gradient in the snapshot; nothing to compare")
    mask = interior & (np.abs(target) >= mask_fraction * scale)
    dev = np.abs(pi - target)[mask] / np.abs(target)[mask]
    resid = (pi - target)[mask]
    l2 = float(np.sqrt(np.sum(resid**2) / np.sum(target[mask] ** 2)))
    return NsLimitReport(
        max_rel_deviation=float(np.max(dev)),
        l2_rel_deviation=l2,
        n_masked_cells=int(np.count_nonzero(mask)),
        mask_fraction=mask_fraction,
        reduced_confidence=ts.limiter_fraction > limiter_activity_threshold,
        x=ts.x.copy(),
        pi=pi.copy(),
        target=target,
    )
