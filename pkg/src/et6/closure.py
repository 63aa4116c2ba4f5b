"""Non-linear six-field moment closure.

Maximizing the kinetic entropy subject to the six prescribed moments gives a
phase-space density of the separable form

    f(C, I) = Omega * exp(-zeta * I) * exp(-xi * C^2),

with C the peculiar velocity and I the internal-mode energy weighted by the
measure I**alpha dI.  The three parameters (xi, zeta, Omega) are in closed
one-to-one correspondence with (rho, p + Pi, rho*eps) on the admissibility
window; this module implements that inversion, the resulting closed fluxes,
the BGK production, the entropy decomposition and the Lagrange multipliers
(the main field that symmetrizes the balance laws).

No near-equilibrium expansion is involved anywhere: formulas are exact on
the whole window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gas import GasSpec, State6, eos_evaluate, require_admissible

# Guard against exp overflow when Pi approaches the window boundary.
LOG_OMEGA_GUARD = 500.0


@dataclass(frozen=True)
class Multipliers:
    """Parameters (xi, zeta, Omega) of the closed distribution function.

    All three are strictly positive on admissible states (integrability).
    log_omega is kept alongside Omega: entropy and main-field formulas need
    ln(Omega) and boundary states are handled in log space.
    """

    xi: float
    zeta: float
    omega: float
    log_omega: float


@dataclass(frozen=True)
class MainField:
    """Lagrange multipliers (lam, lam_i, lam_ll, mu_ll) of the moment problem.

    Ordered against the densities (F, F_i, F_ll, G_ll): the gradient of the
    entropy density with respect to the conserved variables equals exactly
    (lam, lam_i, lam_ll, mu_ll), which is what makes the system symmetric
    hyperbolic in these variables.
    """

    lam: float
    lam_i: np.ndarray
    lam_ll: float
    mu_ll: float

    def as_array(self) -> np.ndarray:
        return np.array([self.lam, *self.lam_i, self.lam_ll, self.mu_ll])


@dataclass(frozen=True)
class FluxSet:
    """Closed fluxes of the six balance laws plus the trace production."""

    F_ik: np.ndarray    # symmetric 3x3 momentum flux
    F_llk: np.ndarray   # flux of the momentum-flux trace
    G_llk: np.ndarray   # flux of the energy moment
    P_ll: float         # BGK production of F_ll


@dataclass(frozen=True)
class EntropyParts:
    """Entropy density h, its equilibrium part h_E, the specific
    nonequilibrium part k (h = h_E + rho*k) and the chemical potential g."""

    h: float
    h_E: float
    k: float
    g: float


def _log_omega(rho: float, p: float, z: float, spec: GasSpec) -> float:
    """ln(Omega) as an explicit function of (rho, p, Z=Pi/p).

    Evaluated fully in log space so that states close to the window
    boundaries only overflow once |ln Omega| passes the guard.
    """
    half_dm3 = 0.5 * (spec.D - 3.0)
    log_xi = math.log(rho) - math.log(2.0 * p) - math.log1p(z)
    log_zeta = math.log(rho) - math.log(spec.m * p) - math.log1p(-3.0 * z / (spec.D - 3.0))
    value = (
        math.log(rho)
        - math.log(spec.m)
        - 1.5 * math.log(math.pi)
        - math.lgamma(half_dm3)
        + 1.5 * log_xi
        + half_dm3 * log_zeta
    )
    if abs(value) > LOG_OMEGA_GUARD:
        raise OverflowError(
            f"|ln Omega| = {abs(value):.1f} exceeds the overflow guard "
            f"{LOG_OMEGA_GUARD}; state too close to the window boundary"
        )
    return value


def multipliers_from_state(s: State6, spec: GasSpec) -> Multipliers:
    """Invert the constraint moments for (xi, zeta, Omega).

    xi   = (rho / 2p) / (1 + Z)
    zeta = (rho / m p) / (1 - 3Z/(D-3))
    Omega = rho / (m pi^{3/2} Gamma((D-3)/2)) * xi^{3/2} * zeta^{(D-3)/2}

    with Z = Pi/p.  Positivity of all three is equivalent to admissibility;
    an inadmissible state raises naming the multiplier that would lose it.
    """
    p, _ = eos_evaluate(s.rho, s.T, spec)
    z = s.Pi / p
    if not 1.0 + z > 0.0:
        from .gas import InadmissibleStateError

        raise InadmissibleStateError(
            f"Pi/p = {z:.6g} <= -1: xi would lose positivity",
            bound="lower",
            margin=1.0 + z,
        )
    if not 1.0 - 3.0 * z / (spec.D - 3.0) > 0.0:
        from .gas import InadmissibleStateError

        raise InadmissibleStateError(
            f"Pi/p = {z:.6g} >= (D-3)/3 = {spec.z_upper:.6g}: "
            "zeta would lose positivity",
            bound="upper",
            margin=spec.z_upper - z,
        )
    xi = 0.5 * s.rho / p / (1.0 + z)
    zeta = s.rho / (spec.m * p) / (1.0 - 3.0 * z / (spec.D - 3.0))
    log_omega = _log_omega(s.rho, p, z, spec)
    return Multipliers(xi=xi, zeta=zeta, omega=math.exp(log_omega), log_omega=log_omega)


def state_from_multipliers(mul: Multipliers, spec: GasSpec) -> tuple[float, float, float]:
    """Closed-form zero-velocity moments of the distribution.

    Returns (rho, p + Pi, rho*eps).  Composed with multipliers_from_state
    this is the identity on admissible states.
    """
    alpha = spec.alpha
    log_rho = (
        math.log(spec.m)
        + 1.5 * math.log(math.pi)
        + math.lgamma(1.0 + alpha)
        + mul.log_omega
        - 1.5 * math.log(mul.xi)
        - (1.0 + alpha) * math.log(mul.zeta)
    )
    rho = math.exp(log_rho)
    p_plus_pi = 0.5 * rho / mul.xi
    rho_eps = 0.25 * rho / mul.xi * (3.0 + 4.0 / spec.m * (1.0 + alpha) * mul.xi / mul.zeta)
    return rho, p_plus_pi, rho_eps


def distribution_value(C, I: float, s: State6, spec: GasSpec) -> float:
    """Phase-space density f(C, I) of the closed distribution.

    C is the peculiar velocity (3 components), I >= 0 the internal energy.
    Strictly positive on admissible states; at Pi = 0 this is the
    generalized Maxwellian of the polyatomic equilibrium.
    """
    if I < 0:
        raise ValueError(f"internal energy must be nonnegative, got {I}")
    mul = multipliers_from_state(s, spec)
    c2 = float(np.dot(np.asarray(C, dtype=float), np.asarray(C, dtype=float)))
    return math.exp(mul.log_omega - mul.zeta * I - mul.xi * c2)


def equilibrium_distribution_value(C, I: float, rho: float, T: float, spec: GasSpec) -> float:
    """Generalized Maxwellian for a polyatomic gas in equilibrium.

    f_E = rho / (m (kB T)^{1+alpha} Gamma(1+alpha)) * (m / (2 pi kB T))^{3/2}
          * exp(-(m C^2/2 + I) / (kB T))

    Written independently of the nonequilibrium closure so the Pi -> 0
    reduction can be tested against it.
    """
    if I < 0:
        raise ValueError(f"internal energy must be nonnegative, got {I}")
    kT = spec.kB * T
    alpha = spec.alpha
    c2 = float(np.dot(np.asarray(C, dtype=float), np.asarray(C, dtype=float)))
    log_pref = (
        math.log(rho)
        - math.log(spec.m)
        - (1.0 + alpha) * math.log(kT)
        - math.lgamma(1.0 + alpha)
        + 1.5 * (math.log(spec.m) - math.log(2.0 * math.pi * kT))
    )
    return math.exp(log_pref - (0.5 * spec.m * c2 + I) / kT)


def closed_fluxes(s: State6, spec: GasSpec) -> FluxSet:
    """Closed fluxes of the six-field system.

    F_ik  = rho v_i v_k + (p + Pi) delta_ik
    F_llk = (5(p + Pi) + rho v^2) v_k
    G_llk = (rho v^2 + 2 rho eps + 2(p + Pi)) v_k

    The closure carries no shear stress and no heat flux.  The production
    value is delegated to production_bgk.
    """
    require_admissible(s, spec)
    p, eps = eos_evaluate(s.rho, s.T, spec)
    v = s.v
    v2 = float(np.dot(v, v))
    ppi = p + s.Pi
    F_ik = s.rho * np.outer(v, v) + ppi * np.eye(3)
    F_llk = (5.0 * ppi + s.rho * v2) * v
    G_llk = (s.rho * v2 + 2.0 * s.rho * eps + 2.0 * ppi) * v
    return FluxSet(F_ik=F_ik, F_llk=F_llk, G_llk=G_llk, P_ll=production_bgk(s, spec))


def production_bgk(s: State6, spec: GasSpec) -> float:
    """BGK production of the momentum-flux trace: P_ll = -3 Pi / tau."""
    return -3.0 * s.Pi / spec.tau


def entropy_parts(s: State6, spec: GasSpec) -> EntropyParts:
    """Entropy density and its equilibrium/nonequilibrium decomposition.

    h   = (kB/m) rho (D/2 - ln Omega)
    h_E = (kB/m) rho (D/2 - ln Omega_E)      (Omega at Pi = 0)
    k   = (kB/2m) ln[(1+Z)^3 (1 - 3Z/(D-3))^{D-3}]
    g/T = (kB/m) (1 + ln Omega_E)            (chemical potential)

    k(0) = 0 is the global maximum; h = h_E + rho*k identically.
    """
    require_admissible(s, spec)
    p, _ = eos_evaluate(s.rho, s.T, spec)
    z = s.Pi / p
    rgas = spec.gas_constant
    log_omega = _log_omega(s.rho, p, z, spec)
    log_omega_eq = _log_omega(s.rho, p, 0.0, spec)
    h = rgas * s.rho * (0.5 * spec.D - log_omega)
    h_eq = rgas * s.rho * (0.5 * spec.D - log_omega_eq)
    k = 0.5 * rgas * (3.0 * math.log1p(z) + (spec.D - 3.0) * math.log1p(-3.0 * z / (spec.D - 3.0)))
    g = s.T * rgas * (1.0 + log_omega_eq)
    return EntropyParts(h=h, h_E=h_eq, k=k, g=g)


def main_field(s: State6, spec: GasSpec) -> MainField:
    """Lagrange multipliers of the entropy maximization, as field variables.

    lam    = -g/T - (kB/m) ln(Omega/Omega_E) + v^2 / (2T (1+Z))
    lam_i  = -v_i / (T (1+Z))
    lam_ll = -(1/2T) (D/(D-3)) Z / ((1+Z)(1 - 3Z/(D-3)))
    mu_ll  =  (1/2T) / (1 - 3Z/(D-3))

    At Pi = 0 these reduce to the classical convex-extension values of the
    five-field gas dynamics with lam_ll = 0.
    """
    require_admissible(s, spec)
    p, _ = eos_evaluate(s.rho, s.T, spec)
    z = s.Pi / p
    parts = entropy_parts(s, spec)
    rgas = spec.gas_constant
    one_pz = 1.0 + z
    one_mz = 1.0 - 3.0 * z / (spec.D - 3.0)
    v2 = float(np.dot(s.v, s.v))
    # ln(Omega/Omega_E) = -(m/kB) k
    log_ratio = -parts.k / rgas
    lam = -parts.g / s.T - rgas * log_ratio + 0.5 * v2 / (s.T * one_pz)
    lam_i = -s.v / (s.T * one_pz)
    mu_ll = 0.5 / (s.T * one_mz)
    lam_ll = -0.5 / s.T * (spec.D / (spec.D - 3.0)) * z / (one_pz * one_mz)
    return MainField(lam=lam, lam_i=lam_i, lam_ll=lam_ll, mu_ll=mu_ll)


def boost_main_field(rest: MainField, v, _spec: GasSpec | None = None) -> MainField:
    """Galilean transformation of the multipliers from the rest frame.

    With hatted rest-frame components:
        lam    = lam^ - lam_i^ v_i + (lam_ll^ + mu_ll^) v^2
        lam_i  = lam_i^ - 2 (lam_ll^ + mu_ll^) v_i
        lam_ll = lam_ll^,   mu_ll = mu_ll^
    """
    v = np.asarray(v, dtype=float)
    coeff = rest.lam_ll + rest.mu_ll
    v2 = float(np.dot(v, v))
    return MainField(
        lam=rest.lam - float(np.dot(rest.lam_i, v)) + coeff * v2,
        lam_i=rest.lam_i - 2.0 * coeff * v,
        lam_ll=rest.lam_ll,
        mu_ll=rest.mu_ll,
    )
