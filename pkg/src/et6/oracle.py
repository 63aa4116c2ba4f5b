"""Independent kinetic verification of the closed-form moment relations.

Every constraint moment, flux entry and entropy value produced by the
closure has a definition as an integral of the distribution function over
peculiar velocity C in R^3 and internal energy I in [0, inf) with measure
I**alpha dI.  This module evaluates those integrals numerically and never
touches the closed-form flux expressions; the only shared ingredient is the
multiplier inversion (xi, zeta, Omega).

The distribution is separable, so tensor-product Gauss rules apply factor by
factor: Gauss-Hermite in each velocity axis (nodes scaled by 1/sqrt(2 xi))
and generalized Gauss-Laguerre in I (weight I^alpha e^-I, nodes scaled by
1/zeta).  The Laguerre weight absorbs I**alpha exactly, which keeps the
integrable singularity at I = 0 harmless for 3 < D < 5.  Monomial weights of
the degrees used here are then integrated exactly up to roundoff.  A slower
adaptive rule provides an independent fallback; on disagreement the Laguerre
order is doubled before the check is declared failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import roots_genlaguerre, roots_hermitenorm

from .closure import Multipliers, entropy_parts, multipliers_from_state
from .gas import GasSpec, State6, eos_evaluate

REL_ERR_FLOOR = 1e-300


class OracleError(RuntimeError):
    """Quadrature failed to converge or to validate."""


class OracleVerificationError(OracleError):
    """Closed form and quadrature disagree beyond tolerance.

    Carries the offending reports in .failures and the full table in
    .reports.
    """

    def __init__(self, failures, reports):
        lines = ", ".join(f"{r.quantity} (rel_err={r.rel_err:.3e})" for r in failures)
        super().__init__(f"verification failure: {lines}")
        self.failures = failures
        self.reports = reports


@dataclass(frozen=True)
class QuadratureSpec:
    """Orders and tolerances of the verification quadrature."""

    hermite_order: int = 64
    laguerre_order: int = 128
    adaptive_tol: float = 1e-10
    flux_tol: float = 1e-8
    max_laguerre_order: int = 1024
    validate: bool = False   # cross-check every value against the adaptive rule

    def __post_init__(self):
        if self.hermite_order < 8 or self.laguerre_order < 8:
            raise ValueError("quadrature orders must be >= 8")
        if not self.adaptive_tol > 0:
            raise ValueError("adaptive tolerance must be positive")

    def scaled(self, factor: int) -> "QuadratureSpec":
        """Reduced-order copy for quick runs (orders floored at 8)."""
        return replace(
            self,
            hermite_order=max(8, self.hermite_order // factor),
            laguerre_order=max(8, self.laguerre_order // factor),
        )


@dataclass(frozen=True)
class OracleReport:
    """One verified quantity: closed form vs quadrature."""

    quantity: str
    closed_form: float
    quadrature: float
    rel_err: float
    rule: str


def rel_err(a: float, b: float, floor: float = REL_ERR_FLOOR) -> float:
    """|a - b| / max(|a|, |b|, floor).

    The floor carries the scale of the quantity family so that entries whose
    exact value is zero (odd moments, rest-frame fluxes) are judged against
    the size of their nonzero siblings instead of against themselves.
    """
    return abs(a - b) / max(abs(a), abs(b), floor)


@dataclass(frozen=True)
class MomentWeight:
    """Monomial weight coeff * Cx^ax Cy^ay Cz^az (C^2)^a2 I^ai."""

    ax: int = 0
    ay: int = 0
    az: int = 0
    a2: int = 0
    ai: int = 0
    coeff: float = 1.0

    @property
    def velocity_degree(self) -> int:
        return self.ax + self.ay + self.az + 2 * self.a2


# polynomial in (Cx, Cy, Cz, I): dict mapping exponent tuples to coefficients
Poly = dict[tuple[int, int, int, int], float]


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _poly_c(axis: int, v: np.ndarray) -> Poly:
    """c_axis = C_axis + v_axis as a polynomial."""
    e = [0, 0, 0, 0]
    e[axis] = 1
    out: Poly = {tuple(e): 1.0}
    if v[axis] != 0.0:
        out[(0, 0, 0, 0)] = float(v[axis])
    return out


def _poly_to_weights(p: Poly) -> list[MomentWeight]:
    return [
        MomentWeight(ax=e[0], ay=e[1], az=e[2], ai=e[3], coeff=c)
        for e, c in sorted(p.items())
        if c != 0.0
    ]


def _expand_c2(w: MomentWeight) -> list[tuple[float, int, int, int, int]]:
    """Expand (C^2)^a2 into axis monomials via the multinomial theorem."""
    if w.a2 == 0:
        return [(w.coeff, w.ax, w.ay, w.az, w.ai)]
    terms = []
    n = w.a2
    for i in range(n + 1):
        for j in range(n - i + 1):
            k = n - i - j
            mult = math.factorial(n) // (
                math.factorial(i) * math.factorial(j) * math.factorial(k)
            )
            terms.append((w.coeff * mult, w.ax + 2 * i, w.ay + 2 * j, w.az + 2 * k, w.ai))
    return terms


@lru_cache(maxsize=32)
def _hermite_rule(order: int):
    return roots_hermitenorm(order)


@lru_cache(maxsize=64)
def _laguerre_rule(order: int, alpha: float):
    return roots_genlaguerre(order, alpha)


class _GaussFactors:
    """Cached 1-D integrals against the state's (xi, zeta).

    H(a) = int C^a exp(-xi C^2) dC over R, nodes x_i / sqrt(2 xi)
    L(j) = int I^(alpha+j) exp(-zeta I) dI over [0, inf), nodes y_i / zeta
    """

    def __init__(self, mul: Multipliers, alpha: float, quad: QuadratureSpec):
        self.mul = mul
        self.alpha = alpha
        self.quad = quad
        x, wx = _hermite_rule(quad.hermite_order)
        scale = 1.0 / math.sqrt(2.0 * mul.xi)
        self._c_nodes = x * scale
        self._c_weights = wx * scale
        y, wy = _laguerre_rule(quad.laguerre_order, alpha)
        self._i_nodes = y / mul.zeta
        self._i_weights = wy * mul.zeta ** (-(alpha + 1.0))

    def hermite(self, a: int) -> float:
        return float(np.dot(self._c_weights, self._c_nodes**a))

    def laguerre(self, j: int) -> float:
        return float(np.dot(self._i_weights, self._i_nodes**j))

    def hermite_adaptive(self, a: int, tol: float) -> float:
        xi = self.mul.xi
        val, _ = integrate.quad(
            lambda c: c**a * math.exp(-xi * c * c), -np.inf, np.inf, epsabs=tol, epsrel=tol
        )
        return val

    def laguerre_adaptive(self, j: int, tol: float) -> float:
        zeta, alpha = self.mul.zeta, self.alpha
        # split at I = 1/zeta: algebraic endpoint weight on the inner part
        # (alpha may be negative), plain decaying tail outside
        cut = 1.0 / zeta
        inner, _ = integrate.quad(
            lambda i_val: i_val**j * math.exp(-zeta * i_val),
            0.0,
            cut,
            weight="alg",
            wvar=(alpha, 0.0),
            epsabs=tol,
            epsrel=tol,
        )
        outer, _ = integrate.quad(
            lambda i_val: i_val ** (alpha + j) * math.exp(-zeta * i_val),
            cut,
            np.inf,
            epsabs=tol,
            epsrel=tol,
        )
        return inner + outer

    def rule_name(self) -> str:
        return f"gh{self.quad.hermite_order}xgl{self.quad.laguerre_order}"


def _weight_integral(factors: _GaussFactors, weights, adaptive: bool = False) -> float:
    """Integral of f times a monomial weight, without the leading mass factor."""
    if isinstance(weights, MomentWeight):
        weights = [weights]
    total = 0.0
    tol = factors.quad.adaptive_tol
    for w in weights:
        for coeff, ax, ay, az, ai in _expand_c2(w):
            if adaptive:
                hx = factors.hermite_adaptive(ax, tol)
                hy = factors.hermite_adaptive(ay, tol)
                hz = factors.hermite_adaptive(az, tol)
                li = factors.laguerre_adaptive(ai, tol)
            else:
                hx = factors.hermite(ax)
                hy = factors.hermite(ay)
                hz = factors.hermite(az)
                li = factors.laguerre(ai)
            total += coeff * hx * hy * hz * li
    return factors.mul.omega * total


def _validated_integral(factors: _GaussFactors, weights, quad: QuadratureSpec,
                        spec: GasSpec) -> tuple[float, _GaussFactors]:
    """Gauss value, escalating the Laguerre order if the fallback disagrees."""
    value = _weight_integral(factors, weights)
    if not quad.validate:
        return value, factors
    reference = _weight_integral(factors, weights, adaptive=True)
    current = quad
    scale = max(abs(value), abs(reference), 1.0)
    while abs(value - reference) > quad.adaptive_tol * scale:
        if current.laguerre_order >= quad.max_laguerre_order:
            raise OracleError(
                f"quadrature non-convergence: gauss {value!r} vs adaptive "
                f"{reference!r} at laguerre order {current.laguerre_order}"
            )
        current = replace(current, laguerre_order=2 * current.laguerre_order)
        factors = _GaussFactors(factors.mul, spec.alpha, current)
        value = _weight_integral(factors, weights)
    return value, factors


def oracle_moment(s: State6, weight, spec: GasSpec, quad: QuadratureSpec | None = None) -> float:
    """Numeric moment int int m f w(C, I) I^alpha dI dC.

    `weight` is a MomentWeight (or an iterable of them, summed).  Raises
    OracleError when the adaptive fallback cannot be reconciled with the
    Gauss rule (only checked when quad.validate is set).
    """
    quad = quad or QuadratureSpec()
    ws = [weight] if isinstance(weight, MomentWeight) else list(weight)
    for w in ws:
        if w.velocity_degree > 6:
            raise ValueError(f"velocity degree {w.velocity_degree} exceeds 6")
    mul = multipliers_from_state(s, spec)
    factors = _GaussFactors(mul, spec.alpha, quad)
    value, _ = _validated_integral(factors, ws, quad, spec)
    return spec.m * value


def _shifted_weight_sets(s: State6, spec: GasSpec) -> list[tuple[str, float, list[MomentWeight]]]:
    """(name, closed value, weight terms) for every flux entry.

    Closed values come from the analytic flux expressions evaluated through
    the public closure API in the caller; here only names and weights.
    """
    v = s.v
    sets = []
    c = [_poly_c(axis, v) for axis in range(3)]
    c2: Poly = {}
    for axis in range(3):
        for e, coeff in _poly_mul(c[axis], c[axis]).items():
            c2[e] = c2.get(e, 0.0) + coeff
    labels = "xyz"
    for i in range(3):
        for k in range(i, 3):
            sets.append((f"F_{labels[i]}{labels[k]}", _poly_to_weights(_poly_mul(c[i], c[k]))))
    c2_plus_int = dict(c2)
    key_i = (0, 0, 0, 1)
    c2_plus_int[key_i] = c2_plus_int.get(key_i, 0.0) + 2.0 / spec.m
    for k in range(3):
        sets.append((f"F_ll{labels[k]}", _poly_to_weights(_poly_mul(c2, c[k]))))
    for k in range(3):
        sets.append((f"G_ll{labels[k]}", _poly_to_weights(_poly_mul(c2_plus_int, c[k]))))
    return sets


def oracle_flux_check(s: State6, spec: GasSpec, quad: QuadratureSpec | None = None,
                      raise_on_failure: bool = True) -> list[OracleReport]:
    """Compare every closed flux entry against quadrature.

    Twelve entries: the six independent components of F_ik, and the three
    components each of F_llk and G_llk.  Raises OracleVerificationError when
    any relative error exceeds quad.flux_tol (unless raise_on_failure is
    cleared, in which case the reports are returned for inspection).
    """
    from .closure import closed_fluxes

    quad = quad or QuadratureSpec()
    fl = closed_fluxes(s, spec)
    closed = {}
    labels = "xyz"
    for i in range(3):
        for k in range(i, 3):
            closed[f"F_{labels[i]}{labels[k]}"] = fl.F_ik[i, k]
    for k in range(3):
        closed[f"F_ll{labels[k]}"] = fl.F_llk[k]
        closed[f"G_ll{labels[k]}"] = fl.G_llk[k]

    mul = multipliers_from_state(s, spec)
    factors = _GaussFactors(mul, spec.alpha, quad)
    family_scale = max(abs(v) for v in closed.values())
    reports = []
    for name, weights in _shifted_weight_sets(s, spec):
        value, factors = _validated_integral(factors, weights, quad, spec)
        value *= spec.m
        reports.append(
            OracleReport(
                quantity=name,
                closed_form=closed[name],
                quadrature=value,
                rel_err=rel_err(closed[name], value, floor=family_scale),
                rule=factors.rule_name(),
            )
        )
    failures = [r for r in reports if r.rel_err > quad.flux_tol]
    if failures and raise_on_failure:
        raise OracleVerificationError(failures, reports)
    return reports


def oracle_constraint_check(s: State6, spec: GasSpec,
                            quad: QuadratureSpec | None = None) -> list[OracleReport]:
    """Verify the six constraint moments (F, F_i, F_ll, G_ll) by quadrature."""
    quad = quad or QuadratureSpec()
    p, eps = eos_evaluate(s.rho, s.T, spec)
    v = s.v
    v2 = float(np.dot(v, v))
    mul = multipliers_from_state(s, spec)
    factors = _GaussFactors(mul, spec.alpha, quad)
    c = [_poly_c(axis, v) for axis in range(3)]
    c2: Poly = {}
    for axis in range(3):
        for e, coeff in _poly_mul(c[axis], c[axis]).items():
            c2[e] = c2.get(e, 0.0) + coeff
    c2_plus_int = dict(c2)
    c2_plus_int[(0, 0, 0, 1)] = c2_plus_int.get((0, 0, 0, 1), 0.0) + 2.0 / spec.m

    targets = [
        ("F", s.rho, [MomentWeight()]),
        ("F_x", s.rho * v[0], _poly_to_weights(c[0])),
        ("F_y", s.rho * v[1], _poly_to_weights(c[1])),
        ("F_z", s.rho * v[2], _poly_to_weights(c[2])),
        ("F_ll", s.rho * v2 + 3.0 * (p + s.Pi), _poly_to_weights(c2)),
        ("G_ll", s.rho * v2 + 2.0 * s.rho * eps, _poly_to_weights(c2_plus_int)),
    ]
    family_scale = max(abs(t[1]) for t in targets)
    reports = []
    for name, closed, weights in targets:
        value, factors = _validated_integral(factors, weights, quad, spec)
        value *= spec.m
        reports.append(
            OracleReport(
                quantity=name,
                closed_form=closed,
                quadrature=value,
                rel_err=rel_err(closed, value, floor=family_scale),
                rule=factors.rule_name(),
            )
        )
    return reports


def oracle_entropy(s: State6, spec: GasSpec, quad: QuadratureSpec | None = None) -> float:
    """Entropy density -kB int int f ln f I^alpha dI dC by quadrature.

    ln f is expanded as ln(Omega) - zeta I - xi C^2, which turns the
    integrand into the same polynomial-weighted family as the moments (no
    logarithms near the underflow region).
    """
    quad = quad or QuadratureSpec()
    mul = multipliers_from_state(s, spec)
    factors = _GaussFactors(mul, spec.alpha, quad)
    number, factors = _validated_integral(factors, MomentWeight(), quad, spec)
    int_i, factors = _validated_integral(factors, MomentWeight(ai=1), quad, spec)
    int_c2, factors = _validated_integral(factors, MomentWeight(a2=1), quad, spec)
    return -spec.kB * (mul.log_omega * number - mul.zeta * int_i - mul.xi * int_c2)


@dataclass(frozen=True)
class ProbePoint:
    """One trial amplitude of the optimality probe."""

    beta: float
    converged: bool
    entropy: float
    xi: float
    zeta: float
    log_omega: float


@dataclass(frozen=True)
class ProbeReport:
    """Entropy along the trial family f ~ exp(-zeta I - xi C^2 - beta C^4).

    The closure is optimal iff entropy(beta) <= entropy(0) with equality
    only at beta = 0.  Non-converged points are reported, not fatal.
    """

    points: list[ProbePoint] = field(default_factory=list)
    reference_entropy: float = 0.0

    @property
    def optimal(self) -> bool:
        converged = [p for p in self.points if p.converged]
        return all(
            p.entropy <= self.reference_entropy + 1e-12 * abs(self.reference_entropy)
            for p in converged
        )

    @property
    def inconclusive(self) -> bool:
        return any(not p.converged for p in self.points)


def _radial_moments(xi: float, beta: float, tol: float) -> tuple[float, float, float]:
    """M_k = int_R3 (C^2)^k exp(-xi C^2 - beta C^4) dC for k = 0, 1, 2.

    Reduced to radial integrals 4 pi int r^(2k+2) exp(-xi r^2 - beta r^4) dr.
    For beta > 0 the integral exists for any real xi; negative xi arises when
    the quartic suppression must be compensated to meet the trace constraint.
    """
    out = []
    for k in range(3):
        val, _ = integrate.quad(
            lambda r: r ** (2 * k + 2) * math.exp(-xi * r * r - beta * r**4),
            0.0,
            np.inf,
            epsabs=tol,
            epsrel=tol,
        )
        out.append(4.0 * math.pi * val)
    return out[0], out[1], out[2]


def _solve_trial_xi(target_ratio: float, beta: float, xi0: float, tol: float) -> tuple[float, bool]:
    """Solve M1(xi)/M0(xi) = target_ratio for xi.

    The ratio is strictly decreasing in xi, so a sign-change bracket is
    expanded first (downward past zero when beta > 0) and a damped Newton
    iteration with bisection fallback runs inside it.
    """

    def resid(xi: float) -> float:
        m0, m1, _ = _radial_moments(xi, beta, tol)
        return m1 / m0 - target_ratio

    scale = max(abs(xi0), 1e-3)
    lo = hi = xi0
    r0 = resid(xi0)
    if r0 == 0.0:
        return xi0, True
    if r0 > 0.0:
        # ratio too large: xi must increase
        step = scale
        for _ in range(200):
            hi = lo + step
            if resid(hi) < 0.0:
                break
            lo, step = hi, 2.0 * step
        else:
            return xi0, False
    else:
        # ratio too small: xi must decrease (below zero only if beta > 0)
        step = scale
        for _ in range(200):
            hi = lo
            lo = lo - step
            if beta == 0.0 and lo <= 0.0:
                lo = 0.5 * (lo + step)  # halve toward zero instead
                step *= 0.5
                if step < 1e-12 * scale:
                    return xi0, False
                continue
            if resid(lo) > 0.0:
                break
            step *= 2.0
        else:
            return xi0, False

    xi = 0.5 * (lo + hi)
    for _ in range(100):
        r = resid(xi)
        if abs(r) <= 1e-10 * target_ratio:
            return xi, True
        if r > 0.0:
            lo = xi
        else:
            hi = xi
        h = 1e-6 * max(abs(xi), 1e-6)
        deriv = (resid(xi + h) - r) / h
        if deriv != 0.0:
            candidate = xi - r / deriv
        else:
            candidate = 0.5 * (lo + hi)
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)  # damped: fall back to bisection
        if candidate == xi:
            return xi, True
        xi = candidate
    return xi, False


def mep_optimality_probe(s: State6, spec: GasSpec, trial_amplitudes=(0.001, 0.01, 0.05),
                         quad: QuadratureSpec | None = None) -> ProbeReport:
    """Probe entropy optimality against a quartic-perturbed trial family.

    For each beta >= 0 the three constraint equations (rho, trace pressure,
    energy) are re-solved for (Omega', xi', zeta') by a damped Newton
    iteration on xi' using quadrature moments, and the trial entropy is
    compared with the closure entropy.  beta = 0 must recover the closure.
    """
    quad = quad or QuadratureSpec()
    tol = min(quad.adaptive_tol, 1e-12)
    p, eps = eos_evaluate(s.rho, s.T, spec)
    ppi = p + s.Pi
    alpha = spec.alpha
    mul = multipliers_from_state(s, spec)
    # zeta decouples from beta: fixed by the internal-energy split
    zeta_trial = (alpha + 1.0) / (spec.m * (eps - 1.5 * ppi / s.rho))
    target_ratio = 3.0 * ppi / s.rho

    # Laguerre factors for the internal-energy part
    y, wy = _laguerre_rule(quad.laguerre_order, alpha)
    l0 = float(np.dot(wy, np.ones_like(y))) * zeta_trial ** (-(alpha + 1.0))
    l1 = float(np.dot(wy, y / zeta_trial)) * zeta_trial ** (-(alpha + 1.0))

    points = []
    for beta in trial_amplitudes:
        beta = float(beta)
        if beta < 0:
            raise ValueError("trial amplitude beta must be nonnegative")
        xi_trial, converged = _solve_trial_xi(target_ratio, beta, mul.xi, tol)
        m0, m1, m2 = _radial_moments(xi_trial, beta, tol)
        omega_trial = s.rho / (spec.m * m0 * l0)
        log_omega_trial = math.log(omega_trial)
        number = s.rho / spec.m
        mean_i = omega_trial * m0 * l1
        mean_c2 = omega_trial * m1 * l0
        mean_c4 = omega_trial * m2 * l0
        h_trial = -spec.kB * (
            log_omega_trial * number
            - zeta_trial * mean_i
            - xi_trial * mean_c2
            - beta * mean_c4
        )
        points.append(
            ProbePoint(
                beta=beta,
                converged=converged,
                entropy=h_trial,
                xi=xi_trial,
                zeta=zeta_trial,
                log_omega=log_omega_trial,
            )
        )
    return ProbeReport(points=points, reference_entropy=entropy_parts(s, spec).h)
