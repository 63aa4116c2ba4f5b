"""Gas model: equations of state, primitive/conserved conversions, admissibility.

The six fields are mass density rho, velocity v (3 components), kinetic
temperature T and the dynamic pressure Pi (the trace part of the viscous
stress, the single dissipative field of the six-field model).  The dynamic
pressure is only meaningful inside an open window around equilibrium,

    -p < Pi < (D - 3) * p / 3,       p = (kB/m) * rho * T,

outside of which the underlying phase-space density ceases to be integrable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

D_MIN = 3.0 + 1e-6


class GasModelError(ValueError):
    """Base error for gas-model domain violations."""


class InadmissibleStateError(GasModelError):
    """Dynamic pressure outside the admissibility window.

    Attributes
    ----------
    bound : str
        Which bound was violated, "lower" (Pi <= -p) or "upper"
        (Pi >= (D-3) p / 3).
    margin : float
        Signed distance of Pi/p to the violated bound (negative when
        violated).
    """

    def __init__(self, message: str, bound: str, margin: float):
        super().__init__(message)
        self.bound = bound
        self.margin = margin


class ReconstructionError(GasModelError):
    """Conserved state cannot be inverted to a physical primitive state."""


@dataclass(frozen=True)
class GasSpec:
    """Molecular parameters of the gas.

    D is the effective number of degrees of freedom fixing the caloric
    equation of state eps = (D/2)(kB/m) T.  It is a real parameter strictly
    above 3 so that the monatomic limit D -> 3+ can be probed.  tau is the
    relaxation time of the BGK production term.
    """

    D: float = 5.0
    m: float = 1.0
    kB: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if not self.D >= D_MIN:
            raise GasModelError(f"degrees of freedom D must be >= {D_MIN}, got {self.D}")
        if not self.m > 0:
            raise GasModelError(f"molecular mass m must be positive, got {self.m}")
        if not self.kB > 0:
            raise GasModelError(f"Boltzmann constant kB must be positive, got {self.kB}")
        if not self.tau > 0:
            raise GasModelError(f"relaxation time tau must be positive, got {self.tau}")

    @property
    def alpha(self) -> float:
        """Exponent weighting the internal-energy measure I**alpha dI."""
        return 0.5 * (self.D - 5.0)

    @property
    def gas_constant(self) -> float:
        """kB / m."""
        return self.kB / self.m

    @property
    def z_upper(self) -> float:
        """Upper admissibility bound on Z = Pi/p (the lower bound is -1)."""
        return (self.D - 3.0) / 3.0


def _as_vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape == ():
        arr = np.array([float(arr), 0.0, 0.0])
    if arr.shape != (3,):
        raise GasModelError(f"velocity must have 3 components, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class State6:
    """Primitive nonequilibrium state at a point: (rho, v, T, Pi)."""

    rho: float
    v: np.ndarray
    T: float
    Pi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v", _as_vec3(self.v))
        if not self.rho > 0:
            raise GasModelError(f"density must be positive, got {self.rho}")
        if not self.T > 0:
            raise GasModelError(f"temperature must be positive, got {self.T}")

    def pressure(self, spec: GasSpec) -> float:
        return spec.gas_constant * self.rho * self.T

    def z_ratio(self, spec: GasSpec) -> float:
        """Z = Pi / p, the normalized dynamic pressure."""
        return self.Pi / self.pressure(spec)


@dataclass(frozen=True)
class Conserved6:
    """Densities evolved by the balance laws.

    F is the mass density, F_i the momentum density, F_ll the trace of the
    momentum flux (rho v^2 + 3(p + Pi)) and G_ll the energy moment
    (rho v^2 + 2 rho eps).
    """

    F: float
    F_i: np.ndarray
    F_ll: float
    G_ll: float

    def __post_init__(self):
        object.__setattr__(self, "F_i", _as_vec3(self.F_i))
        if not self.F > 0:
            raise ReconstructionError(f"mass density F must be positive, got {self.F}")

    def as_array(self) -> np.ndarray:
        """Flat vector (F, F_x, F_y, F_z, F_ll, G_ll)."""
        return np.array([self.F, *self.F_i, self.F_ll, self.G_ll])

    @classmethod
    def from_array(cls, u) -> "Conserved6":
        u = np.asarray(u, dtype=float)
        return cls(F=u[0], F_i=u[1:4], F_ll=u[4], G_ll=u[5])


@dataclass(frozen=True)
class AdmissibilityReport:
    """Result of the window check, with signed margins to both bounds.

    margin_lower = Z + 1 and margin_upper = (D-3)/3 - Z, both strictly
    positive iff the state is admissible.
    """

    admissible: bool
    margin_lower: float
    margin_upper: float
    z: float = field(default=0.0)


def eos_evaluate(rho: float, T: float, spec: GasSpec) -> tuple[float, float]:
    """Thermal and caloric equations of state.

    Returns (p, eps) with p = (kB/m) rho T and eps = (D/2)(kB/m) T.
    """
    if not rho > 0:
        raise GasModelError(f"density must be positive, got {rho}")
    if not T > 0:
        raise GasModelError(f"temperature must be positive, got {T}")
    p = spec.gas_constant * rho * T
    eps = 0.5 * spec.D * spec.gas_constant * T
    return p, eps


def admissibility(s: State6, spec: GasSpec) -> AdmissibilityReport:
    """Check -1 < Pi/p < (D-3)/3 and report the signed margins."""
    z = s.z_ratio(spec)
    lower = z + 1.0
    upper = spec.z_upper - z
    return AdmissibilityReport(
        admissible=(lower > 0.0 and upper > 0.0),
        margin_lower=lower,
        margin_upper=upper,
        z=z,
    )


def require_admissible(s: State6, spec: GasSpec) -> AdmissibilityReport:
    """Raise InadmissibleStateError unless the state is inside the window."""
    rep = admissibility(s, spec)
    if not rep.admissible:
        if rep.margin_lower <= 0.0:
            raise InadmissibleStateError(
                f"Pi/p = {rep.z:.6g} violates the lower bound -1 "
                f"(margin {rep.margin_lower:.3g})",
                bound="lower",
                margin=rep.margin_lower,
            )
        raise InadmissibleStateError(
            f"Pi/p = {rep.z:.6g} violates the upper bound (D-3)/3 = "
            f"{spec.z_upper:.6g} (margin {rep.margin_upper:.3g})",
            bound="upper",
            margin=rep.margin_upper,
        )
    return rep


def conserved_from_primitive(s: State6, spec: GasSpec) -> Conserved6:
    """Map (rho, v, T, Pi) to the densities (F, F_i, F_ll, G_ll)."""
    p, eps = eos_evaluate(s.rho, s.T, spec)
    v2 = float(np.dot(s.v, s.v))
    return Conserved6(
        F=s.rho,
        F_i=s.rho * s.v,
        F_ll=s.rho * v2 + 3.0 * (p + s.Pi),
        G_ll=s.rho * v2 + 2.0 * s.rho * eps,
    )


def primitive_from_conserved(u: Conserved6, spec: GasSpec) -> State6:
    """Invert the moment map back to (rho, v, T, Pi).

    Raises ReconstructionError for non-positive density or internal energy,
    and InadmissibleStateError when the recovered Pi leaves the window.
    """
    rho = u.F
    if not rho > 0:
        raise ReconstructionError(f"non-positive density F = {rho}")
    v = u.F_i / rho
    v2 = float(np.dot(v, v))
    rho_eps = 0.5 * (u.G_ll - rho * v2)
    if not rho_eps > 0:
        raise ReconstructionError(f"non-positive internal energy rho*eps = {rho_eps}")
    eps = rho_eps / rho
    T = 2.0 * eps * spec.m / (spec.D * spec.kB)
    p = 2.0 * rho_eps / spec.D
    Pi = (u.F_ll - rho * v2) / 3.0 - p
    s = State6(rho=rho, v=v, T=T, Pi=Pi)
    require_admissible(s, spec)
    return s
