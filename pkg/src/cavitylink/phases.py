"""Phase algebra of the waveguide network.

Everything a gate does in this machine is programmed through the phase
differences accumulated by light travelling between the cavities, the
quantum dot and the end mirrors.  This module maps those angles to the
effective detunings and coupling constants of the reduced cavity model,
provides the canonical settings tables for the gate steps, and a numeric
inverse that searches for angles realizing a requested parameter set.

Angles are kept unreduced (no mod-2pi canonicalization): the coupling
ratio ``chi`` is 4pi-periodic in its first two arguments, so comparisons
are made on its outputs, never on raw angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import NoSolutionFound, SingularPhase

#: Below this value of |sin(theta_P/2)| a cavity sits on resonance with a
#: standing-wave mode of the waveguide and the reduced model is invalid.
EPS_SING = 1e-6

#: Tolerance for forward-verifying an inverse-solver result.
TOL_INVERSE = 1e-9


def chi(x: float, y: float, z: float, eps_sing: float = EPS_SING) -> float:
    """Dimensionless ratio mapping propagation phases to effective parameters.

    chi(x, y, z) = [cos((x+y)/2) + cos((x-y)/2)] / sin(z/2), which equals
    2*cos(x/2)*cos(y/2)/sin(z/2).  Raises SingularPhase when the round-trip
    phase ``z`` is within ``eps_sing`` of a multiple of 2pi.
    """
    s = math.sin(0.5 * z)
    if abs(s) < eps_sing:
        raise SingularPhase(
            f"round-trip phase {z!r} is within {eps_sing} of a waveguide resonance"
        )
    return (math.cos(0.5 * (x + y)) + math.cos(0.5 * (x - y))) / s


@dataclass(frozen=True)
class PhaseSettings1Q:
    """Phase differences of the two-cavity (one-qubit) network, in radians."""

    theta_m1: float
    theta_m2: float
    theta_12: float

    @property
    def theta_p(self) -> float:
        """Round-trip phase of the waveguide."""
        return self.theta_m1 + self.theta_m2 + 2.0 * self.theta_12

    def validate(self, eps_sing: float = EPS_SING) -> None:
        for name, value in (("theta_m1", self.theta_m1),
                            ("theta_m2", self.theta_m2),
                            ("theta_12", self.theta_12)):
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if abs(math.sin(0.5 * self.theta_p)) < eps_sing:
            raise SingularPhase(f"theta_p={self.theta_p!r} is singular")


#: Angle ordering used for arrays and solver variables.
ANGLES_2Q = ("theta_m3", "theta_34", "theta_4y", "theta_my",
             "theta_mx", "theta_5x", "theta_56", "theta_m6")


@dataclass(frozen=True)
class PhaseSettings2Q:
    """Phase differences of the two-qubit network (two waveguides), radians."""

    theta_m3: float
    theta_34: float
    theta_4y: float
    theta_my: float
    theta_mx: float
    theta_5x: float
    theta_56: float
    theta_m6: float

    @property
    def theta_p1(self) -> float:
        """Round-trip phase of waveguide 1 (cavities 3, 4 and the y transition)."""
        return self.theta_m3 + 2.0 * self.theta_34 + 2.0 * self.theta_4y + self.theta_my

    @property
    def theta_p2(self) -> float:
        """Round-trip phase of waveguide 2 (cavities 5, 6 and the x transition)."""
        return self.theta_mx + 2.0 * self.theta_5x + 2.0 * self.theta_56 + self.theta_m6

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in ANGLES_2Q], dtype=float)

    @classmethod
    def from_array(cls, values) -> "PhaseSettings2Q":
        return cls(*(float(v) for v in values))

    def validate(self, eps_sing: float = EPS_SING) -> None:
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise ValueError("all angles must be finite")
        for label, value in (("theta_p1", self.theta_p1), ("theta_p2", self.theta_p2)):
            if abs(math.sin(0.5 * value)) < eps_sing:
                raise SingularPhase(f"{label}={value!r} is singular")


@dataclass(frozen=True)
class EffectiveParams1Q:
    """Effective frequencies (absolute, including omega0) and coupling, Gamma_c units."""

    omega_c1_eff: float
    omega_c2_eff: float
    g12_eff: float


FIELDS_2Q = ("omega_c3_eff", "omega_c4_eff", "omega_c5_eff", "omega_c6_eff",
             "omega_x_eff", "omega_y_eff",
             "g34_eff", "gy3_eff", "gy4_eff", "g56_eff", "gx5_eff", "gx6_eff")


@dataclass(frozen=True)
class EffectiveParams2Q:
    """Effective frequencies and couplings of the two-qubit network, Gamma units."""

    omega_c3_eff: float = 0.0
    omega_c4_eff: float = 0.0
    omega_c5_eff: float = 0.0
    omega_c6_eff: float = 0.0
    omega_x_eff: float = 0.0
    omega_y_eff: float = 0.0
    g34_eff: float = 0.0
    gy3_eff: float = 0.0
    gy4_eff: float = 0.0
    g56_eff: float = 0.0
    gx5_eff: float = 0.0
    gx6_eff: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FIELDS_2Q], dtype=float)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS_2Q}


def effective_params_1q(settings: PhaseSettings1Q, gamma_c: float = 1.0,
                        omega0: float = 0.0) -> EffectiveParams1Q:
    """Effective detunings and coupling of the two linked cavities.

    The waveguide has been eliminated; what remains is a 2x2 problem whose
    entries depend only on the three phase differences.
    """
    settings.validate()
    tp = settings.theta_p
    m1, m2, t12 = settings.theta_m1, settings.theta_m2, settings.theta_12
    return EffectiveParams1Q(
        omega_c1_eff=omega0 + chi(m1, 2.0 * t12 + m2, tp) * gamma_c,
        omega_c2_eff=omega0 + chi(m2, 2.0 * t12 + m1, tp) * gamma_c,
        g12_eff=chi(m1, m2, tp) * gamma_c,
    )


# Each two-qubit quantity is prefactor * chi(x, y, theta_P(wg)) with x and y
# affine in the eight angles (ANGLES_2Q order).  Frequencies additionally get
# the omega0 offset.  The sqrt(2) and factor-2 prefactors encode the designed
# emission rates: 2*Gamma for cavities 3-4, 4*Gamma for cavities 5-6 and the dot.
_SQRT2 = math.sqrt(2.0)
_QUANTITIES = {
    # name: (prefactor, x coefficients, y coefficients, waveguide, is_frequency)
    "omega_c3_eff": (1.0, (1, 0, 0, 0, 0, 0, 0, 0), (0, 2, 2, 1, 0, 0, 0, 0), 1, True),
    "omega_c4_eff": (1.0, (1, 2, 0, 0, 0, 0, 0, 0), (0, 0, 2, 1, 0, 0, 0, 0), 1, True),
    "omega_c5_eff": (2.0, (0, 0, 0, 0, 0, 0, 2, 1), (0, 0, 0, 0, 1, 2, 0, 0), 2, True),
    "omega_c6_eff": (2.0, (0, 0, 0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 1, 2, 2, 0), 2, True),
    "omega_x_eff":  (2.0, (0, 0, 0, 0, 0, 2, 2, 1), (0, 0, 0, 0, 1, 0, 0, 0), 2, True),
    "omega_y_eff":  (2.0, (1, 2, 2, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0, 0, 0), 1, True),
    "g34_eff":      (1.0, (1, 0, 0, 0, 0, 0, 0, 0), (0, 0, 2, 1, 0, 0, 0, 0), 1, False),
    "gy3_eff":      (_SQRT2, (1, 0, 0, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0, 0, 0), 1, False),
    "gy4_eff":      (_SQRT2, (1, 2, 0, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0, 0, 0), 1, False),
    "g56_eff":      (2.0, (0, 0, 0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 1, 2, 0, 0), 2, False),
    "gx5_eff":      (2.0, (0, 0, 0, 0, 0, 0, 2, 1), (0, 0, 0, 0, 1, 0, 0, 0), 2, False),
    "gx6_eff":      (2.0, (0, 0, 0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 1, 0, 0, 0), 2, False),
}
_ZCOEF = {1: np.array([1, 2, 2, 1, 0, 0, 0, 0], dtype=float),
          2: np.array([0, 0, 0, 0, 1, 2, 2, 1], dtype=float)}
_PREFACTOR = np.array([_QUANTITIES[name][0] for name in FIELDS_2Q])
_XCOEF = np.array([_QUANTITIES[name][1] for name in FIELDS_2Q], dtype=float)
_YCOEF = np.array([_QUANTITIES[name][2] for name in FIELDS_2Q], dtype=float)
_WG = np.array([_QUANTITIES[name][3] for name in FIELDS_2Q])
_IS_FREQ = np.array([_QUANTITIES[name][4] for name in FIELDS_2Q])


def _params_2q_vector(theta: np.ndarray, eps_sing: float = EPS_SING,
                      clamp: bool = False) -> np.ndarray:
    """Vector of the twelve effective quantities (Gamma=1, omega0=0).

    With ``clamp`` the singular denominator is clipped instead of raising,
    which keeps the inverse solver's objective finite near resonances.
    """
    x = _XCOEF @ theta
    y = _YCOEF @ theta
    z = np.array([_ZCOEF[1] @ theta, _ZCOEF[2] @ theta])
    s = np.sin(0.5 * z)
    if clamp:
        s = np.where(np.abs(s) < eps_sing, np.copysign(eps_sing, s + (s == 0)), s)
    elif np.any(np.abs(s) < eps_sing):
        raise SingularPhase("round-trip phase singular")
    sz = s[_WG - 1]
    return _PREFACTOR * 2.0 * np.cos(0.5 * x) * np.cos(0.5 * y) / sz


def _params_2q_jacobian(theta: np.ndarray, eps_sing: float = EPS_SING) -> np.ndarray:
    """Analytic 12x8 Jacobian of `_params_2q_vector` (clamped form)."""
    x = _XCOEF @ theta
    y = _YCOEF @ theta
    z = np.array([_ZCOEF[1] @ theta, _ZCOEF[2] @ theta])
    s = np.sin(0.5 * z)
    s = np.where(np.abs(s) < eps_sing, np.copysign(eps_sing, s + (s == 0)), s)
    c = np.cos(0.5 * z)
    sz = s[_WG - 1]
    cz = c[_WG - 1]
    zc = np.stack([_ZCOEF[1], _ZCOEF[2]])[_WG - 1]
    cx, sx = np.cos(0.5 * x), np.sin(0.5 * x)
    cy, sy = np.cos(0.5 * y), np.sin(0.5 * y)
    pref = (_PREFACTOR / sz)[:, None]
    jac = pref * (
        -(sx * cy)[:, None] * _XCOEF
        - (cx * sy)[:, None] * _YCOEF
        - (cx * cy * cz / sz)[:, None] * zc
    )
    return jac


def effective_params_2q(settings: PhaseSettings2Q, gamma: float = 1.0,
                        omega0: float = 0.0) -> EffectiveParams2Q:
    """All twelve effective quantities of the two-qubit network."""
    settings.validate()
    vec = _params_2q_vector(settings.as_array()) * gamma
    vec = vec + np.where(_IS_FREQ, omega0, 0.0)
    return EffectiveParams2Q(**dict(zip(FIELDS_2Q, (float(v) for v in vec))))


# Canonical one-qubit control settings: hold the qubit, drive Rabi exchange
# between the rails, or advance the relative phase between the rails.
_SETTINGS_1Q = {
    "hold": PhaseSettings1Q(math.pi, 0.0, 0.0),
    "rabi": PhaseSettings1Q(0.5 * math.pi, 0.5 * math.pi, 0.0),
    "phase": PhaseSettings1Q(math.pi, 0.5 * math.pi, -0.25 * math.pi),
}


def standard_settings_1q(mode: str) -> PhaseSettings1Q:
    """Canonical one-qubit rows: 'hold', 'rabi' or 'phase' (relative phase)."""
    key = mode.lower().replace("relative-phase", "phase").replace("relative_phase", "phase")
    try:
        return _SETTINGS_1Q[key]
    except KeyError:
        raise ValueError(f"unknown one-qubit mode {mode!r}") from None


_PI = math.pi
# Two-qubit settings rows: eight angles plus the step duration in 1/Gamma
# (None where the caller chooses the duration).
_SETTINGS_2Q = {
    "A": ((_PI, _PI / 2, 0.0, _PI, _PI / 2, _PI, -_PI / 4, _PI), _PI / 4),
    "B": ((_PI / 2, 0.0, _PI, _PI / 2, _PI, 0.0, _PI / 2, _PI), _PI / 2),
    "C": ((_PI, _PI / 2, 0.0, _PI, _PI / 2, _PI, -_PI / 4, _PI), _PI / 4),
    "D": ((_PI, _PI / 2, 0.0, _PI, _PI, 0.0, 5 * _PI / 4, -_PI / 2), _PI / 2),
    "FEED_RABI": ((_PI / 2, _PI, -_PI / 4, _PI, _PI, 0.0, _PI / 2, _PI), None),
    "FEED_PHASE": ((-_PI / 2, 5 * _PI / 4, 0.0, _PI, _PI, 0.0, _PI / 2, _PI), None),
    "HOLD": ((_PI, _PI / 2, 0.0, _PI, _PI, 0.0, _PI / 2, _PI), None),
}


def standard_settings_2q(step: str) -> tuple[PhaseSettings2Q, float | None]:
    """Canonical two-qubit rows.

    Steps 'A'..'D' are the gate schedule and carry their duration in units
    of 1/Gamma; 'feed-rabi', 'feed-phase' and 'hold' are the photon-feeding
    rows, whose duration the caller supplies.
    """
    key = step.upper().replace("-", "_")
    try:
        angles, duration = _SETTINGS_2Q[key]
    except KeyError:
        raise ValueError(f"unknown two-qubit step {step!r}") from None
    return PhaseSettings2Q(*angles), duration


@dataclass(frozen=True)
class ParamMask:
    """Care/ignore flags for the twelve two-qubit quantities (True = match)."""

    omega_c3_eff: bool = True
    omega_c4_eff: bool = True
    omega_c5_eff: bool = True
    omega_c6_eff: bool = True
    omega_x_eff: bool = True
    omega_y_eff: bool = True
    g34_eff: bool = True
    gy3_eff: bool = True
    gy4_eff: bool = True
    g56_eff: bool = True
    gx5_eff: bool = True
    gx6_eff: bool = True

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FIELDS_2Q], dtype=bool)


def _solver_seeds(rng: np.random.Generator, n_random: int) -> list[np.ndarray]:
    seeds = [PhaseSettings2Q(*angles).as_array() for angles, _ in _SETTINGS_2Q.values()]
    lo, hi = -math.pi, 2.0 * math.pi
    for _ in range(n_random):
        seeds.append(rng.uniform(lo, hi, size=8))
    return seeds


def solve_phase_settings(target: EffectiveParams2Q, mask: ParamMask | None = None,
                         seed: int = 0, max_starts: int = 64,
                         tol: float = TOL_INVERSE) -> PhaseSettings2Q:
    """Numerically invert the phase algebra.

    Searches the eight angles in [-pi, 2pi) for settings whose effective
    parameters reproduce every "care" field of ``target`` (Gamma = 1,
    omega0 = 0) within ``tol``.  Multi-start bounded least squares with the
    analytic Jacobian; seeds include every canonical table row plus
    ``seed``-reproducible random starts.  Every result is forward-verified
    before being returned.
    """
    mask_arr = (mask or ParamMask()).as_array()
    if not mask_arr.any():
        raise ValueError("mask ignores every field; nothing to solve for")
    target_arr = target.as_array()
    if not np.all(np.isfinite(target_arr[mask_arr])):
        raise ValueError("target values must be finite")

    idx = np.flatnonzero(mask_arr)

    def residual(theta):
        return _params_2q_vector(theta, clamp=True)[idx] - target_arr[idx]

    def jacobian(theta):
        return _params_2q_jacobian(theta)[idx]

    rng = np.random.default_rng(seed)
    lo, hi = -math.pi, 2.0 * math.pi
    n_table = len(_SETTINGS_2Q)
    seeds = _solver_seeds(rng, max(0, max_starts - n_table))
    for start in seeds[:max_starts]:
        result = least_squares(residual, start, jac=jacobian,
                               bounds=(lo, hi - 1e-12), method="trf",
                               xtol=1e-14, ftol=1e-14, gtol=1e-14)
        candidate = PhaseSettings2Q.from_array(result.x)
        try:
            achieved = effective_params_2q(candidate).as_array()
        except SingularPhase:
            continue
        if np.max(np.abs(achieved[idx] - target_arr[idx])) < tol:
            return candidate
    raise NoSolutionFound(
        f"no phase settings found for target {target!r} after {max_starts} starts"
    )
