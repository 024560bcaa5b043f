"""SI conversions at the boundary of the natural-unit core.

Internally the simulator sets Gamma = 1 and omega0 = 0; only the command
line and the decoherence parameters deal in seconds, micro-eV and cavity
quality factors.
"""

from __future__ import annotations

import math

from scipy.constants import c as _C, e as _E, hbar as _HBAR

#: Telecom photonic-crystal cavity context; the carrier frequency is only
#: used for converting a quality factor into a loss rate.
DEFAULT_WAVELENGTH_M = 1.55e-6

#: Quarter of the dot emission period that fixes the physical time scale.
DEFAULT_QUARTER_PERIOD_PS = 38.5


def gamma_from_quarter_period_ps(quarter_period_ps: float = DEFAULT_QUARTER_PERIOD_PS) -> float:
    """Gamma in 1/s from the quarter period 1/(4*Gamma) in picoseconds."""
    return 1.0 / (4.0 * quarter_period_ps * 1e-12)


def qcnot_time_ps(quarter_period_ps: float = DEFAULT_QUARTER_PERIOD_PS) -> float:
    """Wall-clock two-qubit gate time pi/Gamma in picoseconds."""
    return math.pi / gamma_from_quarter_period_ps(quarter_period_ps) * 1e12


def dephasing_rate_from_linewidth_uev(linewidth_uev: float) -> float:
    """Pure-dephasing rate gamma_phase (1/s) from the linewidth 2*hbar*gamma_phase in ueV."""
    return linewidth_uev * 1e-6 * _E / (2.0 * _HBAR)


def linewidth_uev_from_dephasing_rate(rate: float) -> float:
    return 2.0 * _HBAR * rate / (1e-6 * _E)


def omega_from_wavelength(wavelength_m: float = DEFAULT_WAVELENGTH_M) -> float:
    """Optical angular frequency (rad/s) of a vacuum wavelength."""
    return 2.0 * math.pi * _C / wavelength_m


def kappa_from_q(q_factor: float, wavelength_m: float = DEFAULT_WAVELENGTH_M) -> float:
    """Cavity energy-loss rate omega0/Q (1/s); returns 0 for infinite Q."""
    if math.isinf(q_factor):
        return 0.0
    if q_factor <= 0:
        raise ValueError("Q factor must be positive")
    return omega_from_wavelength(wavelength_m) / q_factor


def q_from_kappa(kappa: float, wavelength_m: float = DEFAULT_WAVELENGTH_M) -> float:
    if kappa == 0.0:
        return math.inf
    return omega_from_wavelength(wavelength_m) / kappa
