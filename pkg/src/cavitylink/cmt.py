"""Classical coupled-mode network with delayed boundary conditions.

Time-domain oracle for the quantum models: two cavity amplitudes driven by
the waves they emitted earlier, reflected at the end mirrors and delayed by
the propagation times.  The quantized single-excitation ladder model must
reproduce these traces, which is what `compare_full_model` checks.

Integration runs on a grid whose step divides every delay, so delayed
reads land exactly on stored samples (no history interpolation).  Each
grid value is produced by a classical Runge-Kutta step of size 2*dt whose
stage times are themselves grid points; the two interleaved step streams
fill the grid alternately, and the very first point comes from the exact
delay-free decay (no wave can return earlier than the shortest delay).

Fast carrier oscillation is removed by integrating envelopes in a frame
rotating at ``frame_omega``; the delayed couplings then carry the carrier
phase factors exp(i*omega*tau), which is exactly how the phase-difference
control enters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import IncommensurateStep, UnstableStep
from .fullmodel import (CmtConfig, FullModelConfig, evolve_amplitudes,
                        single_excitation_hamiltonian, window_around)

#: Relative tolerance for "dt divides tau" checks.
_GRID_RTOL = 1e-9

#: Cumulative energy-bookkeeping drift that aborts a run.
_DRIFT_LIMIT = 1e-4


@dataclass(frozen=True)
class CmtTrace:
    """Time-domain solution of the network.

    ``amplitudes`` holds the cavity envelopes (2, n_times) in the rotating
    frame; |a|^2 is the cavity energy.  ``s_in``/``s_out`` map the four
    ports ('1L', '1R', '2L', '2R') to wave amplitude arrays.  The
    bookkeeping residual checks, at every stored step, the power balance
    d/dt(sum |a|^2) + sum_ports(|S_out|^2 - |S_in|^2) = 0 with the
    derivative taken from the equations of motion themselves.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    s_in: dict
    s_out: dict
    frame_omega: float
    residual: np.ndarray
    residual_scale: float

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual)) / self.residual_scale)

    def energies(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def csv_rows(self):
        """Rows of (t, re/im of each cavity, energies) for export."""
        for k, t in enumerate(self.times):
            a1 = self.amplitudes[0, k]
            a2 = self.amplitudes[1, k]
            yield (t, a1.real, a1.imag, a2.real, a2.imag,
                   abs(a1) ** 2, abs(a2) ** 2)


def _steps_in(tau: float, dt: float) -> int:
    k = round(tau / dt)
    if k < 1 or abs(k * dt - tau) > _GRID_RTOL * tau:
        raise IncommensurateStep(f"dt={dt!r} does not divide delay {tau!r}")
    return k


def make_commensurate(cfg: CmtConfig, dt: float) -> tuple[CmtConfig, dict]:
    """Snap the three delays to multiples of dt; returns (config, adjustments)."""
    adjustments = {}
    new = {}
    for name in ("tau_m1", "tau_m2", "tau_12"):
        tau = getattr(cfg, name)
        snapped = max(1, round(tau / dt)) * dt
        new[name] = snapped
        adjustments[name] = snapped - tau
    return replace(cfg, **new), adjustments


def default_dt(cfg: CmtConfig) -> float:
    return min(cfg.tau_m1, cfg.tau_m2, cfg.tau_12) / 8.0


def cmt_evolve(cfg: CmtConfig, initial, horizon: float, dt: float,
               frame_omega: float = 0.0) -> CmtTrace:
    """Integrate the network from cavity amplitudes ``initial`` over ``horizon``.

    Waves are zero before t = 0.  Requires dt to divide every delay,
    dt <= min(delay)/8 and dt <= 0.01/max(emission rate).
    """
    k_m1 = _steps_in(cfg.tau_m1, dt)
    k_m2 = _steps_in(cfg.tau_m2, dt)
    k_12 = _steps_in(cfg.tau_12, dt)
    if min(k_m1, k_m2, k_12) < 8:
        raise IncommensurateStep("dt must be at most min(delay)/8")
    gmax = max(cfg.gamma_1, cfg.gamma_2)
    if gmax > 0 and dt > 0.01 / gmax:
        raise IncommensurateStep("dt must be at most 0.01/max(Gamma)")

    n_steps = int(math.ceil(horizon / dt))
    if n_steps < 2:
        raise ValueError("horizon shorter than two steps")

    gamma = np.array([cfg.gamma_1, cfg.gamma_2])
    kappa = np.sqrt(gamma).astype(complex)  # free gauge phase taken as 0
    decay = 1j * (np.array([cfg.omega_c1, cfg.omega_c2]) - frame_omega) + gamma

    # carrier phase factors of the delayed couplings
    ph_12 = cmath.exp(1j * frame_omega * cfg.tau_12)
    ph_m1 = cmath.exp(1j * (cfg.delta_1 + frame_omega * cfg.tau_m1))
    ph_m2 = cmath.exp(1j * (cfg.delta_2 + frame_omega * cfg.tau_m2))
    mirrors = cfg.mirrors_on

    amps = np.zeros((2, n_steps + 1), dtype=complex)
    amps[:, 0] = np.asarray(initial, dtype=complex)
    s_out = {port: np.zeros(n_steps + 1, dtype=complex) for port in ("1L", "1R", "2L", "2R")}
    s_in = {port: np.zeros(n_steps + 1, dtype=complex) for port in ("1L", "1R", "2L", "2R")}

    def inputs(n: int) -> np.ndarray:
        """Incoming waves (2, 2) -> [cavity, (L, R)] at grid index n."""
        in_1l = ph_m1 * s_out["1R"][n - k_m1] if (mirrors and n >= k_m1) else 0.0
        in_2r = ph_m2 * s_out["2L"][n - k_m2] if (mirrors and n >= k_m2) else 0.0
        in_2l = ph_12 * s_out["1L"][n - k_12] if n >= k_12 else 0.0
        in_1r = ph_12 * s_out["2R"][n - k_12] if n >= k_12 else 0.0
        return np.array([[in_1l, in_1r], [in_2l, in_2r]], dtype=complex)

    def record(n: int) -> None:
        waves = inputs(n)
        s_in["1L"][n], s_in["1R"][n] = waves[0]
        s_in["2L"][n], s_in["2R"][n] = waves[1]
        out = waves - (kappa.conj() * amps[:, n])[:, None]
        s_out["1L"][n], s_out["1R"][n] = out[0]
        s_out["2L"][n], s_out["2R"][n] = out[1]

    def rhs(a: np.ndarray, n: int) -> np.ndarray:
        waves = inputs(n)
        return -decay * a + kappa * waves.sum(axis=1)

    record(0)
    # first grid point: exact delay-free decay (no wave returns before min tau)
    amps[:, 1] = amps[:, 0] * np.exp(-decay * dt)
    record(1)
    h = 2.0 * dt
    for n in range(2, n_steps + 1):
        a = amps[:, n - 2]
        k1 = rhs(a, n - 2)
        k2 = rhs(a + dt * k1, n - 1)
        k3 = rhs(a + dt * k2, n - 1)
        k4 = rhs(a + h * k3, n)
        amps[:, n] = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        record(n)

    times = np.arange(n_steps + 1) * dt
    energy = np.sum(np.abs(amps) ** 2, axis=0)
    # passive network: cavity energy can never exceed the initial total
    initial_energy = max(float(energy[0]), 1e-30)
    drift = float(np.max(energy) - energy[0]) / initial_energy
    if drift > _DRIFT_LIMIT:
        raise UnstableStep(f"cavity energy drift {drift:.3e} exceeds {_DRIFT_LIMIT}")

    # power balance at every stored step, derivative from the equations of motion
    waves_in = np.stack([s_in["1L"] + s_in["1R"], s_in["2L"] + s_in["2R"]])
    dadt = -decay[:, None] * amps + kappa[:, None] * waves_in
    dedt = 2.0 * np.sum((amps.conj() * dadt).real, axis=0)
    flux = sum(np.abs(s_out[p]) ** 2 - np.abs(s_in[p]) ** 2 for p in s_out)
    residual = dedt + flux
    scale = max(float(np.max(np.abs(dedt))), float(np.max(np.abs(flux))), 1e-30)
    return CmtTrace(times=times, amplitudes=amps, s_in=s_in, s_out=s_out,
                    frame_omega=frame_omega, residual=residual, residual_scale=scale)


@dataclass(frozen=True)
class CmtFullReport:
    """Deviation between the classical trace and the quantized ladder model."""

    max_deviation_c1: float
    max_deviation_c2: float
    energy_residual: float
    n_modes: int

    @property
    def max_deviation(self) -> float:
        return max(self.max_deviation_c1, self.max_deviation_c2)


def compare_full_model(cfg: CmtConfig, n_modes: int = 201, horizon: float = 3.0,
                       dt: float | None = None, frame_omega: float | None = None,
                       phi0: float = 0.0, sample_every: int = 8) -> CmtFullReport:
    """Evolve a photon from cavity 1 in both pictures and compare energies.

    Classical side: a_c1(0) = 1, waves empty.  Quantum side: single
    excitation in cavity 1, ladder modes in vacuum, same network, window of
    ``n_modes`` modes straddling the carrier.
    """
    if frame_omega is None:
        frame_omega = 0.5 * (cfg.omega_c1 + cfg.omega_c2)
    if dt is None:
        dt = default_dt(cfg)
        cfg, _ = make_commensurate(cfg, dt)
    trace = cmt_evolve(cfg, [1.0, 0.0], horizon, dt, frame_omega=frame_omega)

    lam_min, lam_max = window_around(cfg, frame_omega, n_modes)
    full_cfg = FullModelConfig(cmt=cfg, lam_min=lam_min, lam_max=lam_max, phi0=phi0)
    h = single_excitation_hamiltonian(full_cfg, frame_omega=frame_omega)
    psi0 = np.zeros(h.shape[0], dtype=complex)
    psi0[0] = 1.0
    times = trace.times[::sample_every]
    quantum = evolve_amplitudes(h, psi0, times)
    classical = trace.energies()[:, ::sample_every]
    dev1 = float(np.max(np.abs(classical[0] - np.abs(quantum[:, 0]) ** 2)))
    dev2 = float(np.max(np.abs(classical[1] - np.abs(quantum[:, 1]) ** 2)))
    return CmtFullReport(max_deviation_c1=dev1, max_deviation_c2=dev2,
                         energy_residual=trace.max_residual, n_modes=n_modes)
