"""Open-system dynamics: pure dephasing of the dot and photon loss.

The Lindblad generator is assembled as a sparse superoperator over
row-major vectorized density matrices.  Two propagation paths exist: an
adaptive integrator (the reference implementation, rel-tol 1e-8) and the
exact action of the generator exponential, used for the fidelity studies
where thousands of segment propagations would otherwise dominate runtime.
The two paths are cross-checked in the test suite.

Rates are handed over in SI (1/s) together with Gamma and divided out, so
everything downstream is dimensionless: fidelities depend only on the
ratios gamma_phase/Gamma and kappa/Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from . import units
from .dynamics import (QCNOT_LOGICAL, hamiltonian_2q, logical_basis,
                       qcnot_program)
from .errors import IntegratorFailure
from .hilbert import Space, two_qubit_space
from .phases import effective_params_2q


@dataclass(frozen=True)
class DecoherenceParams:
    """Decoherence knobs in SI units.

    gamma_phase is the pure-dephasing rate (the spectral linewidth is
    2*hbar*gamma_phase); q_factor may be math.inf for lossless cavities.
    omega0_si only enters through kappa = omega0/Q.  qd_loss_rate adds
    radiative decay of the dot into free space and defaults to off.
    """

    gamma_phase: float = 0.0
    q_factor: float = math.inf
    omega0_si: float = units.omega_from_wavelength()
    qd_loss_rate: float = 0.0

    def __post_init__(self):
        if self.gamma_phase < 0:
            raise ValueError("gamma_phase must be >= 0")
        if self.q_factor <= 0:
            raise ValueError("q_factor must be > 0")

    @property
    def kappa(self) -> float:
        """Cavity energy-loss rate omega0/Q in 1/s."""
        return 0.0 if math.isinf(self.q_factor) else self.omega0_si / self.q_factor


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus collapse terms (operator, rate), all in Gamma units."""

    hamiltonian: np.ndarray
    collapse: tuple

    def liouvillian(self) -> sp.csr_matrix:
        """Sparse generator acting on row-major vec(rho)."""
        dim = self.hamiltonian.shape[0]
        eye = sp.identity(dim, format="csr", dtype=complex)
        h = sp.csr_matrix(self.hamiltonian)
        gen = -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
        for op, rate in self.collapse:
            l_op = sp.csr_matrix(op)
            ldl = (l_op.conj().T @ l_op).tocsr()
            gen = gen + rate * (
                sp.kron(l_op, l_op.conj())
                - 0.5 * (sp.kron(ldl, eye) + sp.kron(eye, ldl.T))
            )
        return gen.tocsr()


def lindblad_model(hamiltonian: np.ndarray, decoherence: DecoherenceParams,
                   space: Space, gamma: float) -> LindbladModel:
    """Attach the decoherence channels to a segment Hamiltonian.

    Dephasing enters as projectors on the excited dot levels with rate
    2*gamma_phase, which makes the ground-excited coherence decay at
    gamma_phase (linewidth 2*hbar*gamma_phase); each cavity gets a loss
    collapse operator with rate omega0/Q.  Rates are divided by ``gamma``
    to match the Gamma-unit Hamiltonian.
    """
    collapse = []
    if decoherence.gamma_phase > 0:
        rate = 2.0 * decoherence.gamma_phase / gamma
        collapse.append((space.qd_transition("x", "x"), rate))
        collapse.append((space.qd_transition("y", "y"), rate))
    kappa = decoherence.kappa / gamma
    if kappa > 0:
        for label in space.cavity_labels:
            collapse.append((space.annihilation(label), kappa))
    if decoherence.qd_loss_rate > 0:
        rate = decoherence.qd_loss_rate / gamma
        collapse.append((space.qd_transition("g", "x"), rate))
        collapse.append((space.qd_transition("g", "y"), rate))
    return LindbladModel(hamiltonian=hamiltonian, collapse=tuple(collapse))


def integrate_master(model: LindbladModel, rho0: np.ndarray, t: float,
                     rtol: float = 1e-8, atol: float = 1e-10) -> np.ndarray:
    """Adaptive integration of the master equation over [0, t]."""
    if t == 0.0:
        return rho0.copy()
    gen = model.liouvillian()
    dim = rho0.shape[0]

    def rhs(_, vec):
        return gen @ vec

    sol = solve_ivp(rhs, (0.0, t), rho0.reshape(-1).astype(complex),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegratorFailure(sol.message)
    return sol.y[:, -1].reshape(dim, dim)


def propagate_exact(model: LindbladModel, columns: np.ndarray, t: float) -> np.ndarray:
    """Apply exp(L t) to stacked vectorized density matrices (dim^2, k)."""
    if t == 0.0:
        return columns.copy()
    return expm_multiply(model.liouvillian() * t, columns)


# ---------------------------------------------------------------------------
# Gate fidelity under decoherence
# ---------------------------------------------------------------------------

def _qcnot_segments(space: Space) -> list[tuple[np.ndarray, float]]:
    segments = []
    for step in qcnot_program().steps:
        h = hamiltonian_2q(effective_params_2q(step.settings), space)
        segments.append((h, step.duration))
    return segments


def _propagate_schedule(space: Space, decoherence: DecoherenceParams, gamma: float,
                        columns: np.ndarray, method: str) -> np.ndarray:
    dim = space.dim
    for h, duration in _qcnot_segments(space):
        model = lindblad_model(h, decoherence, space, gamma)
        if method == "expm":
            columns = propagate_exact(model, columns, duration)
        else:
            for k in range(columns.shape[1]):
                rho = integrate_master(model, columns[:, k].reshape(dim, dim), duration)
                columns[:, k] = rho.reshape(-1)
    return columns


def qcnot_fidelity(decoherence: DecoherenceParams, gamma: float,
                   definition: str = "state", method: str = "expm",
                   space: Space | None = None) -> float:
    """Fidelity of the three-segment two-qubit gate under decoherence.

    definition='state' (default): mean over the four logical basis inputs of
    the overlap with the ideal output states.  definition='process': average
    gate fidelity (4*F_entanglement + 1)/5 obtained by propagating the
    sixteen logical basis operators.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    space = space or two_qubit_space()
    basis = logical_basis(space, 2)
    ideal = [sum(QCNOT_LOGICAL[i, j] * basis[i] for i in range(4)) for j in range(4)]
    dim = space.dim

    if definition == "state":
        columns = np.stack([np.outer(psi, psi.conj()).reshape(-1) for psi in basis], axis=1)
        columns = _propagate_schedule(space, decoherence, gamma, columns.astype(complex), method)
        fids = [
            float((ideal[j].conj() @ columns[:, j].reshape(dim, dim) @ ideal[j]).real)
            for j in range(4)
        ]
        return float(np.mean(fids))
    if definition == "process":
        columns = np.stack(
            [np.outer(basis[i], basis[j].conj()).reshape(-1) for i in range(4) for j in range(4)],
            axis=1,
        )
        columns = _propagate_schedule(space, decoherence, gamma, columns.astype(complex), method)
        f_ent = 0.0
        for k, (i, j) in enumerate((i, j) for i in range(4) for j in range(4)):
            block = columns[:, k].reshape(dim, dim)
            f_ent += (ideal[i].conj() @ block @ ideal[j]).real
        f_ent /= 16.0
        return float((4.0 * f_ent + 1.0) / 5.0)
    raise ValueError(f"unknown fidelity definition {definition!r}")


@dataclass(frozen=True)
class FidelitySweepResult:
    """Fidelity as a function of one decoherence axis."""

    axis: str
    values: np.ndarray
    fidelities: np.ndarray

    def rows(self):
        return list(zip(self.values.tolist(), self.fidelities.tolist()))


def fidelity_sweep(axis: str, grid, fixed: DecoherenceParams, gamma: float,
                   definition: str = "state",
                   monotone_slack: float = 1e-6) -> FidelitySweepResult:
    """Sweep the gate fidelity along 'dephasing' (gamma_phase in 1/s) or
    'qfactor' (dimensionless Q), holding the other channel at ``fixed``.

    Fidelity must fall with dephasing and with 1/Q; a violation beyond
    ``monotone_slack`` marks a numerically unsound sweep.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("sweep grid is empty")
    if np.any(np.diff(grid) <= 0) and grid.size > 1:
        raise ValueError("sweep grid must be strictly increasing")
    fids = np.empty_like(grid)
    for k, value in enumerate(grid):
        if axis == "dephasing":
            point = replace(fixed, gamma_phase=float(value))
        elif axis == "qfactor":
            point = replace(fixed, q_factor=float(value))
        else:
            raise ValueError(f"unknown sweep axis {axis!r}")
        fids[k] = qcnot_fidelity(point, gamma, definition=definition)
    if grid.size > 1:
        steps = np.diff(fids)
        drift = float(np.max(steps)) if axis == "dephasing" else -float(np.min(steps))
        if drift > monotone_slack:
            raise IntegratorFailure(f"sweep violates monotonicity by {drift:.3e}")
    return FidelitySweepResult(axis=axis, values=grid, fidelities=fids)


def crossing(values: np.ndarray, fidelities: np.ndarray, level: float = 0.9) -> float | None:
    """Axis value where a monotone-decreasing fidelity curve crosses ``level``."""
    for k in range(len(values) - 1):
        f0, f1 = fidelities[k], fidelities[k + 1]
        if (f0 - level) * (f1 - level) <= 0.0 and f0 != f1:
            return float(values[k] + (level - f0) * (values[k + 1] - values[k]) / (f1 - f0))
    return None
