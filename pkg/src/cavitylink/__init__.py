"""Simulator for photonic qubits in waveguide-linked optical cavities.

Qubits are photons shared between cavity pairs; gates are programmed by
tuning the propagation phases of the connecting waveguides, with a single
three-level quantum dot mediating the two-qubit interaction.
"""

from .errors import (CavityLinkError, DimensionOverflow, IncommensurateStep,
                     IntegratorFailure, NoSolutionFound, NonHermitian,
                     NotInLogicalSubspace, OutOfTruncation, SingularPhase,
                     UnknownLabel, UnknownLevel, UnstableStep, ValidityViolated)
from .phases import (EPS_SING, EffectiveParams1Q, EffectiveParams2Q, ParamMask,
                     PhaseSettings1Q, PhaseSettings2Q, chi, effective_params_1q,
                     effective_params_2q, solve_phase_settings,
                     standard_settings_1q, standard_settings_2q)
from .hilbert import Space, one_qubit_space, two_qubit_space
from .dynamics import (GateReport, PhaseProgram, Pulse, Segment, bell_state,
                       cnot, cnot_program, concurrence, entangled_source,
                       evolve, feed_photon, hamiltonian_1q, hamiltonian_2q,
                       logical_state_1q, logical_state_2q,
                       logical_unitary_extract, qcnot, qcnot_program,
                       run_program)
from .lindblad import (DecoherenceParams, FidelitySweepResult, LindbladModel,
                       fidelity_sweep, integrate_master, lindblad_model,
                       qcnot_fidelity)
from .fullmodel import (CmtConfig, FullModelConfig, compare_effective,
                        coupling_constants, fp_frequencies,
                        full_config_from_settings, network_from_settings,
                        single_excitation_hamiltonian)
from .cmt import CmtTrace, cmt_evolve, compare_full_model, make_commensurate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
