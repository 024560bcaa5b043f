import math

import numpy as np
import pytest

from cavitylink import dynamics as dyn
from cavitylink import phases
from cavitylink.errors import NonHermitian, NotInLogicalSubspace
from cavitylink.hilbert import Space, one_qubit_space, two_qubit_space

PI = math.pi


@pytest.fixture(scope="module")
def space():
    return two_qubit_space()


def plus_l1(space, qd="g", c5=0, c6=0):
    return (space.state([1, 0, c5, c6], qd) + space.state([0, 1, c5, c6], qd)) / math.sqrt(2)


def minus_l1(space, qd="g", c5=0, c6=0):
    return (space.state([1, 0, c5, c6], qd) - space.state([0, 1, c5, c6], qd)) / math.sqrt(2)


def rail_splitting_state(space, a, t):
    """Closed-form evolution of |a>_L1 |0>_c5 |1>_c6 |g> under the splitting row.

    Rotating frame, Gamma = 1: the odd rail combination is dark, the even
    combination breathes into the dot's y level and back with period pi/2.
    """
    even = 0.5 * (1.0 + np.exp(-4j * t))
    dot = 0.5 * (1.0 - np.exp(-4j * t))
    sign = 2 * a - 1
    return (even * plus_l1(space, "g", 0, 1)
            + sign * minus_l1(space, "g", 0, 1)
            + dot * space.state([0, 0, 0, 1], "y")) / math.sqrt(2)


def rail_exchange_state(space, a, t):
    """Closed-form evolution of |a>_L1 |0>_c5 |0>_c6 |x> under the same row."""
    sign = 2 * a - 1
    return (np.exp(-2j * t) * plus_l1(space, "x")
            + sign * minus_l1(space, "x")) / math.sqrt(2)


class TestHamiltonians:
    def test_hold_is_zero(self):
        sp = one_qubit_space()
        params = phases.effective_params_1q(phases.standard_settings_1q("hold"))
        h = dyn.hamiltonian_1q(params, sp)
        assert np.max(np.abs(h)) < 1e-12

    def test_rabi_block(self):
        sp = one_qubit_space()
        params = phases.effective_params_1q(phases.standard_settings_1q("rabi"))
        h = dyn.hamiltonian_1q(params, sp)
        one = sp.state([1, 0], "g")
        other = sp.state([0, 1], "g")
        assert (other.conj() @ h @ one) == pytest.approx(1.0, abs=1e-12)
        assert (one.conj() @ h @ one).real == pytest.approx(1.0, abs=1e-12)

    def test_step_a_matrix(self, space):
        params = phases.effective_params_2q(phases.standard_settings_2q("A")[0])
        h = dyn.hamiltonian_2q(params, space)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        occupied = space.state([0, 0, 1, 0], "g")
        stored = space.state([0, 0, 0, 0], "x")
        assert (occupied.conj() @ h @ occupied).real == pytest.approx(2.0, abs=1e-12)
        assert (stored.conj() @ h @ stored).real == pytest.approx(2.0, abs=1e-12)
        assert (occupied.conj() @ h @ stored) == pytest.approx(-2.0, abs=1e-12)

    def test_step_b_matrix(self, space):
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        c3 = space.state([1, 0, 0, 0], "g")
        c4 = space.state([0, 1, 0, 0], "g")
        ys = space.state([0, 0, 0, 0], "y")
        assert (c3.conj() @ h @ c3).real == pytest.approx(1.0, abs=1e-12)
        assert (c4.conj() @ h @ c4).real == pytest.approx(1.0, abs=1e-12)
        assert (ys.conj() @ h @ ys).real == pytest.approx(2.0, abs=1e-12)
        assert (c3.conj() @ h @ c4) == pytest.approx(1.0, abs=1e-12)
        assert (c3.conj() @ h @ ys) == pytest.approx(-math.sqrt(2), abs=1e-12)
        assert (c4.conj() @ h @ ys) == pytest.approx(-math.sqrt(2), abs=1e-12)

    def test_step_d_diagonal(self, space):
        params = phases.effective_params_2q(phases.standard_settings_2q("D")[0])
        h = dyn.hamiltonian_2q(params, space)
        off = h - np.diag(np.diag(h))
        assert np.max(np.abs(off)) < 1e-12
        c6 = space.state([0, 0, 0, 1], "g")
        assert (c6.conj() @ h @ c6).real == pytest.approx(-2.0, abs=1e-12)

    def test_evolve_rejects_non_hermitian(self):
        with pytest.raises(NonHermitian):
            dyn.evolve(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0, np.array([1.0, 0.0]))


class TestClosedForms:
    def test_storage_half_swap_is_exact(self, space):
        """At a quarter of the dot period the rail photon maps exactly onto the dot."""
        params = phases.effective_params_2q(phases.standard_settings_2q("A")[0])
        h = dyn.hamiltonian_2q(params, space)
        start = space.state([0, 1, 1, 0], "g")
        target = space.state([0, 1, 0, 0], "x")
        out = dyn.evolve(h, PI / 4, start)
        assert abs(target.conj() @ out - 1.0) < 1e-12
        # empty control rail is left strictly alone
        idle = space.state([0, 1, 0, 1], "g")
        out = dyn.evolve(h, PI / 4, idle)
        assert abs(idle.conj() @ out - 1.0) < 1e-12

    @pytest.mark.parametrize("a", [0, 1])
    def test_splitting_closed_form(self, space, a):
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.state([a, 1 - a, 0, 1], "g")
        for t in np.linspace(0.0, PI / 2, 100):
            out = dyn.evolve(h, t, psi0)
            np.testing.assert_allclose(out, rail_splitting_state(space, a, t), atol=1e-8)

    @pytest.mark.parametrize("a", [0, 1])
    def test_exchange_closed_form(self, space, a):
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.state([a, 1 - a, 0, 0], "x")
        for t in np.linspace(0.0, PI / 2, 100):
            out = dyn.evolve(h, t, psi0)
            np.testing.assert_allclose(out, rail_exchange_state(space, a, t), atol=1e-8)

    def test_recovery_after_half_period(self, space):
        """The dot-in-g state returns exactly after pi/2 (splitting row)."""
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.state([0, 1, 0, 1], "g")
        out = dyn.evolve(h, PI / 2, psi0)
        assert abs(psi0.conj() @ out - 1.0) < 1e-9

    def test_flip_after_half_period(self, space):
        """The dot-in-x state flips the first qubit with a minus sign."""
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.state([0, 1, 0, 0], "x")
        out = dyn.evolve(h, PI / 2, psi0)
        target = -space.state([1, 0, 0, 0], "x")
        np.testing.assert_allclose(out, target, atol=1e-9)

    def test_one_qubit_rabi_period(self):
        sp = one_qubit_space()
        params = phases.effective_params_1q(phases.standard_settings_1q("rabi"))
        h = dyn.hamiltonian_1q(params, sp)
        psi0 = dyn.logical_state_1q(sp, 1)
        other = dyn.logical_state_1q(sp, 0)
        out = dyn.evolve(h, PI / (2 * params.g12_eff), psi0)
        assert abs(other.conj() @ out) == pytest.approx(1.0, abs=1e-12)

    def test_rail_exchange_period(self, space):
        """Full exchange period pi under the splitting row with the dot in x."""
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.state([1, 0, 0, 0], "x")
        out = dyn.evolve(h, PI, psi0)
        assert abs(abs(psi0.conj() @ out) - 1.0) < 1e-12

    def test_source_splitting_closed_form(self, space):
        """From the bare y excitation the rails fill as (1 - e^{-4it})/2."""
        params = phases.effective_params_2q(phases.standard_settings_2q("B")[0])
        h = dyn.hamiltonian_2q(params, space)
        psi0 = space.vacuum("y")
        for t in np.linspace(0.0, PI / 2, 100):
            got = dyn.evolve(h, t, psi0)
            want = (0.5 * (1 - np.exp(-4j * t)) * plus_l1(space)
                    + 0.5 * (1 + np.exp(-4j * t)) * space.vacuum("y"))
            np.testing.assert_allclose(got, want, atol=1e-8)


class TestQuasiCnot:
    # rows of the gate table: (a, b) -> sign, with intermediates
    @pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (0, 1), (1, 1)])
    def test_truth_table_rows(self, space, a, b):
        psi0 = dyn.logical_state_2q(space, a, b)
        final, report = dyn.qcnot(psi0)
        sign = -1 if b else 1
        ideal = sign * dyn.logical_state_2q(space, a ^ b, b)
        np.testing.assert_allclose(final, ideal, atol=1e-9)
        assert report.distance_to_ideal < 1e-9
        assert report.leakage < 1e-9

    def test_intermediate_after_storage(self, space):
        seg_a = dyn.qcnot_program().steps[0]
        psi = dyn.run_program(dyn.PhaseProgram((seg_a,)),
                              dyn.logical_state_2q(space, 0, 1), space)
        expected = space.state([0, 1, 0, 0], "x")
        np.testing.assert_allclose(psi, expected, atol=1e-9)

    def test_double_application_is_identity(self, space):
        prog = dyn.qcnot_program() + dyn.qcnot_program()
        report = dyn.logical_unitary_extract(prog, space, ideal=np.eye(4, dtype=complex))
        assert report.distance_to_ideal < 1e-9

    def test_rejects_leaky_input(self, space):
        with pytest.raises(NotInLogicalSubspace):
            dyn.qcnot(space.state([0, 0, 0, 0], "x"))

    def test_norm_preserved_along_program(self, space):
        rng = np.random.default_rng(5)
        coeff = rng.normal(size=4) + 1j * rng.normal(size=4)
        coeff /= np.linalg.norm(coeff)
        psi = sum(c * v for c, v in zip(coeff, dyn.logical_basis(space, 2)))
        out = dyn.run_program(dyn.qcnot_program(), psi, space)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-9)


class TestCnot:
    def test_logical_matrix(self, space):
        report = dyn.logical_unitary_extract(dyn.cnot_program(), space,
                                             ideal=dyn.CNOT_LOGICAL)
        assert report.distance_to_ideal < 1e-9
        assert report.leakage < 1e-9

    def test_flips_target_when_control_set(self, space):
        final, _ = dyn.cnot(dyn.logical_state_2q(space, 0, 1))
        assert abs(abs(dyn.logical_state_2q(space, 1, 1).conj() @ final) - 1) < 1e-9

    def test_holds_target_when_control_clear(self, space):
        for a in (0, 1):
            final, _ = dyn.cnot(dyn.logical_state_2q(space, a, 0))
            assert abs(abs(dyn.logical_state_2q(space, a, 0).conj() @ final) - 1) < 1e-9

    def test_control_superposition_entangles(self, space):
        psi0 = (dyn.logical_state_2q(space, 0, 0)
                + dyn.logical_state_2q(space, 0, 1)) / math.sqrt(2)
        final, _ = dyn.cnot(psi0)
        rho = dyn.logical_density(final, space)
        assert dyn.concurrence(rho) == pytest.approx(1.0, abs=1e-9)


class TestPrograms:
    def test_empty_program_is_identity(self, space):
        psi = dyn.logical_state_2q(space, 1, 0)
        out = dyn.run_program(dyn.PhaseProgram(()), psi, space)
        np.testing.assert_allclose(out, psi, atol=1e-15)

    def test_hold_segments_compose(self, space):
        hold, _ = phases.standard_settings_2q("hold")
        two = dyn.PhaseProgram((dyn.Segment(hold, 0.4), dyn.Segment(hold, 0.6)))
        one = dyn.PhaseProgram((dyn.Segment(hold, 1.0),))
        psi = dyn.logical_state_2q(space, 1, 1)
        np.testing.assert_allclose(dyn.run_program(two, psi, space),
                                   dyn.run_program(one, psi, space), atol=1e-12)

    def test_mixed_settings_rejected(self):
        one_q = phases.standard_settings_1q("hold")
        two_q, _ = phases.standard_settings_2q("hold")
        with pytest.raises(ValueError):
            dyn.PhaseProgram((dyn.Segment(one_q, 1.0), dyn.Segment(two_q, 1.0)))

    def test_excitation_conserved_per_segment(self, space):
        n_op = space.excitation_number()
        psi = dyn.logical_state_2q(space, 0, 1)
        expect = [(psi.conj() @ n_op @ psi).real]
        for step in dyn.cnot_program().steps:
            psi = dyn.run_program(dyn.PhaseProgram((step,)), psi, space)
            expect.append((psi.conj() @ n_op @ psi).real)
        np.testing.assert_allclose(expect, expect[0], atol=1e-10)

    def test_pulse_raises_excitation_by_one(self, space):
        n_op = space.excitation_number()
        psi = space.vacuum("g")
        out = dyn.run_program(dyn.PhaseProgram((dyn.Pulse("x"),)), psi, space)
        assert (out.conj() @ n_op @ out).real == pytest.approx(1.0, abs=1e-12)


class TestFeeding:
    TARGETS = {"c3": [1, 0, 0, 0], "c4": [0, 1, 0, 0],
               "c5": [0, 0, 1, 0], "c6": [0, 0, 0, 1]}

    @pytest.mark.parametrize("which", ["c3", "c4", "c5", "c6"])
    def test_photon_lands_in_requested_cavity(self, space, which):
        program = dyn.feed_photon(which)
        out = dyn.run_program(program, space.vacuum("g"), space)
        target = space.state(self.TARGETS[which], "g")
        assert abs(target.conj() @ out) ** 2 > 1 - 1e-9

    def test_split_intermediate(self, space):
        """After the y pulse and a quarter splitting period: equal rails, dot in g."""
        prog = dyn.PhaseProgram(dyn.feed_photon("c3").steps[:2])
        out = dyn.run_program(prog, space.vacuum("g"), space)
        np.testing.assert_allclose(out, plus_l1(space), atol=1e-9)

    def test_phase_intermediate(self, space):
        """Then the quarter-turn phase row: (|0>_L1 + i|1>_L1)/sqrt(2)."""
        prog = dyn.PhaseProgram(dyn.feed_photon("c3").steps[:3])
        out = dyn.run_program(prog, space.vacuum("g"), space)
        expected = (space.state([0, 1, 0, 0], "g")
                    + 1j * space.state([1, 0, 0, 0], "g")) / math.sqrt(2)
        np.testing.assert_allclose(out, expected, atol=1e-9)

    def test_bad_cavity_rejected(self):
        with pytest.raises(ValueError):
            dyn.feed_photon("c7")


class TestEntangledSource:
    def test_bell_output(self, space):
        psi, _ = dyn.entangled_source(space=space)
        bell = dyn.bell_state(space)
        assert abs(bell.conj() @ psi) ** 2 > 1 - 1e-9

    def test_concurrence_and_marginals(self, space):
        psi, _ = dyn.entangled_source(space=space)
        rho = dyn.logical_density(psi, space)
        assert dyn.concurrence(rho) == pytest.approx(1.0, abs=1e-9)
        for qubit in (0, 1):
            marginal = dyn.qubit_marginal(rho, qubit)
            np.testing.assert_allclose(marginal, 0.5 * np.eye(2), atol=1e-9)

    def test_dot_returns_to_ground(self, space):
        psi, _ = dyn.entangled_source(space=space)
        assert dyn.qd_ground_population(psi, space) > 1 - 1e-9


class TestTruncationSafety:
    @pytest.mark.parametrize("builder", [
        lambda: dyn.qcnot_program(),
        lambda: dyn.cnot_program(),
        lambda: dyn.entangler_program(),
        lambda: dyn.feed_photon("c3"),
        lambda: dyn.feed_photon("c6"),
    ])
    def test_two_photon_truncation_matches(self, builder):
        """The protocols never populate doubly-occupied cavities."""
        program = builder()
        tight = two_qubit_space()
        loose = Space([("c3", 2), ("c4", 2), ("c5", 2), ("c6", 2)])
        out_tight = dyn.run_program(program, tight.vacuum("g"), tight)
        out_loose = dyn.run_program(program, loose.vacuum("g"), loose)
        amps_tight = tight.amplitude_map(out_tight, cutoff=0.0)
        amps_loose = loose.amplitude_map(out_loose, cutoff=1e-14)
        for key, amp in amps_loose.items():
            assert key in amps_tight or abs(amp) < 1e-10, key
        for key, amp in amps_tight.items():
            assert amp == pytest.approx(amps_loose.get(key, 0.0), abs=1e-10)


class TestGateReportDistance:
    def test_distance_zero_for_phased_copy(self):
        rng = np.random.default_rng(0)
        mat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(mat)
        assert dyn.phase_distance(np.exp(1j * 0.71) * q, q) < 1e-12

    def test_distance_detects_mismatch(self):
        ident = np.eye(4, dtype=complex)
        flipped = dyn.CNOT_LOGICAL
        assert dyn.phase_distance(flipped, ident) > 0.5

    def test_one_qubit_hold_extracts_identity(self):
        hold = phases.standard_settings_1q("hold")
        program = dyn.PhaseProgram((dyn.Segment(hold, 2.0),))
        report = dyn.logical_unitary_extract(program, ideal=np.eye(2, dtype=complex),
                                             qubits=1)
        assert report.matrix.shape == (2, 2)
        assert report.distance_to_ideal < 1e-12
        assert report.leakage < 1e-12

    def test_qcnot_matrix_sign_pattern(self, space):
        report = dyn.logical_unitary_extract(dyn.qcnot_program(), space)
        np.testing.assert_allclose(report.matrix, dyn.QCNOT_LOGICAL, atol=1e-9)

    def test_negative_duration_rejected(self):
        with pytest.raises(ValueError):
            dyn.Segment(phases.standard_settings_1q("hold"), -1.0)
        with pytest.raises(ValueError):
            dyn.Pulse("g")
