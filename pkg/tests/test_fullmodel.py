import math

import numpy as np
import pytest

from cavitylink import fullmodel as fm
from cavitylink.errors import ValidityViolated
from cavitylink.phases import effective_params_1q, standard_settings_1q

PI = math.pi


def simple_config(**overrides):
    base = dict(gamma_1=1.0, gamma_2=1.0, tau_m1=0.1, tau_m2=0.1, tau_12=0.4,
                delta_1=0.0, delta_2=0.0, omega_c1=0.0, omega_c2=0.0)
    base.update(overrides)
    return fm.CmtConfig(**base)


class TestModeComb:
    def test_plain_comb(self):
        cfg = fm.FullModelConfig(cmt=simple_config(tau_m1=0.1, tau_m2=0.1, tau_12=0.4),
                                 lam_min=-2, lam_max=2)
        # tau_p = 1, delta = 0 -> frequencies 2*pi*lam
        np.testing.assert_allclose(fm.fp_frequencies(cfg),
                                   2 * PI * np.arange(-2, 3), atol=1e-12)

    def test_mirror_phase_shift(self):
        cfg = fm.FullModelConfig(cmt=simple_config(delta_1=PI / 2, delta_2=PI / 2),
                                 lam_min=0, lam_max=3)
        np.testing.assert_allclose(fm.fp_frequencies(cfg),
                                   2 * PI * np.arange(4) - PI, atol=1e-12)

    def test_spacing(self):
        cfg = fm.FullModelConfig(cmt=simple_config(tau_m1=0.2, tau_m2=0.2, tau_12=0.8),
                                 lam_min=5, lam_max=25)
        freqs = fm.fp_frequencies(cfg)
        np.testing.assert_allclose(np.diff(freqs), 2 * PI / 2.0, atol=1e-12)


class TestCouplings:
    def test_direction_magnitudes_equal(self):
        cfg = fm.FullModelConfig(cmt=simple_config(gamma_1=2.0, gamma_2=0.5),
                                 lam_min=1, lam_max=40)
        for cavity, gamma in ((1, 2.0), (2, 0.5)):
            for lam in (3, 17, 40):
                g_l, g_r = fm.coupling_constants(cfg, cavity, lam)
                assert abs(g_l) == pytest.approx(math.sqrt(gamma / cfg.cmt.tau_p), rel=1e-12)
                assert abs(g_r) == pytest.approx(abs(g_l), rel=1e-12)

    def test_phase_relations(self):
        cfg = fm.FullModelConfig(cmt=simple_config(delta_2=0.7, tau_m2=0.15, tau_m1=0.05),
                                 lam_min=2, lam_max=30, phi0=0.3)
        for lam in (2, 11, 30):
            omega = fm.fp_frequencies(fm.FullModelConfig(cfg.cmt, lam, lam))[0]
            g1l, g1r = fm.coupling_constants(cfg, 1, lam)
            g2l, g2r = fm.coupling_constants(cfg, 2, lam)
            d2 = np.angle(g2l) - np.angle(g2r)
            assert math.remainder(d2 - (omega * cfg.cmt.tau_m2 + cfg.cmt.delta_2),
                                  2 * PI) == pytest.approx(0.0, abs=1e-9)
            d12 = np.angle(g1l) - np.angle(g2l)
            d21 = np.angle(g2r) - np.angle(g1r)
            assert math.remainder(d12 - omega * cfg.cmt.tau_12, 2 * PI) == pytest.approx(0.0, abs=1e-9)
            assert math.remainder(d21 - omega * cfg.cmt.tau_12, 2 * PI) == pytest.approx(0.0, abs=1e-9)

    def test_sum_matches_components(self):
        cfg = fm.FullModelConfig(cmt=simple_config(), lam_min=0, lam_max=10)
        sums = fm.coupling_sums(cfg)
        for col, lam in enumerate(range(0, 11)):
            g_l, g_r = fm.coupling_constants(cfg, 1, lam)
            assert sums[0, col] == pytest.approx(g_l + g_r, rel=1e-12)


class TestHamiltonian:
    def test_shape_and_hermiticity(self):
        cfg = fm.FullModelConfig(cmt=simple_config(), lam_min=-5, lam_max=5)
        h = fm.single_excitation_hamiltonian(cfg)
        assert h.shape == (13, 13)
        assert np.max(np.abs(h - h.conj().T)) < 1e-14

    def test_diagonal(self):
        cfg = fm.FullModelConfig(cmt=simple_config(omega_c1=1.5, omega_c2=-0.5),
                                 lam_min=0, lam_max=4)
        h = fm.single_excitation_hamiltonian(cfg)
        assert h[0, 0] == pytest.approx(1.5)
        assert h[1, 1] == pytest.approx(-0.5)
        np.testing.assert_allclose(np.diag(h)[2:].real, fm.fp_frequencies(cfg), atol=1e-12)

    def test_norm_conserved(self):
        settings = standard_settings_1q("rabi")
        cfg, omega0 = fm.full_config_from_settings(settings, n_modes=51)
        h = fm.single_excitation_hamiltonian(cfg, frame_omega=omega0)
        psi0 = np.zeros(h.shape[0], dtype=complex)
        psi0[0] = 1.0
        amps = fm.evolve_amplitudes(h, psi0, np.linspace(0, 4.0, 200))
        norms = np.sum(np.abs(amps) ** 2, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)


class TestSettingsRealization:
    def test_carrier_phases_match_settings(self):
        settings = standard_settings_1q("phase")
        cfg, omega0 = fm.network_from_settings(settings)
        assert math.remainder(omega0 * cfg.tau_12 - settings.theta_12,
                              2 * PI) == pytest.approx(0.0, abs=1e-9)
        assert (omega0 * cfg.tau_m1 + cfg.delta_1) == pytest.approx(settings.theta_m1, abs=1e-9)
        assert (omega0 * cfg.tau_m2 + cfg.delta_2) == pytest.approx(settings.theta_m2, abs=1e-9)

    def test_carrier_mid_gap_for_canonical_rows(self):
        for name in ("hold", "rabi", "phase"):
            cfg, omega0 = fm.network_from_settings(standard_settings_1q(name))
            frac = (omega0 * cfg.tau_p + cfg.delta) / (2 * PI) % 1.0
            assert frac == pytest.approx(0.5, abs=1e-9)

    def test_window_straddles_carrier(self):
        cfg, omega0 = fm.full_config_from_settings(standard_settings_1q("rabi"), n_modes=101)
        freqs = fm.fp_frequencies(cfg)
        assert np.sum(freqs < omega0) >= 3
        assert np.sum(freqs > omega0) >= 3
        cfg.validate_window(omega0)

    def test_tiny_window_rejected(self):
        cfg, omega0 = fm.network_from_settings(standard_settings_1q("rabi"))
        lam_min, lam_max = fm.window_around(cfg, omega0, 4)
        small = fm.FullModelConfig(cmt=cfg, lam_min=lam_min, lam_max=lam_max)
        with pytest.raises(ValidityViolated):
            small.validate_window(omega0)


class TestEffectiveAgreement:
    def test_exchange_rate_within_5_percent(self):
        rep = fm.compare_effective(standard_settings_1q("rabi"),
                                   tau_p_gamma=0.01, n_modes=101)
        g12 = effective_params_1q(standard_settings_1q("rabi")).g12_eff
        assert rep.rabi_rel_error < 0.05
        assert rep.rabi_frequency == pytest.approx(2 * g12, rel=0.05)

    def test_leakage_scales_with_round_trip(self):
        leaks = [fm.compare_effective(standard_settings_1q("rabi"),
                                      tau_p_gamma=tp, n_modes=201).mean_fp_leakage
                 for tp in (0.02, 0.01, 0.005)]
        assert leaks[0] > leaks[1] > leaks[2]
        assert leaks[0] / leaks[1] == pytest.approx(2.0, rel=0.1)
        assert leaks[1] / leaks[2] == pytest.approx(2.0, rel=0.1)

    def test_hold_retention(self):
        rep = fm.compare_effective(standard_settings_1q("hold"),
                                   tau_p_gamma=0.01, n_modes=101)
        assert rep.hold_retention > 0.99
        assert rep.peak_fp_leakage < 1e-2

    def test_negative_control_fails_bound(self):
        rep = fm.compare_effective(standard_settings_1q("rabi"),
                                   tau_p_gamma=0.5, n_modes=101, strict=False)
        assert rep.rabi_rel_error > 0.05

    def test_strict_mode_rejects_long_round_trip(self):
        with pytest.raises(ValidityViolated):
            fm.compare_effective(standard_settings_1q("rabi"), tau_p_gamma=0.5)

    def test_window_doubling_stability(self):
        base = fm.compare_effective(standard_settings_1q("rabi"), n_modes=101)
        doubled = fm.compare_effective(standard_settings_1q("rabi"), n_modes=201)
        shift = abs(base.rabi_frequency - doubled.rabi_frequency) / doubled.rabi_frequency
        assert shift < 5e-3

    def test_gauge_phase_is_unobservable(self):
        base = fm.compare_effective(standard_settings_1q("rabi"), n_modes=101, phi0=0.0)
        rotated = fm.compare_effective(standard_settings_1q("rabi"), n_modes=101, phi0=1.234)
        assert abs(base.rabi_frequency - rotated.rabi_frequency) < 1e-10
        assert abs(base.peak_fp_leakage - rotated.peak_fp_leakage) < 1e-10

    def test_detuning_error_small(self):
        rep = fm.compare_effective(standard_settings_1q("phase"),
                                   tau_p_gamma=0.01, n_modes=101)
        # dressed eigenvalues match the reduced 2x2 block at the tau_p*Gamma scale
        assert rep.detuning_error < 5e-2
