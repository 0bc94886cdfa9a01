import math

import numpy as np
import pytest

from cavityesd.entanglement import QubitState, partial_trace_cavity
from cavityesd.errors import ValidationError
from cavityesd.evolution import FullState
from cavityesd.model import (
    Mode,
    SystemConfig,
    build_hamiltonian,
    coupling_constants,
    initial_state,
    standing_wave_pair,
)
from cavityesd.operators import total_excitation


def cfg(**kw) -> SystemConfig:
    return SystemConfig(**{"n_max": 6, **kw})


class TestCouplings:
    def test_antinode_gives_peak(self):
        pair = coupling_constants(cfg(L=0.5, d=0.0, g0=0.7))
        assert pair.g1 == pytest.approx(0.7, abs=1e-15)
        assert pair.g2 == pytest.approx(0.7, abs=1e-15)

    def test_zero_at_d_equals_L(self):
        pair = coupling_constants(cfg(L=0.5, d=0.5, g0=1.0))
        assert abs(pair.g1) <= 1e-15
        assert abs(pair.g2) <= 1e-15

    def test_quarter_wavelength_split(self):
        pair = coupling_constants(cfg(L=0.5, d=0.25, g0=1.0))
        assert pair.g1 == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert pair.g2 == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    def test_sign_flip_swaps_couplings(self):
        # The raw formula is checked directly: the config forbids d < 0.
        for L, d in [(0.5, 0.1), (1.0, 0.3), (0.7, 0.62)]:
            g1, g2 = standing_wave_pair(1.3, L, d, 1.0)
            g1m, g2m = standing_wave_pair(1.3, L, -d, 1.0)
            assert g1m == pytest.approx(g2, abs=1e-15)
            assert g2m == pytest.approx(g1, abs=1e-15)

    def test_bounded_by_peak_and_symmetric_at_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            L = rng.uniform(0.1, 2.0)
            d = rng.uniform(0.0, L)
            pair = coupling_constants(cfg(L=L, d=d, g0=2.0))
            assert abs(pair.g1) <= 2.0 + 1e-12
            assert abs(pair.g2) <= 2.0 + 1e-12
        pair = coupling_constants(cfg(L=0.8, d=0.0, g0=2.0))
        assert pair.g1 == pair.g2


class TestConfigValidation:
    def test_defaults_validate(self):
        SystemConfig().validate()

    @pytest.mark.parametrize(
        "changes",
        [
            {"d": 0.6, "L": 0.5},
            {"d": -0.1},
            {"L": 0.0},
            {"lam": -1.0},
            {"omega0": 0.0},
            {"g0": -0.5},
            {"kappa": -0.1},
            {"dt": 0.0},
            {"t_end": -1.0},
            {"sample_every": 0},
            {"kind": "w"},
            {"n_max": 2, "mode": Mode.NONRWA},
            {"n_max": 0, "mode": Mode.RWA},
        ],
    )
    def test_invalid_configs_rejected(self, changes):
        with pytest.raises(ValidationError):
            SystemConfig(**changes).validate()

    def test_rwa_allows_small_truncation(self):
        SystemConfig(n_max=1, mode=Mode.RWA).validate()

    def test_mode_parse(self):
        assert Mode.parse("RWA") is Mode.RWA
        assert Mode.parse(" nonrwa ") is Mode.NONRWA
        with pytest.raises(ValidationError):
            Mode.parse("full")


class TestHamiltonian:
    @pytest.mark.parametrize("mode", [Mode.RWA, Mode.NONRWA])
    def test_hermitian(self, mode):
        h = build_hamiltonian(cfg(mode=mode, d=0.12)).matrix
        assert np.max(np.abs(h - h.conj().T)) <= 1e-14

    def test_rwa_conserves_excitation(self):
        config = cfg(mode=Mode.RWA)
        h = build_hamiltonian(config).matrix
        n = total_excitation(config.layout()).matrix
        assert np.max(np.abs(h @ n - n @ h)) <= 1e-13

    def test_counter_rotating_matrix_element(self):
        # <uu,1|H|ud,0> is the two-excitation pathway raising qubit 2 while
        # creating a photon; its weight is the qubit-2 coupling.
        config = cfg(mode=Mode.NONRWA, d=0.1, L=0.7)
        layout = config.layout()
        h = build_hamiltonian(config).matrix
        g2 = coupling_constants(config).g2
        i = layout.join_index(1, 1, 1)
        j = layout.join_index(1, 0, 0)
        assert h[i, j] == pytest.approx(g2, abs=1e-14)

    def test_counter_rotating_terms_are_the_difference(self):
        config_n = cfg(mode=Mode.NONRWA, d=0.2, L=0.6)
        config_r = config_n.replace(mode=Mode.RWA)
        layout = config_n.layout()
        diff = build_hamiltonian(config_n).matrix - build_hamiltonian(config_r).matrix
        ground = np.zeros(layout.total_dim, dtype=complex)
        ground[layout.join_index(0, 0, 0)] = 1.0
        image = diff @ ground
        pair = coupling_constants(config_n)
        expected = np.zeros_like(image)
        expected[layout.join_index(1, 0, 1)] = pair.g1  # |ud>|1>
        expected[layout.join_index(0, 1, 1)] = pair.g2  # |du>|1>
        assert np.max(np.abs(image - expected)) <= 1e-14

    def test_modes_agree_on_excitation_conserving_block(self):
        config = cfg(mode=Mode.NONRWA, d=0.15)
        layout = config.layout()
        h_n = build_hamiltonian(config).matrix
        h_r = build_hamiltonian(config.replace(mode=Mode.RWA)).matrix
        n = np.diagonal(total_excitation(layout).matrix).real
        same_n = np.abs(n[:, None] - n[None, :]) < 0.5
        assert np.max(np.abs((h_n - h_r)[same_n])) <= 1e-14

    @pytest.mark.parametrize("mode", [Mode.RWA, Mode.NONRWA])
    def test_real_spectrum(self, mode):
        h = build_hamiltonian(cfg(mode=mode)).matrix
        eigs = np.linalg.eigvals(h)
        assert np.max(np.abs(eigs.imag)) <= 1e-12

    def test_invalid_config_rejected(self):
        with pytest.raises(ValidationError):
            build_hamiltonian(cfg(d=2.0))


class TestInitialState:
    @pytest.mark.parametrize(
        "kind,entries",
        [
            ("s", {(1, 1): 0.5, (2, 2): 0.5, (1, 2): 0.5, (2, 1): 0.5}),
            ("a", {(1, 1): 0.5, (2, 2): 0.5, (1, 2): -0.5, (2, 1): -0.5}),
            ("alpha", {(0, 0): 0.5, (3, 3): 0.5, (0, 3): 0.5, (3, 0): 0.5}),
            ("beta", {(0, 0): 0.5, (3, 3): 0.5, (0, 3): -0.5, (3, 0): -0.5}),
        ],
    )
    def test_reduced_matrix_entries(self, kind, entries):
        layout = cfg().layout()
        rho = initial_state(kind, layout)
        reduced = partial_trace_cavity(FullState(layout, rho)).rho4
        expected = np.zeros((4, 4), dtype=complex)
        for (i, j), value in entries.items():
            expected[i, j] = value
        assert np.max(np.abs(reduced - expected)) <= 1e-15

    def test_pure_and_normalized(self):
        layout = cfg().layout()
        rho = initial_state("s", layout)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)
        eigs = np.linalg.eigvalsh(rho)
        assert eigs[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(eigs[:-1])) <= 1e-12

    def test_cavity_in_vacuum(self):
        layout = cfg().layout()
        rho = initial_state("s", layout)
        m = layout.cavity_dim
        cavity_pop = np.diagonal(rho).real.reshape(4, m).sum(axis=0)
        assert cavity_pop[0] == pytest.approx(1.0, abs=1e-14)
        assert np.max(cavity_pop[1:]) <= 1e-15

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            initial_state("sigma", cfg().layout())


def test_qubitstate_type_guard():
    with pytest.raises(ValidationError):
        QubitState(np.eye(4) / 2.0).validate()  # trace 2
