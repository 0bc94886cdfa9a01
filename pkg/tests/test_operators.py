import numpy as np
import pytest

from cavityesd.errors import LayoutError
from cavityesd.operators import (
    CAVITY,
    QUBIT_1,
    QUBIT_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    Operator,
    SpaceLayout,
    annihilation,
    embed,
    photon_numbers,
    qubit_basis_state,
    total_excitation,
)

LAYOUT = SpaceLayout.standard(8)

# sigma_z of each qubit written out in the fixed |dd>,|ud>,|du>,|uu> basis;
# these are the convention anchors the rest of the package inherits.
SZ1_4 = np.diag([-1.0, 1.0, -1.0, 1.0])
SZ2_4 = np.diag([-1.0, -1.0, 1.0, 1.0])


class TestBasisStates:
    def test_basis_ordering_endpoints(self):
        assert np.array_equal(qubit_basis_state(1), [1, 0, 0, 0])
        assert np.array_equal(qubit_basis_state(4), [0, 0, 0, 1])

    def test_state_two_is_qubit1_excited(self):
        v = qubit_basis_state(2)
        assert np.vdot(v, SZ1_4 @ v).real == pytest.approx(1.0, abs=1e-15)
        assert np.vdot(v, SZ2_4 @ v).real == pytest.approx(-1.0, abs=1e-15)

    def test_state_three_is_qubit2_excited(self):
        v = qubit_basis_state(3)
        assert np.vdot(v, SZ1_4 @ v).real == pytest.approx(-1.0, abs=1e-15)
        assert np.vdot(v, SZ2_4 @ v).real == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("bad", [0, 5, -1])
    def test_out_of_range_index(self, bad):
        with pytest.raises(ValueError):
            qubit_basis_state(bad)


class TestLayout:
    def test_index_round_trip(self):
        for i in range(LAYOUT.total_dim):
            assert LAYOUT.join_index(*LAYOUT.split_index(i)) == i

    def test_total_dim(self):
        assert LAYOUT.total_dim == 2 * 2 * 9
        assert LAYOUT.n_max == 8

    def test_rejects_non_qubit_factors(self):
        with pytest.raises(LayoutError):
            SpaceLayout((3, 2, 9))
        with pytest.raises(LayoutError):
            SpaceLayout.standard(0)

    def test_split_out_of_range(self):
        with pytest.raises(LayoutError):
            LAYOUT.split_index(LAYOUT.total_dim)


class TestAnnihilation:
    def test_matrix_elements_nmax2(self):
        a = annihilation(2)
        expected = np.zeros((3, 3), dtype=complex)
        expected[0, 1] = 1.0
        expected[1, 2] = np.sqrt(2.0)
        assert np.array_equal(a, expected)

    def test_kills_vacuum(self):
        a = annihilation(5)
        vac = np.zeros(6)
        vac[0] = 1.0
        assert np.all(a @ vac == 0.0)

    @pytest.mark.parametrize("n_max", [1, 2, 5, 8])
    def test_truncated_commutator(self, n_max):
        a = annihilation(n_max)
        defect = a @ a.conj().T - a.conj().T @ a - np.eye(n_max + 1)
        nz = np.argwhere(defect != 0)
        assert nz.tolist() == [[n_max, n_max]]
        assert defect[n_max, n_max] == pytest.approx(-(n_max + 1), abs=1e-12)

    def test_rejects_bad_truncation(self):
        with pytest.raises(ValueError):
            annihilation(0)


class TestEmbed:
    def test_different_slots_commute_exactly(self):
        z1 = embed(SIGMA_Z, QUBIT_1, LAYOUT).matrix
        z2 = embed(SIGMA_Z, QUBIT_2, LAYOUT).matrix
        assert np.max(np.abs(z1 @ z2 - z2 @ z1)) <= 1e-14

    def test_sigma_x_squares_to_identity(self):
        x1 = embed(SIGMA_X, QUBIT_1, LAYOUT).matrix
        assert np.array_equal(x1 @ x1, np.eye(LAYOUT.total_dim))

    def test_lowering_qubit1_action(self):
        # sigma^- on qubit 1 takes |ud>|0> to |dd>|0> with unit amplitude.
        sm1 = embed(SIGMA_MINUS, QUBIT_1, LAYOUT).matrix
        src = LAYOUT.join_index(1, 0, 0)
        dst = LAYOUT.join_index(0, 0, 0)
        column = sm1[:, src]
        assert column[dst] == 1.0
        assert np.count_nonzero(column) == 1

    def test_homomorphism_per_slot(self):
        rng = np.random.default_rng(7)
        for slot in (QUBIT_1, QUBIT_2, CAVITY):
            d = LAYOUT.factor_dims[slot]
            a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            lhs = embed(a @ b, slot, LAYOUT).matrix
            rhs = (embed(a, slot, LAYOUT) @ embed(b, slot, LAYOUT)).matrix
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(LayoutError):
            embed(np.eye(3), QUBIT_1, LAYOUT)
        with pytest.raises(LayoutError):
            embed(np.eye(2), CAVITY, LAYOUT)


class TestTotalExcitation:
    def test_diagonal_and_hermitian(self):
        n = total_excitation(LAYOUT).matrix
        assert np.array_equal(n, np.diag(np.diagonal(n)))
        assert np.array_equal(n, n.conj().T)

    def test_integer_spectrum(self):
        n = np.diagonal(total_excitation(LAYOUT).matrix).real
        assert set(np.round(n).astype(int)) == set(range(LAYOUT.n_max + 3))
        assert np.max(np.abs(n - np.round(n))) <= 1e-15

    def test_expectations(self):
        n = total_excitation(LAYOUT).matrix
        one_exc = LAYOUT.join_index(1, 0, 0)  # |ud>|0>
        assert n[one_exc, one_exc].real == pytest.approx(1.0, abs=1e-15)
        three = LAYOUT.join_index(1, 1, 1)  # |uu>|1>
        assert n[three, three].real == pytest.approx(3.0, abs=1e-15)
        ground = LAYOUT.join_index(0, 0, 0)
        assert n[ground, ground] == 0.0


class TestOperatorArithmetic:
    def test_layout_mismatch_rejected(self):
        other = SpaceLayout.standard(4)
        a = Operator(LAYOUT, np.eye(LAYOUT.total_dim))
        b = Operator(other, np.eye(other.total_dim))
        with pytest.raises(LayoutError):
            a + b
        with pytest.raises(LayoutError):
            a @ b

    def test_matrix_frozen(self):
        a = Operator(LAYOUT, np.eye(LAYOUT.total_dim))
        with pytest.raises(ValueError):
            a.matrix[0, 0] = 2.0

    def test_dagger_and_scaling(self):
        m = np.zeros((LAYOUT.total_dim, LAYOUT.total_dim), dtype=complex)
        m[0, 1] = 1.0 + 2.0j
        a = Operator(LAYOUT, m)
        assert (2.0 * a).matrix[0, 1] == 2.0 + 4.0j
        assert a.dagger().matrix[1, 0] == 1.0 - 2.0j

    def test_shape_mismatch_rejected(self):
        with pytest.raises(LayoutError):
            Operator(LAYOUT, np.eye(3))


def test_photon_numbers_follow_cavity_index():
    n = photon_numbers(LAYOUT)
    for i in range(LAYOUT.total_dim):
        assert n[i] == LAYOUT.split_index(i)[2]


def test_sigma_conventions():
    # sigma_z |up> = +|up> with the local ordering (|down>, |up>).
    up = np.array([0.0, 1.0])
    down = np.array([1.0, 0.0])
    assert np.array_equal(SIGMA_Z @ up, up)
    assert np.array_equal(SIGMA_Z @ down, -down)
    assert np.array_equal(SIGMA_PLUS @ down, up)
    assert np.array_equal(SIGMA_MINUS @ up, down)
    assert np.all(SIGMA_PLUS @ up == 0)
