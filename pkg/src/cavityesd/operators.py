"""Operators on the composite space of two qubits and one truncated cavity mode.

Basis conventions, fixed once here and inherited by every other module:

* Each qubit has the local basis (|down>, |up>) and sigma_z|up> = +|up>,
  so the excited state carries the positive free energy.
* The two-qubit product basis is enumerated |dd>, |ud>, |du>, |uu>
  (first arrow = qubit 1), i.e. the qubit-1 index varies *faster* than
  the qubit-2 index.
* The cavity Fock index n = 0..n_max is the fastest index overall.  A
  composite basis index therefore decomposes as

      i = (i2 * 2 + i1) * (n_max + 1) + n.

With this enumeration the leading 4x4 block structure of any cavity-traced
quantity lands directly in the |dd>,|ud>,|du>,|uu> order used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import LayoutError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |up><down|
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |down><up|

#: Slot numbers accepted by :func:`embed`.
QUBIT_1, QUBIT_2, CAVITY = 0, 1, 2

# Kronecker position (slowest factor first) of each logical slot.  Qubit 1
# varies faster than qubit 2 so that the composite enumeration matches the
# |dd>,|ud>,|du>,|uu> block order documented above.
_KRON_POSITION = {QUBIT_1: 1, QUBIT_2: 0, CAVITY: 2}


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor-factor dimensions (qubit 1, qubit 2, cavity)."""

    factor_dims: tuple[int, int, int]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        object.__setattr__(self, "factor_dims", dims)
        if len(dims) != 3:
            raise LayoutError(f"expected 3 tensor factors, got {len(dims)}")
        if dims[0] != 2 or dims[1] != 2:
            raise LayoutError(f"the first two factors must be qubits, got dims {dims}")
        if dims[2] < 2:
            raise LayoutError("cavity factor needs at least the |0> and |1> levels")

    @classmethod
    def standard(cls, n_max: int) -> "SpaceLayout":
        """Layout for two qubits and a cavity truncated at ``n_max`` photons."""
        if n_max < 1:
            raise LayoutError(f"n_max must be >= 1, got {n_max}")
        return cls((2, 2, n_max + 1))

    @property
    def total_dim(self) -> int:
        return prod(self.factor_dims)

    @property
    def cavity_dim(self) -> int:
        return self.factor_dims[2]

    @property
    def n_max(self) -> int:
        return self.factor_dims[2] - 1

    def split_index(self, i: int) -> tuple[int, int, int]:
        """Decompose a composite basis index into (i1, i2, n)."""
        if not 0 <= i < self.total_dim:
            raise LayoutError(f"index {i} outside composite dimension {self.total_dim}")
        n = i % self.cavity_dim
        pair = i // self.cavity_dim
        return pair % 2, pair // 2, n

    def join_index(self, i1: int, i2: int, n: int) -> int:
        """Inverse of :meth:`split_index`."""
        if i1 not in (0, 1) or i2 not in (0, 1) or not 0 <= n < self.cavity_dim:
            raise LayoutError(f"factor indices ({i1}, {i2}, {n}) out of range")
        return (i2 * 2 + i1) * self.cavity_dim + n


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with the layout it acts on.

    The matrix is frozen (read-only) after construction; all arithmetic
    returns new operators and requires identical layouts on both sides.
    """

    layout: SpaceLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, order="C")
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise LayoutError(f"matrix shape {m.shape} does not match layout dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def _check_layout(self, other: "Operator") -> None:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.layout != self.layout:
            raise LayoutError("operators live on different layouts")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_layout(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_layout(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_layout(other)
        return Operator(self.layout, self.matrix @ other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix)

    def dagger(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)


def qubit_basis_state(index: int) -> np.ndarray:
    """Two-qubit product basis vector for ``index`` in 1..4.

    The enumeration is |1>=|dd>, |2>=|ud>, |3>=|du>, |4>=|uu|, where the
    first arrow is qubit 1 and "u" is the excited state.
    """
    if index not in (1, 2, 3, 4):
        raise ValueError(f"basis index must be 1..4, got {index}")
    v = np.zeros(4, dtype=complex)
    v[index - 1] = 1.0
    return v


def annihilation(n_max: int) -> np.ndarray:
    """Single-factor cavity annihilation matrix of side ``n_max + 1``.

    Entries a[n-1, n] = sqrt(n); the creation operator is the conjugate
    transpose.  The truncation leaves [a, a+] - 1 with a single nonzero
    entry -(n_max + 1) at (n_max, n_max).
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def embed(op: np.ndarray, slot: int, layout: SpaceLayout) -> Operator:
    """Lift a single-factor matrix to the composite space.

    ``slot`` selects the factor (QUBIT_1, QUBIT_2 or CAVITY); the result is
    the identity on every other factor.
    """
    op = np.asarray(op, dtype=complex)
    if slot not in (QUBIT_1, QUBIT_2, CAVITY):
        raise LayoutError(f"slot must be 0, 1 or 2, got {slot}")
    d = layout.factor_dims[slot]
    if op.shape != (d, d):
        raise LayoutError(f"operator shape {op.shape} does not fit factor of dimension {d}")
    factors = [np.eye(layout.factor_dims[s], dtype=complex) for s in (QUBIT_2, QUBIT_1, CAVITY)]
    factors[_KRON_POSITION[slot]] = op
    return Operator(layout, np.kron(np.kron(factors[0], factors[1]), factors[2]))


def qubit_excitation(layout: SpaceLayout, slot: int) -> Operator:
    """Projector onto the excited state of one qubit, on the full space."""
    return embed(np.diag([0.0, 1.0]), slot, layout)


def cavity_annihilation(layout: SpaceLayout) -> Operator:
    """The cavity annihilation operator lifted to the composite space."""
    return embed(annihilation(layout.n_max), CAVITY, layout)


def photon_numbers(layout: SpaceLayout) -> np.ndarray:
    """Photon number of every composite basis state, as a real vector."""
    return np.tile(np.arange(layout.cavity_dim, dtype=float), 4)


def total_excitation(layout: SpaceLayout) -> Operator:
    """Total excitation number: qubit excitations plus cavity photons.

    Diagonal in the product basis with integer spectrum 0..n_max+2; the
    excitation-conserving dynamics commutes with it.  The photon part is the
    exact integer diagonal of a+a (forming the product would smear the
    integers by an ulp through the stored square roots).
    """
    number = np.diag(np.arange(layout.cavity_dim, dtype=float))
    return (
        qubit_excitation(layout, QUBIT_1)
        + qubit_excitation(layout, QUBIT_2)
        + embed(number, CAVITY, layout)
    )
