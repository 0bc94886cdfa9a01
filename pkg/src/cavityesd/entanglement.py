"""Reduced two-qubit states and concurrence by three equivalent routes.

The headline measure is the Wootters concurrence of the cavity-traced
two-qubit state.  Two closed forms are computed alongside it: the
block-form expression 2|rho23| - 2 sqrt(rho11 rho44), exact on states whose
only coherence sits between |ud> and |du>, and the same quantity rewritten
in the Bell basis.  On states that also develop a |dd><uu| coherence the
block form is a lower bound, so both values are recorded wherever
trajectories are sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LayoutError, NumericalDomainError, ValidationError
from .operators import SIGMA_Y

#: Bell-state labels: spin anti-correlated (s, a) and spin correlated (alpha, beta).
BELL_KINDS = ("s", "a", "alpha", "beta")

_SQRT_HALF = 1.0 / math.sqrt(2.0)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


def bell_state_vector(kind: str) -> np.ndarray:
    """Bell state as a two-qubit vector in the |dd>,|ud>,|du>,|uu> basis."""
    if kind == "s":
        v = (0.0, 1.0, 1.0, 0.0)
    elif kind == "a":
        v = (0.0, 1.0, -1.0, 0.0)
    elif kind == "alpha":
        v = (1.0, 0.0, 0.0, 1.0)
    elif kind == "beta":
        v = (-1.0, 0.0, 0.0, 1.0)
    else:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}")
    return np.array(v, dtype=complex) * _SQRT_HALF

# Rows are <s|, <a|, <alpha|, <beta| in the product basis.
BELL_TRANSFORM = np.array([bell_state_vector(k).conj() for k in BELL_KINDS])

_YY = np.kron(SIGMA_Y, SIGMA_Y)


def _validate_density_matrix(rho: np.ndarray, name: str) -> None:
    if rho.shape != (4, 4):
        raise ValidationError(f"{name} must be 4x4, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > HERMITICITY_TOL:
        raise ValidationError(f"{name} is not Hermitian: max asymmetry {herm:.3e}")
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > TRACE_TOL:
        raise ValidationError(f"{name} trace deviates from 1 by {trace_err:.3e}")
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
    if min_eig < -POSITIVITY_TOL:
        raise ValidationError(f"{name} has negative eigenvalue {min_eig:.3e}")


@dataclass(frozen=True)
class QubitState:
    """Reduced two-qubit density matrix in the |dd>,|ud>,|du>,|uu> basis."""

    rho4: np.ndarray

    def __post_init__(self):
        m = np.array(self.rho4, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "rho4", m)

    def validate(self) -> None:
        _validate_density_matrix(self.rho4, "two-qubit state")


@dataclass(frozen=True)
class BellState:
    """The same density matrix expressed in the |s>,|a>,|alpha>,|beta> basis."""

    rho_bell: np.ndarray

    def __post_init__(self):
        m = np.array(self.rho_bell, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "rho_bell", m)

    def validate(self) -> None:
        _validate_density_matrix(self.rho_bell, "Bell-basis state")


def reduce_to_qubits(rho: np.ndarray, cavity_dim: int) -> np.ndarray:
    """Trace the cavity factor out of a full-space density matrix."""
    r = rho.reshape(4, cavity_dim, 4, cavity_dim)
    return np.einsum("anbn->ab", r)


def partial_trace_cavity(state) -> QubitState:
    """Reduce a :class:`~cavityesd.evolution.FullState` to its two-qubit state."""
    layout = state.layout
    d = layout.total_dim
    if state.rho.shape != (d, d):
        raise LayoutError(f"state matrix shape {state.rho.shape} does not match layout")
    return QubitState(reduce_to_qubits(state.rho, layout.cavity_dim))


def _wootters_value(rho4: np.ndarray) -> float:
    rho_tilde = _YY @ rho4.conj() @ _YY
    lam = np.linalg.eigvals(rho4 @ rho_tilde)
    # Eigenvalues are nonnegative in exact arithmetic; magnitudes absorb the
    # rounding-level imaginary parts and sign noise.
    s = np.sqrt(np.sort(np.abs(lam))[::-1])
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def _block_value(rho4: np.ndarray) -> float:
    r11 = max(rho4[0, 0].real, 0.0)
    r44 = max(rho4[3, 3].real, 0.0)
    return max(0.0, 2.0 * abs(rho4[1, 2]) - 2.0 * math.sqrt(r11 * r44))


def _bell_value(rho_bell: np.ndarray) -> float:
    anti = (rho_bell[0, 0] - rho_bell[1, 1]) ** 2 - (rho_bell[0, 1] - rho_bell[1, 0]) ** 2
    corr = (rho_bell[2, 2] + rho_bell[3, 3]) ** 2 - (rho_bell[2, 3] + rho_bell[3, 2]) ** 2
    score = 0.0
    for radicand in (anti.real, corr.real):
        if radicand < -1e-12:
            raise NumericalDomainError(f"negative radicand {radicand:.3e} in Bell-basis concurrence")
    score = math.sqrt(max(anti.real, 0.0)) - math.sqrt(max(corr.real, 0.0))
    return max(0.0, score)


def concurrence_wootters(q: QubitState) -> float:
    """Wootters concurrence: max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)).

    The l_i are the descending eigenvalues of rho (sy x sy) rho* (sy x sy),
    with conjugation taken in the fixed product basis.
    """
    if not isinstance(q, QubitState):
        raise TypeError(f"expected QubitState, got {type(q).__name__}")
    q.validate()
    return _wootters_value(q.rho4)


def concurrence_block(q: QubitState) -> float:
    """Block closed form max(0, 2|rho23| - 2 sqrt(rho11 rho44)).

    Uses only those four entries, so on states with a nonzero |dd><uu|
    coherence it is a lower bound on the Wootters value.
    """
    if not isinstance(q, QubitState):
        raise TypeError(f"expected QubitState, got {type(q).__name__}")
    q.validate()
    return _block_value(q.rho4)


def bell_transform(q: QubitState) -> BellState:
    """Rewrite a two-qubit state in the Bell basis (a fixed unitary rotation)."""
    if not isinstance(q, QubitState):
        raise TypeError(f"expected QubitState, got {type(q).__name__}")
    q.validate()
    return BellState(BELL_TRANSFORM @ q.rho4 @ BELL_TRANSFORM.conj().T)


def concurrence_bell(b: BellState) -> float:
    """The block closed form evaluated from Bell-basis matrix elements.

    Algebraically identical to :func:`concurrence_block`; a radicand below
    -1e-12 signals a corrupted input and raises.
    """
    if not isinstance(b, BellState):
        raise TypeError(f"expected BellState, got {type(b).__name__}")
    b.validate()
    return _bell_value(b.rho_bell)
