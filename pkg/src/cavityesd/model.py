"""Physical configuration, standing-wave couplings, and the two Hamiltonians.

Units: hbar = 1, frequencies and rates in units of the cavity frequency
omega (so omega = 1 by default), lengths in units of the cavity wavelength
lambda, times in units of 1/omega.  Config files and figure-style captions
then share the same numbers literally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .entanglement import BELL_KINDS, bell_state_vector
from .errors import ValidationError
from .operators import (
    CAVITY,
    QUBIT_1,
    QUBIT_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    Operator,
    SpaceLayout,
    annihilation,
    embed,
)


class Mode(enum.Enum):
    """Interaction treatment: full coupling or rotating-wave approximation."""

    RWA = "rwa"
    NONRWA = "nonrwa"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        key = str(text).strip().lower()
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValidationError(f"mode must be 'rwa' or 'nonrwa', got {text!r}")


#: Default Fock truncation.  At the strong-coupling defaults (g0 = omega) the
#: counter-rotating terms swing the cavity through a photon-number peak near
#: 11 with occupation reaching n ~ 30, so the truncation must sit far above
#: it; this value is set by the convergence audit (deviation to n_max+4
#: below 1e-6 over the default time window).
DEFAULT_N_MAX = 44


@dataclass(frozen=True)
class SystemConfig:
    """All physical and numerical parameters of a run.

    Attributes mirror the config-file keys; see the module docstring for
    units.  ``lam`` is the cavity wavelength (config key ``lambda``).
    """

    omega: float = 1.0
    omega0: float = 0.99
    g0: float = 1.0
    kappa: float = 0.1
    L: float = 0.5
    lam: float = 1.0
    d: float = 0.0
    n_max: int = DEFAULT_N_MAX
    mode: Mode = Mode.NONRWA
    kind: str = "s"
    dt: float = 1e-3
    t_end: float = 20.0
    sample_every: int = 10

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first violated invariant."""
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")
        if not self.L > 0:
            raise ValidationError(f"L must be positive, got {self.L}")
        if not 0 <= self.d <= self.L:
            raise ValidationError(f"d must lie in [0, L] = [0, {self.L}], got {self.d}")
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        if not self.omega0 > 0:
            raise ValidationError(f"omega0 must be positive, got {self.omega0}")
        if self.g0 < 0:
            raise ValidationError(f"g0 must be nonnegative, got {self.g0}")
        if self.kappa < 0:
            raise ValidationError(f"kappa must be nonnegative, got {self.kappa}")
        if not isinstance(self.mode, Mode):
            raise ValidationError(f"mode must be a Mode, got {self.mode!r}")
        min_n = 1 if self.mode is Mode.RWA else 3
        if self.n_max < min_n:
            raise ValidationError(
                f"n_max must be >= {min_n} in {self.mode.value} mode, got {self.n_max}"
            )
        if self.kind not in BELL_KINDS:
            raise ValidationError(f"kind must be one of {BELL_KINDS}, got {self.kind!r}")
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValidationError(f"t_end must be positive, got {self.t_end}")
        if round(self.t_end / self.dt) < 1:
            raise ValidationError(f"t_end = {self.t_end} shorter than one step dt = {self.dt}")
        if self.sample_every < 1:
            raise ValidationError(f"sample_every must be >= 1, got {self.sample_every}")

    def layout(self) -> SpaceLayout:
        return SpaceLayout.standard(self.n_max)

    def replace(self, **changes) -> "SystemConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class CouplingPair:
    """Per-qubit couplings for qubits placed symmetrically about the antinode."""

    g1: float
    g2: float


def standing_wave_pair(g0: float, L: float, d: float, lam: float) -> tuple[float, float]:
    """Raw standing-wave couplings g0*sin(pi*(L -+ d)/lambda).

    Exposed separately from :func:`coupling_constants` so the d -> -d swap
    symmetry can be exercised outside the validated 0 <= d <= L domain.
    """
    g1 = g0 * math.sin(math.pi * (L - d) / lam)
    g2 = g0 * math.sin(math.pi * (L + d) / lam)
    return g1, g2


def coupling_constants(config: SystemConfig) -> CouplingPair:
    """Couplings of the two qubits at distance d about the cavity antinode."""
    config.validate()
    return CouplingPair(*standing_wave_pair(config.g0, config.L, config.d, config.lam))


def build_hamiltonian(config: SystemConfig) -> Operator:
    """Assemble the system Hamiltonian for the configured interaction mode.

    The free part 0.5*omega0*(sz1 + sz2) + omega*n is common; the coupling
    is g_j*sx_j*(a + a+) per qubit in full mode and its excitation-conserving
    half g_j*(sm_j a+ + a sp_j) under the rotating-wave approximation.
    Couplings from the standing-wave geometry are real, but the conjugate is
    kept where it belongs.
    """
    config.validate()
    layout = config.layout()
    a = embed(annihilation(config.n_max), CAVITY, layout)
    a_dag = a.dagger()
    h = 0.5 * config.omega0 * (embed(SIGMA_Z, QUBIT_1, layout) + embed(SIGMA_Z, QUBIT_2, layout))
    h = h + config.omega * (a_dag @ a)
    pair = coupling_constants(config)
    for g, slot in ((pair.g1, QUBIT_1), (pair.g2, QUBIT_2)):
        if config.mode is Mode.NONRWA:
            sx = embed(SIGMA_PLUS + SIGMA_MINUS, slot, layout)
            h = h + g * (sx @ a_dag) + np.conj(g) * (a @ sx)
        else:
            h = h + g * (embed(SIGMA_MINUS, slot, layout) @ a_dag)
            h = h + np.conj(g) * (a @ embed(SIGMA_PLUS, slot, layout))
    return h


def initial_state(kind: str, layout: SpaceLayout) -> np.ndarray:
    """Pure initial density matrix: Bell state ``kind`` with the cavity in vacuum."""
    psi_qubits = bell_state_vector(kind)
    vacuum = np.zeros(layout.cavity_dim, dtype=complex)
    vacuum[0] = 1.0
    psi = np.kron(psi_qubits, vacuum)
    return np.outer(psi, psi.conj())
