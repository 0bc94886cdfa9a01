"""Master-equation integration and trajectory sampling.

The generator is the cavity-loss Lindblad equation

    d rho / dt = -i [H, rho] - kappa/2 (n rho + rho n - 2 a rho a+),

integrated with fixed-step classical RK4.  The density matrix is propagated
directly (no superoperator vectorization) and is never re-Hermitized or
clamped: trace error, Hermiticity defect and the minimum eigenvalue are
recorded at every sample, and the run aborts loudly when trace or
positivity drifts past the failure thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .entanglement import _block_value, _wootters_value, reduce_to_qubits
from .errors import IntegrationError, LayoutError, ValidationError
from .model import SystemConfig, build_hamiltonian
from .operators import Operator, SpaceLayout, photon_numbers

#: Sample-level invariant tolerances: drift beyond these aborts the run.
TRACE_ABORT = 1e-6
EIGENVALUE_ABORT = -1e-6

#: State tolerances an initial condition must satisfy.
TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = -1e-8


@dataclass
class FullState:
    """Density operator of the qubits-plus-cavity system at one instant."""

    layout: SpaceLayout
    rho: np.ndarray
    t: float = 0.0

    def diagnostics(self) -> tuple[float, float, float]:
        """(trace error, Hermiticity defect, minimum eigenvalue) of ``rho``."""
        trace_err = float(abs(np.trace(self.rho) - 1.0))
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        min_eig = float(np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2.0)[0])
        return trace_err, herm, min_eig

    def validate(self) -> None:
        d = self.layout.total_dim
        if self.rho.shape != (d, d):
            raise LayoutError(f"state shape {self.rho.shape} does not match layout dimension {d}")
        trace_err, herm, min_eig = self.diagnostics()
        if trace_err > TRACE_TOL:
            raise ValidationError(f"initial state trace deviates from 1 by {trace_err:.3e}")
        if herm > HERMITICITY_TOL:
            raise ValidationError(f"initial state is not Hermitian: defect {herm:.3e}")
        if min_eig < POSITIVITY_TOL:
            raise ValidationError(f"initial state has negative eigenvalue {min_eig:.3e}")


#: Names of the per-sample observable arrays carried by a Trajectory, in the
#: order they appear in trajectory CSV rows (diagnostics excluded).
OBSERVABLE_NAMES = (
    "c_wootters",
    "c_block",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "abs_rho23",
    "abs_rho14",
    "n_photon",
    "trace_err",
)

#: The subset of observables that are smooth linear functionals of the state;
#: convergence audits measure deviations on these (the concurrences pass
#: through square roots of near-zero eigenvalues, which amplifies rounding
#: noise far above any integrator signal).
LINEAR_OBSERVABLES = (
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "abs_rho23",
    "abs_rho14",
    "n_photon",
)


@dataclass
class Trajectory:
    """Sampled observables of one integration run."""

    times: np.ndarray
    states: np.ndarray  # (n_samples, 4, 4) reduced two-qubit matrices
    c_wootters: np.ndarray
    c_block: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho33: np.ndarray
    rho44: np.ndarray
    abs_rho23: np.ndarray
    abs_rho14: np.ndarray
    n_photon: np.ndarray
    trace_err: np.ndarray
    herm_defect: np.ndarray
    min_eig: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def observable(self, name: str) -> np.ndarray:
        if name not in OBSERVABLE_NAMES and name not in ("herm_defect", "min_eig"):
            raise KeyError(f"unknown observable {name!r}")
        return getattr(self, name)

    def block_mismatch_count(self, tol: float = 1e-6) -> int:
        """Samples where the block closed form disagrees with Wootters by > tol."""
        return int(np.sum(np.abs(self.c_wootters - self.c_block) > tol))


def lindblad_rhs(state: FullState, hamiltonian: Operator, kappa: float, a: Operator) -> np.ndarray:
    """Right-hand side of the master equation, in plain matrix form.

    This is the reference implementation against which the stepping kernels
    are checked; it works for any annihilation-like jump operator on the
    state's layout.  The result is traceless and maps Hermitian inputs to
    Hermitian outputs.
    """
    if hamiltonian.layout != state.layout or a.layout != state.layout:
        raise LayoutError("state, Hamiltonian and jump operator must share one layout")
    rho = state.rho
    h = hamiltonian.matrix
    am = a.matrix
    ad = am.conj().T
    n_op = ad @ am
    out = -1j * (h @ rho - rho @ h)
    out -= 0.5 * kappa * (n_op @ rho + rho @ n_op - 2.0 * (am @ rho @ ad))
    return out


def _sample_indices(n_steps: int, sample_every: int) -> list[int]:
    idx = list(range(0, n_steps + 1, sample_every))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return idx


def evolve(rho0: FullState, config: SystemConfig, *, backend: str | None = None) -> Trajectory:
    """Integrate the master equation from ``rho0`` over the configured window.

    Samples are recorded every ``config.sample_every`` steps, always
    including t = 0 and the final step.  Raises :class:`IntegrationError`
    naming the first sample time at which the trace drifts by more than
    1e-6 or an eigenvalue falls below -1e-6.
    """
    config.validate()
    layout = config.layout()
    if rho0.layout != layout:
        raise LayoutError(
            f"initial state layout {rho0.layout.factor_dims} does not match "
            f"config layout {layout.factor_dims}"
        )
    rho0.validate()

    h = np.ascontiguousarray(build_hamiltonian(config).matrix)
    decay, gain = kernels.dissipator_tables(layout, config.kappa)
    n_vec = photon_numbers(layout)
    m = layout.cavity_dim

    n_steps = round(config.t_end / config.dt)
    samples = _sample_indices(n_steps, config.sample_every)
    rho = np.array(rho0.rho, dtype=complex, order="C")

    count = len(samples)
    times = np.empty(count)
    states = np.empty((count, 4, 4), dtype=complex)
    columns = {name: np.empty(count) for name in OBSERVABLE_NAMES}
    herm_defect = np.empty(count)
    min_eig = np.empty(count)

    for k, step in enumerate(samples):
        if k > 0:
            kernels.rk4_propagate(
                rho, h, decay, gain, m, config.dt, step - samples[k - 1], backend=backend
            )
        t = step * config.dt
        trace_err = float(abs(np.trace(rho) - 1.0))
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        eig_min = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
        if trace_err > TRACE_ABORT:
            raise IntegrationError(
                f"trace drifted by {trace_err:.3e} at t = {t:.6g} (step {step}); "
                "decrease dt", time=t,
            )
        if eig_min < EIGENVALUE_ABORT:
            raise IntegrationError(
                f"eigenvalue {eig_min:.3e} below {EIGENVALUE_ABORT} at t = {t:.6g} "
                f"(step {step}); decrease dt or raise n_max", time=t,
            )
        rho4 = reduce_to_qubits(rho, m)
        times[k] = t
        states[k] = rho4
        columns["c_wootters"][k] = _wootters_value(rho4)
        columns["c_block"][k] = _block_value(rho4)
        columns["rho11"][k] = rho4[0, 0].real
        columns["rho22"][k] = rho4[1, 1].real
        columns["rho33"][k] = rho4[2, 2].real
        columns["rho44"][k] = rho4[3, 3].real
        columns["abs_rho23"][k] = abs(rho4[1, 2])
        columns["abs_rho14"][k] = abs(rho4[0, 3])
        columns["n_photon"][k] = float(np.real(np.sum(n_vec * np.diagonal(rho))))
        columns["trace_err"][k] = trace_err
        herm_defect[k] = herm
        min_eig[k] = eig_min

    return Trajectory(
        times=times,
        states=states,
        herm_defect=herm_defect,
        min_eig=min_eig,
        **columns,
    )
