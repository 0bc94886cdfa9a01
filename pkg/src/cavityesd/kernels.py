"""Fixed-step RK4 propagation kernels for the damped master equation.

Two interchangeable implementations of the same stepping loop:

* ``compiled`` -- a Cython extension (:mod:`cavityesd._native`) that fuses
  the four Runge-Kutta stages and calls BLAS ``zgemm`` directly for the
  commutator products;
* ``python``  -- a plain NumPy version of identical structure.

The compiled backend is selected at import time when the extension built;
otherwise everything transparently runs on the fallback.  Both accept the
density matrix in place along with precomputed dissipator tables, so the
hot loop does no operator construction:

* ``decay[i, j] = kappa/2 * (n_i + n_j)`` multiplies rho elementwise
  (the anticommutator with the diagonal number operator);
* ``gain[i, j]`` carries ``kappa * sqrt((n_i+1)(n_j+1))`` for the photon
  loss term ``kappa * a rho a+``, zeroed on the truncation boundary so a
  nonzero entry also certifies that reading rho[i+1, j+1] stays inside the
  cavity block.
"""

from __future__ import annotations

import numpy as np

from .operators import SpaceLayout, photon_numbers

try:
    from . import _native
except ImportError:  # pragma: no cover - depends on the build environment
    _native = None


def available_backends() -> tuple[str, ...]:
    """Backends usable in this installation, preferred first."""
    return ("compiled", "python") if _native is not None else ("python",)


def default_backend() -> str:
    return available_backends()[0]


def dissipator_tables(layout: SpaceLayout, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Precompute the elementwise decay/gain tables for the cavity-loss dissipator."""
    n = photon_numbers(layout)
    decay = 0.5 * kappa * (n[:, None] + n[None, :])
    w = np.sqrt(n + 1.0)
    w[n == layout.n_max] = 0.0
    gain = kappa * np.outer(w, w)
    return np.ascontiguousarray(decay), np.ascontiguousarray(gain)


def _rhs_py(rho, h, decay, gain, cavity_dim):
    out = -1j * (h @ rho - rho @ h)
    out -= decay * rho
    m = cavity_dim
    r4 = rho.reshape(4, m, 4, m)
    o4 = out.reshape(4, m, 4, m)
    g4 = gain.reshape(4, m, 4, m)
    o4[:, : m - 1, :, : m - 1] += g4[:, : m - 1, :, : m - 1] * r4[:, 1:, :, 1:]
    return out

def _rk4_propagate_py(rho, h, decay, gain, cavity_dim, dt, n_steps):
    for _ in range(n_steps):
        k1 = _rhs_py(rho, h, decay, gain, cavity_dim)
        k2 = _rhs_py(rho + (0.5 * dt) * k1, h, decay, gain, cavity_dim)
        k3 = _rhs_py(rho + (0.5 * dt) * k2, h, decay, gain, cavity_dim)
        k4 = _rhs_py(rho + dt * k3, h, decay, gain, cavity_dim)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagate(
    rho: np.ndarray,
    h: np.ndarray,
    decay: np.ndarray,
    gain: np.ndarray,
    cavity_dim: int,
    dt: float,
    n_steps: int,
    backend: str | None = None,
) -> None:
    """Advance ``rho`` in place by ``n_steps`` classical RK4 steps of size ``dt``.

    ``rho`` must be a C-contiguous complex128 square array; ``h``, ``decay``
    and ``gain`` are the Hamiltonian and dissipator tables on the same index
    space.  ``backend`` overrides the import-time selection (used by tests
    and the benchmark).
    """
    if backend is None:
        backend = default_backend()
    if backend == "compiled":
        if _native is None:
            raise RuntimeError("compiled backend requested but cavityesd._native is not built")
        _native.rk4_propagate(rho, h, decay, gain, cavity_dim, float(dt), int(n_steps))
    elif backend == "python":
        _rk4_propagate_py(rho, h, decay, gain, cavity_dim, float(dt), int(n_steps))
    else:
        raise ValueError(f"unknown backend {backend!r}; expected 'compiled' or 'python'")
