"""Exact Schrödinger evolution of the two-band model.

The interaction couples only states of the form ``|e, n1>`` (system
excited, one lower-band level occupied) and ``|g, n2>`` (system in the
ground state, one upper-band level occupied), so the dynamics starting
from the excited system with the environment in the lower band closes in
a sector of dimension ``n1 + n2``.  The sector Hamiltonian is
diagonalized once and propagated exactly to every grid time.

A brute-force full-space RK4 integrator on the complete
``2 (n1 + n2)``-dimensional Hilbert space is provided to validate the
sector restriction at small band sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import RngStream, hermitian_eig
from .two_band import TwoBandParams

__all__ = [
    "SectorHamiltonian",
    "draw_couplings",
    "draw_environment_amplitudes",
    "build_sector_hamiltonian",
    "initial_sector_state",
    "evolve_exact",
    "upper_population",
    "build_full_hamiltonian",
    "embed_in_full_space",
    "complement_population",
    "rk4_schrodinger",
]


@dataclass
class SectorHamiltonian:
    """Single-excitation-sector Hamiltonian of the two-band model.

    Basis: the first ``n1`` vectors are ``|e, n1>``, the remaining ``n2``
    are ``|g, n2>``.  The matrix is Hermitian with no couplings inside
    either block.
    """

    matrix: np.ndarray
    n1: int
    n2: int

    @property
    def dim(self) -> int:
        return self.n1 + self.n2


def draw_couplings(params: TwoBandParams, rng: RngStream | None = None) -> np.ndarray:
    """Interaction amplitudes c(n1, n2): i.i.d. complex Gaussians with
    zero mean and unit second moment, from the dedicated coupling stream."""
    if rng is None:
        rng = RngStream(params.seed, RngStream.COUPLINGS_INDEX)
    return rng.complex_normal_array((params.n1, params.n2))


def draw_environment_amplitudes(params: TwoBandParams, rng: RngStream | None = None) -> np.ndarray:
    """Normalized initial lower-band amplitudes (real Gaussian before
    normalization), from the dedicated environment stream."""
    if rng is None:
        rng = RngStream(params.seed, RngStream.ENVIRONMENT_INDEX)
    d = rng.normal_array(params.n1)
    return d / np.linalg.norm(d)


def _band_energies(params: TwoBandParams):
    # evenly spaced levels de*n/N for n = 1..N in each band; both sector
    # blocks share the common offset delta_e / 2
    e1 = params.delta_e / 2.0 + params.delta_eps * np.arange(1, params.n1 + 1) / params.n1
    e2 = params.delta_e / 2.0 + params.delta_eps * np.arange(1, params.n2 + 1) / params.n2
    return e1, e2


def build_sector_hamiltonian(params: TwoBandParams, rng: RngStream | None = None,
                             couplings: np.ndarray | None = None) -> SectorHamiltonian:
    """Assemble the sector Hamiltonian with random couplings.

    ``couplings`` may be passed explicitly to share one realization with
    the full-space oracle; otherwise they are drawn from the coupling
    stream of ``params.seed``.
    """
    if couplings is None:
        couplings = draw_couplings(params, rng)
    if couplings.shape != (params.n1, params.n2):
        raise ValueError(f"couplings must have shape {(params.n1, params.n2)}")
    dim = params.n1 + params.n2
    h = np.zeros((dim, dim), dtype=complex)
    e1, e2 = _band_energies(params)
    idx = np.arange(dim)
    h[idx[:params.n1], idx[:params.n1]] = e1
    h[idx[params.n1:], idx[params.n1:]] = e2
    h[:params.n1, params.n1:] = params.lam * couplings
    h[params.n1:, :params.n1] = params.lam * couplings.conj().T
    return SectorHamiltonian(matrix=h, n1=params.n1, n2=params.n2)


def initial_sector_state(params: TwoBandParams, rng: RngStream | None = None) -> np.ndarray:
    """Excited system with the environment spread over the lower band."""
    psi = np.zeros(params.n1 + params.n2, dtype=complex)
    psi[:params.n1] = draw_environment_amplitudes(params, rng)
    return psi


def evolve_exact(ham: SectorHamiltonian, psi0: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Amplitudes at every grid time via one eigendecomposition.

    psi(t) = U exp(-i E t) U^dag psi0; the norm is conserved to machine
    precision at all times.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (ham.dim,):
        raise ValueError(f"state must have shape ({ham.dim},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")
    energies, vectors = hermitian_eig(ham.matrix)
    w = vectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(np.asarray(grid, dtype=float), energies))
    return (phases * w) @ vectors.T


def upper_population(amplitudes: np.ndarray, n1: int):
    """Population of the upper system level: total weight on the
    ``|e, n1>`` block.  Works on a single state or a (T, dim) stack."""
    amplitudes = np.asarray(amplitudes)
    if amplitudes.ndim == 1:
        return float(np.sum(np.abs(amplitudes[:n1]) ** 2))
    return np.sum(np.abs(amplitudes[:, :n1]) ** 2, axis=1)


# ---------------------------------------------------------------------------
# Full-space oracle
# ---------------------------------------------------------------------------


def build_full_hamiltonian(params: TwoBandParams, couplings: np.ndarray) -> np.ndarray:
    """Hamiltonian on the full system x environment space (dim 2(n1+n2)).

    Basis ordering: system index s in {0: e, 1: g} (major), environment
    level (minor) with the n1 lower-band levels before the n2 upper-band
    ones.  Used only as a brute-force check of the sector restriction.
    """
    n1, n2 = params.n1, params.n2
    denv = n1 + n2
    env = np.zeros(denv)
    env[:n1] = params.delta_eps * np.arange(1, n1 + 1) / n1
    env[n1:] = params.delta_e + params.delta_eps * np.arange(1, n2 + 1) / n2
    h = np.zeros((2 * denv, 2 * denv), dtype=complex)
    idx = np.arange(2 * denv)
    sysdiag = np.where(idx < denv, params.delta_e / 2.0, -params.delta_e / 2.0)
    h[idx, idx] = sysdiag + np.tile(env, 2)
    # V = lam sum c(m1, m2) sigma+ |m1><m2| + h.c. couples |g, m2> -> |e, m1>
    block = params.lam * couplings  # (n1, n2)
    h[:n1, denv + n1:] = block
    h[denv + n1:, :n1] = block.conj().T
    return h


def embed_in_full_space(psi_sector: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Lift a sector state to the full space."""
    denv = n1 + n2
    full = np.zeros(2 * denv, dtype=complex)
    full[:n1] = psi_sector[:n1]                # |e, n1>
    full[denv + n1:] = psi_sector[n1:]         # |g, n2>
    return full


def complement_population(psi_full: np.ndarray, n1: int, n2: int) -> float:
    """Total weight outside the single-excitation sector."""
    denv = n1 + n2
    return float(np.sum(np.abs(psi_full[n1:denv]) ** 2)
                 + np.sum(np.abs(psi_full[denv:denv + n1]) ** 2))


def rk4_schrodinger(h: np.ndarray, psi0: np.ndarray, t_end: float, steps: int) -> np.ndarray:
    """Plain fixed-step RK4 integration of i dpsi/dt = H psi."""
    psi = np.asarray(psi0, dtype=complex).copy()
    dt = t_end / steps
    for _ in range(steps):
        k1 = -1j * (h @ psi)
        k2 = -1j * (h @ (psi + 0.5 * dt * k1))
        k3 = -1j * (h @ (psi + 0.5 * dt * k2))
        k4 = -1j * (h @ (psi + dt * k3))
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi
