"""Trajectory ensembles and the deterministic master-equation oracle.

`run_ensemble` averages component projectors over trajectories with
per-trajectory random streams and a fixed pairwise reduction tree, so the
result is bitwise identical for any worker count.  `integrate_master` is
an independent RK4 integrator of the component master equation used as a
brute-force reference for the Monte Carlo estimates.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .engine import ComponentState, GeneralizedLindbladModel, run_trajectory
from .numerics import RngStream

__all__ = [
    "EnsembleEstimate",
    "run_ensemble",
    "master_rhs",
    "integrate_master",
]

#: trajectories per reduction chunk; fixed so that the reduction tree (and
#: hence every floating-point rounding) is independent of the worker count
_CHUNK = 128


@dataclass
class EnsembleEstimate:
    """Ensemble averages over trajectories on a common time grid.

    ``rho[k, i]`` is the unnormalized component matrix rho_i(t_k) (the
    average projector; its trace is the component weight).  ``mean`` and
    ``stderr`` describe the upper-level population of the summed
    components; the population variance convention is used, so
    ``stderr <= 0.5 / sqrt(n_traj)`` always.  ``rho_stderr_re``/``_im``
    are entrywise standard errors of the matrix estimates.
    """

    times: np.ndarray
    rho: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    rho_stderr_re: np.ndarray
    rho_stderr_im: np.ndarray
    n_traj: int
    metadata: dict = field(default_factory=dict)

    def system_density(self) -> np.ndarray:
        """Reduced system matrices rho_S(t) = sum_i rho_i(t), shape (T, d, d)."""
        return np.sum(self.rho, axis=1)


def _trajectory_sums(model, initial_psi, grid, seed, k, observable_index):
    """Leaf of the reduction: projector sums and observable moments of one
    trajectory."""
    rng = RngStream(seed, k)
    result = run_trajectory(model, ComponentState(initial_psi.copy(), 0.0), grid, rng,
                            trajectory_id=k)
    states = result.states  # (T, n, d)
    proj = states[:, :, :, None] * states.conj()[:, :, None, :]
    m = np.sum(np.abs(states[:, :, observable_index]) ** 2, axis=1)
    return [proj, proj.real**2 + 1j * proj.imag**2, m, m * m]


def _merge(a, b):
    return [x + y for x, y in zip(a, b)]


def _pairwise_tree(leaves):
    """Sum a list with a fixed binary tree (pairwise reduction)."""
    if len(leaves) == 1:
        return leaves[0]
    mid = 1 << (len(leaves) - 1).bit_length() - 1
    if mid == len(leaves):
        mid //= 2
    return _merge(_pairwise_tree(leaves[:mid]), _pairwise_tree(leaves[mid:]))


def _chunk_sums(args):
    model, initial_psi, grid, seed, k0, k1, observable_index = args
    leaves = [_trajectory_sums(model, initial_psi, grid, seed, k, observable_index)
              for k in range(k0, k1)]
    return _pairwise_tree(leaves)


def run_ensemble(model: GeneralizedLindbladModel, initial: ComponentState,
                 grid: np.ndarray, n_traj: int, seed: int,
                 n_workers: int = 1, observable_index: int = 0,
                 metadata: dict | None = None) -> EnsembleEstimate:
    """Average ``n_traj`` trajectories with deterministic reduction.

    Trajectory ``k`` always uses the stream ``(seed, k)`` and the leaves
    are combined chunkwise with a fixed pairwise tree, so the estimate
    does not depend on ``n_workers`` (bitwise).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    grid = np.asarray(grid, dtype=float)
    chunks = [(model, initial.psi, grid, seed, k0, min(k0 + _CHUNK, n_traj), observable_index)
              for k0 in range(0, n_traj, _CHUNK)]

    if n_workers > 1 and len(chunks) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=n_workers) as pool:
            partials = pool.map(_chunk_sums, chunks)
    else:
        partials = [_chunk_sums(c) for c in chunks]

    proj_sum, proj_sq, m_sum, m2_sum = _pairwise_tree(partials)

    n = float(n_traj)
    rho = proj_sum / n
    mean = m_sum / n
    var = np.maximum(m2_sum / n - mean**2, 0.0)
    stderr = np.sqrt(var / n)
    var_re = np.maximum(proj_sq.real / n - (proj_sum.real / n) ** 2, 0.0)
    var_im = np.maximum(proj_sq.imag / n - (proj_sum.imag / n) ** 2, 0.0)

    return EnsembleEstimate(
        times=grid,
        rho=rho,
        mean=mean,
        stderr=stderr,
        rho_stderr_re=np.sqrt(var_re / n),
        rho_stderr_im=np.sqrt(var_im / n),
        n_traj=n_traj,
        metadata=dict(metadata or {}, seed=seed, n_traj=n_traj),
    )


# ---------------------------------------------------------------------------
# Master-equation oracle
# ---------------------------------------------------------------------------


def master_rhs(rho_list: np.ndarray, model: GeneralizedLindbladModel, t: float) -> np.ndarray:
    """Right-hand side of the component master equation.

    d rho_i/dt = -i [H_i, rho_i]
                 + g(t) sum_channels (op_i rho_src op_i^dag - (1/2) {A_i, rho_i})

    The total trace derivative vanishes identically.
    """
    rho_list = np.asarray(rho_list, dtype=complex)
    n, d = model.n_components, model.dim
    if rho_list.shape != (n, d, d):
        raise ValueError(f"rho_list must have shape {(n, d, d)}, got {rho_list.shape}")
    out = np.empty_like(rho_list)
    g = model.hazard_at(t)
    for i in range(n):
        h = model.hamiltonians[i]
        out[i] = -1j * (h @ rho_list[i] - rho_list[i] @ h)
        out[i] -= 0.5 * g * (model.loss[i] @ rho_list[i] + rho_list[i] @ model.loss[i])
    for c in model.channels:
        src = rho_list[c.source]
        for i in range(n):
            op = c.operators[i]
            out[i] += g * (op @ src @ op.conj().T)
    return out


def integrate_master(rho0_list: np.ndarray, model: GeneralizedLindbladModel,
                     grid: np.ndarray, tol: float = 1e-8,
                     max_refinements: int = 12) -> np.ndarray:
    """RK4 integration of the component master equation on a grid.

    The substep count per grid interval is doubled until every grid value
    changes by less than ``tol``; reports failure if refinement stalls.
    """
    grid = np.asarray(grid, dtype=float)
    rho0 = np.asarray(rho0_list, dtype=complex)
    scale = max(model._rate_scale, 1e-12)
    n_sub = max(1, int(math.ceil(float(np.max(np.diff(grid), initial=0.0)) * scale / 0.05)))
    prev = _integrate_fixed(rho0, model, grid, n_sub)
    for _ in range(max_refinements):
        n_sub *= 2
        cur = _integrate_fixed(rho0, model, grid, n_sub)
        if float(np.max(np.abs(cur - prev))) < tol:
            return cur
        prev = cur
    raise RuntimeError(f"master-equation integrator did not reach tol={tol}")


def _integrate_fixed(rho0, model, grid, n_sub):
    out = np.empty((len(grid),) + rho0.shape, dtype=complex)
    rho = rho0.copy()
    out[0] = rho
    for k in range(1, len(grid)):
        t0, t1 = float(grid[k - 1]), float(grid[k])
        h = (t1 - t0) / n_sub
        t = t0
        for _ in range(n_sub):
            k1 = master_rhs(rho, model, t)
            k2 = master_rhs(rho + 0.5 * h * k1, model, t + 0.5 * h)
            k3 = master_rhs(rho + 0.5 * h * k2, model, t + 0.5 * h)
            k4 = master_rhs(rho + h * k3, model, t + h)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[k] = rho
    return out
