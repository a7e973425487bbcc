"""Piecewise deterministic process engine for generalized Lindblad models.

A model is a family of component Hamiltonians ``H^i`` together with jump
channels ``(source j, label nu)`` carrying one operator per target
component, plus an optional scalar hazard modulation ``g(t)`` that scales
every dissipative term.  A trajectory consists of ``n`` component wave
functions that drift deterministically between jumps and all jump
simultaneously when a channel fires.

The deterministic pieces are propagated in *linear* (non-norm-preserving)
form: the total squared norm of the drifted components equals the no-jump
survival probability, so waiting times come from inverting the norm decay,
and normalizing the components at observation times reproduces the
realizations of the nonlinear drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import RngStream, find_root_increasing, gauss_legendre

__all__ = [
    "EngineError",
    "UnknownChannelError",
    "ZeroRateJumpError",
    "TrajectoryError",
    "JumpChannel",
    "GeneralizedLindbladModel",
    "ComponentState",
    "JumpEvent",
    "TrajectoryResult",
    "channel_rate",
    "effective_drift_step",
    "sample_jump_time",
    "select_channel",
    "apply_jump",
    "run_trajectory",
]

#: beyond this drift horizon a trajectory is treated as jump-free
_MAX_HORIZON = 2.0**62

#: relative threshold below which a decay exponent counts as exactly zero
_ZERO_DECAY_RTOL = 1e-13


class EngineError(RuntimeError):
    pass


class UnknownChannelError(EngineError):
    pass


class ZeroRateJumpError(EngineError):
    pass


class TrajectoryError(EngineError):
    """Failure inside one trajectory, annotated with its id."""


@dataclass
class JumpChannel:
    """One jump channel: operators mapping the source component to every target.

    ``operators[i]`` is the (d, d) operator applied to the source component
    to produce the new component ``i`` when this channel fires.
    """

    source: int
    label: int
    operators: np.ndarray  # (n, d, d) complex

    def __post_init__(self):
        self.operators = np.ascontiguousarray(self.operators, dtype=complex)
        if self.operators.ndim != 3 or self.operators.shape[1] != self.operators.shape[2]:
            raise ValueError(f"channel operators must be (n, d, d), got {self.operators.shape}")


@dataclass(eq=False)
class GeneralizedLindbladModel:
    """Hermitian component Hamiltonians, jump channels and hazard modulation.

    ``hazard`` is a nonnegative scalar function of time multiplying all
    dissipative terms; ``None`` means constant rates (g == 1).  For
    time-dependent hazards, ``hazard_integral(t0, t1)`` must return the
    exact integral of ``g`` (``t1`` may be an array); when omitted it is
    computed by adaptive quadrature, which is correct but slow.

    ``waiting_time_sampler(psi, t0, u) -> tau`` optionally replaces the
    generic norm-decay waiting-time inversion with a model-specific closed
    form.
    """

    hamiltonians: np.ndarray  # (n, d, d) complex
    channels: tuple
    hazard: object = None
    hazard_integral: object = None
    waiting_time_sampler: object = None

    n_components: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        h = np.ascontiguousarray(self.hamiltonians, dtype=complex)
        if h.ndim != 3 or h.shape[1] != h.shape[2]:
            raise ValueError(f"hamiltonians must be (n, d, d), got {h.shape}")
        self.hamiltonians = h
        self.n_components, self.dim = h.shape[0], h.shape[1]
        for i in range(self.n_components):
            if np.linalg.norm(h[i] - h[i].conj().T) > 1e-12 * max(np.linalg.norm(h[i]), 1e-300):
                raise ValueError(f"component Hamiltonian {i} is not Hermitian")

        chans = tuple(self.channels)
        for c in chans:
            if not (0 <= c.source < self.n_components):
                raise ValueError(f"channel source {c.source} out of range")
            if c.operators.shape != (self.n_components, self.dim, self.dim):
                raise ValueError(
                    f"channel ({c.source}, {c.label}) operators have shape "
                    f"{c.operators.shape}, expected {(self.n_components, self.dim, self.dim)}"
                )
        if sorted((c.source, c.label) for c in chans) != [(c.source, c.label) for c in chans]:
            raise ValueError("channels must be sorted by (source, label)")
        if len({(c.source, c.label) for c in chans}) != len(chans):
            raise ValueError("duplicate channel (source, label)")
        self.channels = chans

        # Per-component dissipative loss operator: A_i = sum over channels
        # with source i of sum_target op^dag op.  This is the matrix entering
        # both the drift and the anticommutator of the master equation.
        loss = np.zeros_like(h)
        for c in chans:
            loss[c.source] += np.einsum("tij,tik->jk", c.operators.conj(), c.operators)
        self.loss = loss

        self._prepare_propagators()

    # -- propagator setup ---------------------------------------------------

    def _prepare_propagators(self):
        n, d = self.n_components, self.dim
        if self.hazard is None:
            # Constant effective generator B_i = -i H_i - A_i / 2.
            self._mode = "const"
            self._eigvals = np.empty((n, d), dtype=complex)
            self._vecs = np.empty((n, d, d), dtype=complex)
            self._vecs_inv = np.empty((n, d, d), dtype=complex)
            for i in range(n):
                b = -1j * self.hamiltonians[i] - 0.5 * self.loss[i]
                lam, v = np.linalg.eig(b)
                vinv = np.linalg.inv(v)
                if np.linalg.norm(v @ np.diag(lam) @ vinv - b) > 1e-9 * max(1e-300, np.linalg.norm(b)):
                    raise EngineError(
                        f"effective generator of component {i} is too ill-conditioned "
                        "for eigendecomposition-based propagation"
                    )
                # decay rates are clamped nonpositive: roundoff-positive real
                # parts would blow up at large times
                scale = np.max(np.abs(lam.real)) if np.any(lam.real != 0) else 0.0
                re = np.where(lam.real > -_ZERO_DECAY_RTOL * max(scale, 1e-300), 0.0, lam.real)
                self._eigvals[i] = re + 1j * lam.imag
                self._vecs[i] = v
                self._vecs_inv[i] = vinv
            self._gram = np.einsum("nji,njk->nik", self._vecs.conj(), self._vecs)
        elif not np.any(self.hamiltonians):
            # Zero Hamiltonians: the generator is -g(t) A_i / 2, which
            # commutes with itself at all times, so propagation is exact in
            # terms of the integrated hazard.
            self._mode = "scalar"
            self._eigvals = np.empty((n, d), dtype=float)
            self._vecs = np.empty((n, d, d), dtype=complex)
            for i in range(n):
                a, v = np.linalg.eigh(self.loss[i])
                self._eigvals[i] = np.maximum(a, 0.0)
                self._vecs[i] = v
            self._vecs_inv = np.conj(np.transpose(self._vecs, (0, 2, 1)))
            self._gram = np.einsum("nji,njk->nik", self._vecs.conj(), self._vecs)
        else:
            self._mode = "rk4"
        self._rate_scale = max(
            float(np.max(np.abs(np.linalg.eigvalsh(self.loss)))) if self.loss.size else 0.0,
            float(np.max(np.abs(self.hamiltonians))) if self.hamiltonians.size else 0.0,
            1e-30,
        )

    def __getstate__(self):
        return self.__dict__.copy()

    def __setstate__(self, state):
        self.__dict__.update(state)

    # -- hazard helpers -----------------------------------------------------

    def hazard_at(self, t: float) -> float:
        if self.hazard is None:
            return 1.0
        g = float(self.hazard(t))
        if g < 0.0:
            raise EngineError(f"hazard modulation is negative at t={t}: {g}")
        return g

    def integrated_hazard(self, t0: float, t1):
        """Integral of g over [t0, t1]; t1 may be an array."""
        if self.hazard is None:
            return np.asarray(t1) - t0 if isinstance(t1, np.ndarray) else t1 - t0
        if self.hazard_integral is not None:
            return self.hazard_integral(t0, t1)
        if isinstance(t1, np.ndarray):
            return np.array([gauss_legendre(self.hazard, t0, float(t), 1e-12) for t in t1])
        return gauss_legendre(self.hazard, t0, t1, 1e-12)

    def channel_index(self, source: int, label: int) -> int:
        for k, c in enumerate(self.channels):
            if c.source == source and c.label == label:
                return k
        raise UnknownChannelError(f"no channel with source={source}, label={label}")


@dataclass
class ComponentState:
    """Component wave functions of one trajectory at time ``t``.

    ``psi`` has shape (n, d).  At observation times the total squared norm
    is 1 and each component's squared norm lies in [0, 1]; intermediate
    drift output is deliberately unnormalized.
    """

    psi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.psi = np.ascontiguousarray(self.psi, dtype=complex)
        if self.psi.ndim != 2:
            raise ValueError(f"psi must be (n, d), got shape {self.psi.shape}")

    def total_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2))

    def component_norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=1)

    def normalized(self) -> "ComponentState":
        return ComponentState(self.psi / math.sqrt(self.total_norm_sq()), self.t)


@dataclass
class JumpEvent:
    time: float
    source: int
    label: int


@dataclass
class TrajectoryResult:
    """Normalized component states recorded on a time grid, plus jump log."""

    times: np.ndarray          # (T,)
    states: np.ndarray         # (T, n, d) complex, total norm 1 per time
    events: list

    def component_populations(self) -> np.ndarray:
        """Squared norms of each component at each grid time, shape (T, n)."""
        return np.sum(np.abs(self.states) ** 2, axis=2)


# ---------------------------------------------------------------------------
# Rates, jumps, channel selection
# ---------------------------------------------------------------------------


def _channel_norm_sq(model: GeneralizedLindbladModel, psi: np.ndarray, k: int) -> float:
    """Unmodulated rate sum_i ||op_i psi_source||^2 of channel k."""
    c = model.channels[k]
    mapped = (c.operators @ psi[c.source]).ravel()
    return float(np.vdot(mapped, mapped).real)


def channel_rates(model: GeneralizedLindbladModel, state: ComponentState) -> np.ndarray:
    """Modulated rates g(t) * M of every channel, in channel order."""
    g = model.hazard_at(state.t)
    return np.array([g * _channel_norm_sq(model, state.psi, k) for k in range(len(model.channels))])


def channel_rate(model: GeneralizedLindbladModel, state: ComponentState,
                 source: int, label: int) -> float:
    """Modulated rate of the channel with the given (source, label)."""
    k = model.channel_index(source, label)
    return model.hazard_at(state.t) * _channel_norm_sq(model, state.psi, k)


def apply_jump(model: GeneralizedLindbladModel, state: ComponentState,
               source: int, label: int) -> ComponentState:
    """Fire a channel: every component i becomes op_i psi_source / sqrt(M).

    All components jump simultaneously from the same pre-jump source
    component; the output has total norm exactly 1 by construction of M.
    """
    k = model.channel_index(source, label)
    c = model.channels[k]
    mapped = c.operators @ state.psi[c.source]
    m = float(np.sum(np.abs(mapped) ** 2))
    if m <= 0.0:
        raise ZeroRateJumpError(f"channel ({source}, {label}) has zero rate at t={state.t}")
    return ComponentState(mapped / math.sqrt(m), state.t)


def select_channel(model: GeneralizedLindbladModel, state: ComponentState, u: float):
    """Pick a channel with probability proportional to its rate.

    Uses cumulative-sum inversion over the model's fixed channel order, so
    the choice is deterministic given ``u``.
    """
    rates = channel_rates(model, state)
    total = float(rates.sum())
    if total <= 0.0:
        raise ZeroRateJumpError(f"no channel has positive rate at t={state.t}")
    target = u * total
    acc = 0.0
    for k, r in enumerate(rates):
        acc += float(r)
        if target <= acc:
            return model.channels[k].source, model.channels[k].label
    return model.channels[-1].source, model.channels[-1].label


def _select_channel_fast(model, psi, t, u):
    # identical to select_channel, but on unmodulated rates: the scalar
    # hazard is a common factor of all channels and cancels from the
    # selection probabilities
    norms = [_channel_norm_sq(model, psi, k) for k in range(len(model.channels))]
    total = sum(norms)
    if total <= 0.0:
        raise ZeroRateJumpError(f"no channel has positive rate at t={t}")
    target = u * total
    acc = 0.0
    for k, r in enumerate(norms):
        acc += r
        if target <= acc:
            return model.channels[k].source, model.channels[k].label
    return model.channels[-1].source, model.channels[-1].label


# ---------------------------------------------------------------------------
# Deterministic drift
# ---------------------------------------------------------------------------


def _segment_exponents(model: GeneralizedLindbladModel, psi: np.ndarray):
    """Coefficients (c, mu) with survival S(x) = Re sum c * exp(mu * x).

    For mode "const" x is the elapsed time; for mode "scalar" x is the
    integrated hazard and mu is real.  Derived from
    ||V (e^{lam x} . w)||^2 = sum_jk conj(w_j) (V^H V)_jk w_k e^{(conj(lam_j)+lam_k) x}.
    """
    w = np.einsum("nij,nj->ni", model._vecs_inv, psi)
    cmat = model._gram * (w.conj()[:, :, None] * w[:, None, :])
    if model._mode == "const":
        mu = model._eigvals.conj()[:, :, None] + model._eigvals[:, None, :]
    else:
        mu = -0.5 * (model._eigvals[:, :, None] + model._eigvals[:, None, :])
    return cmat.ravel(), mu.ravel()


def _propagate_const(model, psi, dt):
    w = np.einsum("nij,nj->ni", model._vecs_inv, psi)
    return np.einsum("nij,nj->ni", model._vecs, np.exp(model._eigvals * dt) * w)


def _propagate_scalar(model, psi, dg):
    w = np.einsum("nij,nj->ni", model._vecs_inv, psi)
    return np.einsum("nij,nj->ni", model._vecs, np.exp(-0.5 * model._eigvals * dg) * w)


def _drift_rhs(model, t, phi):
    rhs = -1j * np.einsum("nij,nj->ni", model.hamiltonians, phi)
    g = model.hazard_at(t)
    if g != 0.0:
        rhs -= 0.5 * g * np.einsum("nij,nj->ni", model.loss, phi)
    return rhs


def _rk4_drift(model, psi, t0, t1, tol=1e-10):
    """Linear drift by RK4 with step-doubling error control."""
    phi = psi.copy()
    t = t0
    h = min(0.1 / model._rate_scale, t1 - t0) if t1 > t0 else 0.0
    while t < t1 - 1e-15 * max(1.0, abs(t1)):
        h = min(h, t1 - t)
        while True:
            full = _rk4_step(model, t, phi, h)
            half = _rk4_step(model, t + 0.5 * h, _rk4_step(model, t, phi, 0.5 * h), 0.5 * h)
            err = float(np.max(np.abs(full - half)))
            if err <= tol * max(1.0, float(np.max(np.abs(half)))) or h < 1e-12 * max(1.0, t1 - t0):
                phi = half
                t += h
                if err < 0.01 * tol:
                    h *= 2.0
                break
            h *= 0.5
    return phi


def _rk4_step(model, t, phi, h):
    k1 = _drift_rhs(model, t, phi)
    k2 = _drift_rhs(model, t + 0.5 * h, phi + 0.5 * h * k1)
    k3 = _drift_rhs(model, t + 0.5 * h, phi + 0.5 * h * k2)
    k4 = _drift_rhs(model, t + h, phi + h * k3)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _propagate(model, psi, t0, t1):
    """Unnormalized drift of all components from t0 to t1."""
    if t1 == t0:
        return psi.copy()
    if model._mode == "const":
        return _propagate_const(model, psi, t1 - t0)
    if model._mode == "scalar":
        return _propagate_scalar(model, psi, float(model.integrated_hazard(t0, t1)))
    return _rk4_drift(model, psi, t0, t1)


def _propagate_many(model, psi, t0, ts, dg=None):
    """Unnormalized drift states at several increasing times, shape (T, n, d).

    ``dg`` may carry precomputed integrated hazards over [t0, ts] for the
    scalar mode.
    """
    if model._mode == "const":
        w = np.einsum("nij,nj->ni", model._vecs_inv, psi)
        ew = np.exp(model._eigvals[None, :, :] * (np.asarray(ts) - t0)[:, None, None]) * w
        return np.einsum("nij,tnj->tni", model._vecs, ew)
    if model._mode == "scalar":
        if dg is None:
            dg = np.asarray(model.integrated_hazard(t0, np.asarray(ts, dtype=float)))
        w = np.einsum("nij,nj->ni", model._vecs_inv, psi)
        ew = np.exp(-0.5 * model._eigvals[None, :, :] * dg[:, None, None]) * w
        return np.einsum("nij,tnj->tni", model._vecs, ew)
    out = np.empty((len(ts), model.n_components, model.dim), dtype=complex)
    phi, t = psi, t0
    for k, tk in enumerate(ts):
        phi = _rk4_drift(model, phi, t, float(tk))
        t = float(tk)
        out[k] = phi
    return out


def effective_drift_step(model: GeneralizedLindbladModel, state: ComponentState,
                         dt: float) -> ComponentState:
    """Advance the linear drift by ``dt``; the result is unnormalized.

    The compensation term that would keep the total norm fixed is a
    state-dependent multiple of the identity common to all components, so
    it is omitted here: the output's total squared norm is the no-jump
    survival probability, and renormalizing reproduces the realizations of
    the norm-preserving drift.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    return ComponentState(_propagate(model, state.psi, state.t, state.t + dt), state.t + dt)


# ---------------------------------------------------------------------------
# Waiting times
# ---------------------------------------------------------------------------


def _invert_exponent_sum(c, mu, u):
    """Solve Re sum c exp(mu x) = u for x >= 0, or inf if the sum never
    drops to u.  mu has nonpositive real parts; the sum is nonincreasing."""
    re = mu.real if np.iscomplexobj(mu) else mu
    im = mu.imag if np.iscomplexobj(mu) else np.zeros_like(mu)
    decaying = re < 0.0
    # worst-case floor of the non-decaying part: constant terms minus the
    # full amplitude of the persistent oscillating ones
    persistent = ~decaying
    constant = persistent & (np.abs(im) <= 1e-13)
    floor = float(np.sum(c[constant]).real) - float(np.sum(np.abs(c[persistent & ~constant])))
    if floor >= u or not np.any(decaying):
        return math.inf

    def surv(x):
        return float(np.sum(c * np.exp(mu * x)).real)

    slowest = np.max(re[decaying])
    hi = min(-1.0 / slowest, _MAX_HORIZON)
    s = surv(hi)
    while s > u:
        hi *= 2.0
        if hi > _MAX_HORIZON:
            return math.inf
        s = surv(hi)
    return find_root_increasing(lambda x: u - surv(x), 0.0, hi, tol=1e-13,
                                f_lo=u - surv(0.0), f_hi=u - s)


def sample_jump_time(model: GeneralizedLindbladModel, state: ComponentState, u: float) -> float:
    """Waiting time tau until the next jump, with survival(tau) = u.

    Survival is the total squared norm of the linearly drifted components.
    For constant rates this is inverted on an exponential sum in tau; for
    zero-Hamiltonian time-modulated models it is inverted in integrated
    hazard and mapped back through the hazard integral; otherwise the norm
    decay is integrated by RK4 until it crosses ``u``.  Returns ``inf``
    when the survival never reaches ``u`` (no further jumps).
    """
    if not (0.0 < u < 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    if model.waiting_time_sampler is not None:
        return float(model.waiting_time_sampler(state.psi, state.t, u))

    psi = state.psi
    total = float(np.sum(np.abs(psi) ** 2))
    if total <= 0.0:
        return math.inf
    target = u * total

    if model._mode == "const":
        c, mu = _segment_exponents(model, psi)
        return _invert_exponent_sum(c, mu, target)

    if model._mode == "scalar":
        c, mu = _segment_exponents(model, psi)
        dg_star = _invert_exponent_sum(c, mu, target)
        if math.isinf(dg_star):
            return math.inf
        # map the required integrated hazard back to elapsed time
        hi = 1.0
        val = float(model.integrated_hazard(state.t, state.t + hi))
        while val < dg_star:
            hi *= 2.0
            if hi > _MAX_HORIZON:
                return math.inf
            prev = val
            val = float(model.integrated_hazard(state.t, state.t + hi))
            if val == prev:
                return math.inf
        return find_root_increasing(
            lambda tau: float(model.integrated_hazard(state.t, state.t + tau)) - dg_star,
            0.0, hi, tol=1e-13, f_lo=-dg_star, f_hi=val - dg_star)

    return _first_passage_rk4(model, psi, state.t, target)


def _first_passage_rk4(model, psi, t0, target):
    """March the RK4 drift until the total squared norm crosses ``target``."""
    t = t0
    phi = psi.copy()
    h = 0.5
    stalls = 0
    for _ in range(100000):
        nxt = _rk4_drift(model, phi, t, t + h)
        s = float(np.sum(np.abs(nxt) ** 2))
        if s <= target:
            f = lambda dt: target - float(np.sum(np.abs(_rk4_drift(model, phi, t, t + dt)) ** 2))
            dt = find_root_increasing(f, 0.0, h, tol=1e-11)
            return t + dt - t0
        prev = float(np.sum(np.abs(phi) ** 2))
        if s >= prev * (1.0 - 1e-15):
            stalls += 1
            h *= 2.0
            if stalls > 80:
                return math.inf
        phi = nxt
        t += h
        if t - t0 > _MAX_HORIZON:
            return math.inf
    raise EngineError("first-passage search did not terminate")


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


def run_trajectory(model: GeneralizedLindbladModel, initial: ComponentState,
                   grid: np.ndarray, rng: RngStream,
                   trajectory_id: int | None = None) -> TrajectoryResult:
    """Simulate one trajectory, recording normalized states at grid times.

    The grid must start at 0 and increase strictly.  Each cycle draws one
    uniform for the waiting time and, if a jump occurs before the end of
    the grid, one uniform for the channel choice.  A grid point that
    coincides exactly with a jump time records the pre-jump state.
    """
    try:
        return _run_trajectory(model, initial, grid, rng)
    except Exception as exc:
        if trajectory_id is None:
            raise
        raise TrajectoryError(f"trajectory {trajectory_id} failed: {exc}") from exc


def _run_trajectory(model, initial, grid, rng):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and increase strictly")
    total0 = initial.total_norm_sq()
    if abs(total0 - 1.0) > 1e-9:
        raise ValueError(f"initial state norm^2 is {total0}, expected 1")

    n_times = len(grid)
    states = np.empty((n_times, model.n_components, model.dim), dtype=complex)
    psi = initial.psi / math.sqrt(total0)
    states[0] = psi
    events: list[JumpEvent] = []

    # integrated hazard to every grid time, computed once per trajectory
    ih_grid = None
    ih_t = 0.0
    if model._mode == "scalar":
        ih_grid = np.asarray(model.integrated_hazard(0.0, grid))

    t = 0.0
    idx = 1
    t_end = float(grid[-1])
    while True:
        u = rng.uniform()
        tau = sample_jump_time(model, ComponentState(psi, t), u)
        if tau <= 0.0:
            raise EngineError(f"non-positive waiting time {tau} sampled at t={t}")
        t_jump = t + tau

        upto = idx
        while upto < n_times and grid[upto] <= t_jump:
            upto += 1
        if upto > idx:
            dg = None if ih_grid is None else ih_grid[idx:upto] - ih_t
            phi = _propagate_many(model, psi, t, grid[idx:upto], dg=dg)
            norms = np.sqrt(np.sum(np.abs(phi) ** 2, axis=(1, 2)))
            states[idx:upto] = phi / norms[:, None, None]
            idx = upto
        if idx >= n_times or t_jump >= t_end or math.isinf(t_jump):
            break

        phi = _propagate(model, psi, t, t_jump)
        psi = phi / math.sqrt(float(np.sum(np.abs(phi) ** 2)))
        source, label = _select_channel_fast(model, psi, t_jump, rng.uniform())
        psi = apply_jump(model, ComponentState(psi, t_jump), source, label).psi
        events.append(JumpEvent(t_jump, source, label))
        t = t_jump
        if ih_grid is not None:
            ih_t = float(model.integrated_hazard(0.0, t))

    return TrajectoryResult(times=grid, states=states, events=events)
