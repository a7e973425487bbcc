"""Two-state system coupled to a finite environment of two energy bands.

Provides the physical parameter set, the band relaxation rates, the
squared-sinc environment correlation kernel with its running integrals,
closed-form TCL2 / TCL2(t) population baselines, and ready-to-run
generalized Lindblad models for the weak-coupling (constant rate) and
strong-coupling (time-modulated rate) regimes, including the
strong-coupling waiting-time samplers.

Basis convention: index 0 is the upper system level ``|e>``, index 1 the
lower level ``|g>``.  Component 0 of a trajectory is correlated with the
lower band, component 1 with the upper band.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .engine import GeneralizedLindbladModel, JumpChannel
from .numerics import find_root_increasing, gauss_legendre, sine_integral

__all__ = [
    "TwoBandParams",
    "RatePair",
    "SamplerConvention",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "SIGMA_Z",
    "relaxation_rates",
    "correlation_h",
    "integral_h",
    "decay_exponent",
    "decay_exponent_grid",
    "tcl2_population",
    "tcl2t_population",
    "HazardTable",
    "build_weak_model",
    "build_strong_model",
    "sample_strong_waiting_time",
]

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

#: largest -log(1 - u) reachable with open-interval uniform draws
_MAX_LOG_U = 38.0


@dataclass(frozen=True)
class TwoBandParams:
    """Physical configuration: level distance, band width, band sizes,
    interaction strength and the master seed of a run."""

    lam: float
    delta_e: float = 1.0
    delta_eps: float = 0.31
    n1: int = 200
    n2: int = 200
    seed: int = 12345

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"coupling strength must be nonnegative, got {self.lam}")
        if self.delta_eps <= 0:
            raise ValueError(f"band width must be positive, got {self.delta_eps}")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"band level counts must be >= 1, got {self.n1}, {self.n2}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in uint64")


@dataclass(frozen=True)
class RatePair:
    gamma1: float
    gamma2: float

    @property
    def total(self) -> float:
        return self.gamma1 + self.gamma2


def relaxation_rates(params: TwoBandParams) -> RatePair:
    """Band relaxation rates gamma_{1,2} = 2 pi lam^2 N_{1,2} / delta_eps."""
    return RatePair(
        gamma1=2.0 * math.pi * params.lam**2 * params.n1 / params.delta_eps,
        gamma2=2.0 * math.pi * params.lam**2 * params.n2 / params.delta_eps,
    )


# ---------------------------------------------------------------------------
# Correlation kernel and its integrals
# ---------------------------------------------------------------------------


def correlation_h(t, delta_eps: float):
    """Environment correlation kernel h(t) = (de/2pi) sinc^2(de*t/2).

    The removable singularity at t = 0 evaluates to de/(2 pi); the kernel
    is even and its total integral over [0, inf) is 1/2.
    """
    x = np.asarray(t, dtype=float) * (delta_eps / 2.0)
    out = delta_eps / (2.0 * math.pi) * np.sinc(x / math.pi) ** 2
    return out if isinstance(t, np.ndarray) else float(out)


def integral_h(t, delta_eps: float):
    """Running integral J(t) of the correlation kernel from 0 to t.

    Closed form J(t) = [Si(de*t) + (cos(de*t) - 1)/(de*t)] / pi, extended
    oddly to negative t.  Nondecreasing on t >= 0 with J(0) = 0 and
    J(inf) = 1/2.
    """
    if isinstance(t, np.ndarray):
        x = t * delta_eps
        safe = np.where(x == 0.0, 1.0, x)
        val = (sine_integral(x) + (np.cos(safe) - 1.0) / safe) / math.pi
        return np.where(x == 0.0, 0.0, val)
    x = float(t) * delta_eps
    if x == 0.0:
        return 0.0
    return (sine_integral(x) + (math.cos(x) - 1.0) / x) / math.pi


def _tau_integral_h(tau: float, delta_eps: float) -> float:
    """tau * J(tau) in closed form: [tau Si(de tau) + (cos(de tau) - 1)/de] / pi."""
    if tau == 0.0:
        return 0.0
    x = delta_eps * tau
    return (tau * sine_integral(x) + (math.cos(x) - 1.0) / delta_eps) / math.pi


def decay_exponent(t: float, params: TwoBandParams, tol: float = 1e-10) -> float:
    """Accumulated decay exponent 2 (g1 + g2) * int_0^t J(s) ds.

    Equals the double time integral of the correlation kernel scaled by
    twice the summed relaxation rates; evaluated by adaptive quadrature
    over the closed-form J.
    """
    if t == 0.0:
        return 0.0
    rates = relaxation_rates(params)
    j = partial(integral_h, delta_eps=params.delta_eps)
    return 2.0 * rates.total * gauss_legendre(j, 0.0, t, tol)


def decay_exponent_grid(ts: np.ndarray, params: TwoBandParams, tol: float = 1e-10) -> np.ndarray:
    """Decay exponent on an increasing grid, by cumulative quadrature."""
    ts = np.asarray(ts, dtype=float)
    rates = relaxation_rates(params)
    j = partial(integral_h, delta_eps=params.delta_eps)
    out = np.empty(len(ts))
    acc = 0.0
    prev = 0.0
    for k, t in enumerate(ts):
        if t < prev:
            raise ValueError("grid must be nondecreasing")
        if t > prev:
            acc += gauss_legendre(j, prev, float(t), tol)
            prev = float(t)
        out[k] = 2.0 * rates.total * acc
    return out


# ---------------------------------------------------------------------------
# TCL baselines
# ---------------------------------------------------------------------------


def tcl2_population(t, params: TwoBandParams, initial: float = 1.0):
    """Upper-level population under constant relaxation rates.

    p(t) = p0 [g1/(g1+g2) + g2/(g1+g2) exp(-(g1+g2) t)]; for g1 = g2 this
    is p0 (1 + exp(-2 g t)) / 2.  The decaying coefficient g2/(g1+g2) is
    fixed by the initial condition p(0) = p0.
    """
    if not (0.0 <= initial <= 1.0):
        raise ValueError("initial population must lie in [0, 1]")
    rates = relaxation_rates(params)
    tarr = np.asarray(t, dtype=float)
    if rates.total == 0.0:
        out = np.full_like(tarr, initial)
    else:
        w1 = rates.gamma1 / rates.total
        out = initial * (w1 + (1.0 - w1) * np.exp(-rates.total * tarr))
    return out if isinstance(t, np.ndarray) else float(out)


def tcl2t_population(t, params: TwoBandParams, initial: float = 1.0):
    """Upper-level population with the time-dependent rate correction.

    Same structure as the constant-rate solution but with the accumulated
    exponent of `decay_exponent` in place of (g1+g2) t.
    """
    if not (0.0 <= initial <= 1.0):
        raise ValueError("initial population must lie in [0, 1]")
    rates = relaxation_rates(params)
    if rates.total == 0.0:
        if isinstance(t, np.ndarray):
            return np.full(len(t), initial)
        return initial
    w1 = rates.gamma1 / rates.total
    if isinstance(t, np.ndarray):
        gam = decay_exponent_grid(t, params)
        return initial * (w1 + (1.0 - w1) * np.exp(-gam))
    return initial * (w1 + (1.0 - w1) * math.exp(-decay_exponent(float(t), params)))


# ---------------------------------------------------------------------------
# Cumulative hazard table
# ---------------------------------------------------------------------------

_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class HazardTable:
    """Dense table of K(t) = int_0^t J on a uniform grid with cubic Hermite
    interpolation (exact J values provide the derivatives).

    Built once per model and shared read-only by all trajectories; node
    spacing 0.02 keeps the interpolation error near 1e-13.
    """

    delta_eps: float
    step: float
    kvals: np.ndarray
    jvals: np.ndarray

    @property
    def t_end(self) -> float:
        return self.step * (len(self.kvals) - 1)

    @classmethod
    def build(cls, delta_eps: float, t_end: float, step: float = 0.02) -> "HazardTable":
        n_panels = max(int(math.ceil(t_end / step)), 1)
        nodes = np.arange(n_panels + 1) * step
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        half = 0.5 * step
        pts = mid[:, None] + half * _GL8_NODES[None, :]
        jvals_panel = integral_h(pts.ravel(), delta_eps).reshape(pts.shape)
        panels = half * (jvals_panel @ _GL8_WEIGHTS)
        kvals = np.concatenate([[0.0], np.cumsum(panels)])
        jvals = integral_h(nodes, delta_eps)
        return cls(delta_eps=delta_eps, step=step, kvals=kvals, jvals=jvals)

    def __post_init__(self):
        self._refresh_lists()

    def _refresh_lists(self):
        # plain-float copies: scalar lookups in the trajectory hot loop are
        # several times faster on lists than on numpy arrays
        self._klist = [float(v) for v in self.kvals]
        self._jlist = [float(v) for v in self.jvals]

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_klist", None)
        state.pop("_jlist", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._refresh_lists()

    def value(self, t: float) -> float:
        """K(t) for 0 <= t <= t_end."""
        if t < 0.0 or t > self.t_end + 1e-9:
            raise ValueError(f"t={t} outside table range [0, {self.t_end}]")
        i = int(t / self.step)
        i = i if i < len(self._klist) - 1 else len(self._klist) - 2
        s = (t - i * self.step) / self.step
        s2 = s * s
        oms2 = (1.0 - s) * (1.0 - s)
        h00 = (1.0 + 2.0 * s) * oms2
        h10 = s * oms2
        h01 = s2 * (3.0 - 2.0 * s)
        h11 = s2 * (s - 1.0)
        return (h00 * self._klist[i] + h01 * self._klist[i + 1]
                + self.step * (h10 * self._jlist[i] + h11 * self._jlist[i + 1]))

    def values(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if ts.size <= 32:
            return np.array([self.value(float(t)) for t in ts.ravel()]).reshape(ts.shape)
        if np.any(ts < 0.0) or np.any(ts > self.t_end + 1e-9):
            raise ValueError("times outside table range")
        i = np.clip((ts / self.step).astype(int), 0, len(self.kvals) - 2)
        s = (ts - i * self.step) / self.step
        s2 = s * s
        oms2 = (1.0 - s) * (1.0 - s)
        h00 = (1.0 + 2.0 * s) * oms2
        h10 = s * oms2
        h01 = s2 * (3.0 - 2.0 * s)
        h11 = s2 * (s - 1.0)
        return (h00 * self.kvals[i] + h01 * self.kvals[i + 1]
                + self.step * (h10 * self.jvals[i] + h11 * self.jvals[i + 1]))

    def inverse(self, y: float, tol: float = 1e-12) -> float:
        """Time t with K(t) = y, for 0 <= y <= K(t_end)."""
        if y <= 0.0:
            return 0.0
        if y > self.kvals[-1]:
            raise ValueError(f"y={y} beyond table range (K_max={self.kvals[-1]})")
        i = int(np.searchsorted(self.kvals, y, side="right")) - 1
        i = min(i, len(self.kvals) - 2)
        lo, hi = i * self.step, (i + 1) * self.step
        return find_root_increasing(
            lambda t: self.value(t) - y, lo, hi, tol=tol,
            f_lo=float(self.kvals[i]) - y, f_hi=float(self.kvals[i + 1]) - y)


def _table_integral(t0: float, t1, table: HazardTable):
    """Integral of J over [t0, t1] from the table; t1 may be an array."""
    if isinstance(t1, np.ndarray):
        return table.values(t1) - table.value(t0)
    return table.value(t1) - table.value(t0)


# ---------------------------------------------------------------------------
# Model builders and strong-coupling waiting times
# ---------------------------------------------------------------------------


class SamplerConvention(enum.Enum):
    """Which strong-coupling waiting-time distribution to invert.

    HAZARD_CONSISTENT integrates the instantaneous modulated rates in
    global time, which reproduces the time-dependent TCL2 populations
    exactly.  PRINTED_F inverts the distribution whose exponent is
    proportional to tau * J(tau), measured from the previous jump.
    """

    HAZARD_CONSISTENT = "hazard_consistent"
    PRINTED_F = "printed_f"


def build_weak_model(params: TwoBandParams) -> GeneralizedLindbladModel:
    """Constant-rate two-component model: jumps sqrt(g2) sigma- (component
    0 -> 1) and sqrt(g1) sigma+ (component 1 -> 0), zero Hamiltonians."""
    rates = relaxation_rates(params)
    zero = np.zeros((2, 2), dtype=complex)
    ch0 = JumpChannel(source=0, label=0,
                      operators=np.array([zero, math.sqrt(rates.gamma2) * SIGMA_MINUS]))
    ch1 = JumpChannel(source=1, label=0,
                      operators=np.array([math.sqrt(rates.gamma1) * SIGMA_PLUS, zero]))
    return GeneralizedLindbladModel(
        hamiltonians=np.zeros((2, 2, 2), dtype=complex),
        channels=(ch0, ch1),
    )


def _strong_table_horizon(params: TwoBandParams, t_max: float) -> float:
    """Table length covering every waiting time reachable from t0 <= t_max."""
    rates = relaxation_rates(params)
    gmin = min(rates.gamma1, rates.gamma2)
    if gmin <= 0.0:
        return t_max + 10.0 / params.delta_eps
    # K grows at least like 0.4 (tau - 20/de) beyond the kernel memory time
    margin = _MAX_LOG_U / (2.0 * gmin) / 0.4 + 20.0 / params.delta_eps + 10.0
    return t_max + margin


def build_strong_model(params: TwoBandParams,
                       convention: SamplerConvention = SamplerConvention.HAZARD_CONSISTENT,
                       t_max: float | None = None) -> GeneralizedLindbladModel:
    """Time-modulated two-component model with jump scale sqrt(2 gamma).

    All dissipative terms carry the hazard modulation g(t) = J(t).  Under
    HAZARD_CONSISTENT the waiting times invert the accumulated modulated
    rate in global time; under PRINTED_F they invert the distribution with
    exponent 2 (g1 c2 + g2 c1) tau J(tau) measured from the jump.  The
    model's hazard table must cover the run, so pass the run's ``t_max``
    (default: 60 / delta_eps).
    """
    rates = relaxation_rates(params)
    if t_max is None:
        t_max = 60.0 / params.delta_eps
    table = HazardTable.build(params.delta_eps, _strong_table_horizon(params, t_max))
    zero = np.zeros((2, 2), dtype=complex)
    ch0 = JumpChannel(source=0, label=0,
                      operators=np.array([zero, math.sqrt(2.0 * rates.gamma2) * SIGMA_MINUS]))
    ch1 = JumpChannel(source=1, label=0,
                      operators=np.array([math.sqrt(2.0 * rates.gamma1) * SIGMA_PLUS, zero]))
    return GeneralizedLindbladModel(
        hamiltonians=np.zeros((2, 2, 2), dtype=complex),
        channels=(ch0, ch1),
        hazard=partial(integral_h, delta_eps=params.delta_eps),
        hazard_integral=partial(_table_integral, table=table),
        waiting_time_sampler=partial(_strong_state_sampler, params=params,
                                     convention=convention, table=table),
    )


def _strong_state_sampler(psi: np.ndarray, t0: float, u: float, *,
                          params: TwoBandParams, convention: SamplerConvention,
                          table: HazardTable) -> float:
    c1 = float(abs(psi[0, 0]) ** 2)  # ||sigma- psi_0||^2
    c2 = float(abs(psi[1, 1]) ** 2)  # ||sigma+ psi_1||^2
    return sample_strong_waiting_time(u, t0, c1, c2, params, convention, table=table)


def sample_strong_waiting_time(u: float, t0: float, c1: float, c2: float,
                               params: TwoBandParams,
                               convention: SamplerConvention,
                               table: HazardTable | None = None) -> float:
    """Invert the strong-coupling waiting-time distribution.

    ``c1``/``c2`` are the squared jump amplitudes of components 0 and 1
    (at most one is positive along a trajectory).  Returns ``inf`` when no
    jump can occur.
    """
    if not (0.0 < u < 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    rates = relaxation_rates(params)
    rate_coef = 2.0 * (rates.gamma1 * c2 + rates.gamma2 * c1)
    if rate_coef <= 0.0:
        return math.inf
    target = -math.log1p(-u)

    if convention is SamplerConvention.PRINTED_F:
        de = params.delta_eps

        def exponent(tau: float) -> float:
            return rate_coef * _tau_integral_h(tau, de) - target

        hi = max(2.0 * target / rate_coef, 1.0 / de)
        f_hi = exponent(hi)
        while f_hi < 0.0:
            hi *= 2.0
            if hi > 2.0**62:
                return math.inf
            f_hi = exponent(hi)
        return find_root_increasing(exponent, 0.0, hi, tol=1e-12 * max(1.0, target),
                                    f_lo=-target, f_hi=f_hi)

    if convention is SamplerConvention.HAZARD_CONSISTENT:
        dk = target / rate_coef
        if table is not None:
            return table.inverse(table.value(t0) + dk) - t0
        j = partial(integral_h, delta_eps=params.delta_eps)

        def accumulated(tau: float) -> float:
            return gauss_legendre(j, t0, t0 + tau, 1e-12) - dk

        hi = max(2.0 * dk, 1.0 / params.delta_eps)
        f_hi = accumulated(hi)
        while f_hi < 0.0:
            hi *= 2.0
            if hi > 2.0**62:
                return math.inf
            f_hi = accumulated(hi)
        return find_root_increasing(accumulated, 0.0, hi, tol=1e-12 * max(1.0, dk),
                                    f_lo=-dk, f_hi=f_hi)

    raise ValueError(f"unknown sampler convention: {convention!r}")
