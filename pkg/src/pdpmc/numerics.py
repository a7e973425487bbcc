"""Shared numerical kernels: special functions, quadrature, root finding,
Hermitian eigendecomposition and reproducible random-number streams.

Everything in this module is pure given its inputs. `RngStream` instances
are meant to be owned by a single trajectory at a time; distinct stream
indices give statistically independent, platform-stable sequences.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "NonConvergenceError",
    "BracketError",
    "NonHermitianError",
    "sine_integral",
    "gauss_legendre",
    "find_root_increasing",
    "hermitian_eig",
    "RngStream",
]


class NonConvergenceError(RuntimeError):
    """Raised when an iterative scheme exceeds its iteration/panel budget."""


class BracketError(ValueError):
    """Raised when a root bracket does not satisfy f(lo) <= 0 <= f(hi)."""


class NonHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


# ---------------------------------------------------------------------------
# Sine integral
# ---------------------------------------------------------------------------

_SI_SERIES_CUTOFF = 4.0
_SI_CF_MAXIT = 240


def _si_series(x: float) -> float:
    # Power series sum_k (-1)^k x^(2k+1) / ((2k+1)(2k+1)!), fine for |x| < 4:
    # the largest term is O(x) so there is no destructive cancellation.
    total = x
    term = x
    x2 = x * x
    for k in range(1, 40):
        term *= -x2 / ((2 * k) * (2 * k + 1))
        new = total + term / (2 * k + 1)
        if new == total:
            return total
        total = new
    return total


def _si_asymptotic(x: float) -> float:
    # Modified Lentz continued fraction for E1(i*x); then
    # Si(x) = pi/2 + Im E1(i*x).  Near machine precision for x >= 4.
    b = complex(1.0, x)
    c = complex(1e308, 0.0)
    d = 1.0 / b
    h = d
    for i in range(2, _SI_CF_MAXIT):
        a = -((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        step = c * d
        h *= step
        if abs(step.real - 1.0) + abs(step.imag) < 1e-16:
            e1 = complex(math.cos(x), -math.sin(x)) * h
            return math.pi / 2 + e1.imag
    raise NonConvergenceError(f"sine_integral continued fraction stalled at x={x}")


def _si_scalar(x: float) -> float:
    if x < 0.0:
        return -_si_scalar(-x)
    if x == 0.0:
        return 0.0
    if x < _SI_SERIES_CUTOFF:
        return _si_series(x)
    return _si_asymptotic(x)


def _si_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    sign = np.sign(x)
    ax = np.abs(x)

    small = ax < _SI_SERIES_CUTOFF
    if np.any(small):
        xs = ax[small]
        total = xs.copy()
        term = xs.copy()
        x2 = xs * xs
        for k in range(1, 40):
            term *= -x2 / ((2 * k) * (2 * k + 1))
            total += term / (2 * k + 1)
        out[small] = total

    big = ~small
    if np.any(big):
        xb = ax[big]
        b = 1.0 + 1j * xb
        c = np.full_like(b, 1e308 + 0j)
        d = 1.0 / b
        h = d.copy()
        active = np.ones(xb.shape, dtype=bool)
        for i in range(2, _SI_CF_MAXIT):
            a = -((i - 1) ** 2)
            b += 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            step = c * d
            h *= np.where(active, step, 1.0)
            active &= np.abs(step.real - 1.0) + np.abs(step.imag) >= 1e-16
            if not active.any():
                break
        else:
            raise NonConvergenceError("sine_integral continued fraction stalled")
        e1 = (np.cos(xb) - 1j * np.sin(xb)) * h
        out[big] = math.pi / 2 + e1.imag

    return out * sign


def sine_integral(x):
    """Sine integral Si(x) = integral of sin(u)/u from 0 to x.

    Uses the alternating power series below ``x = 4`` and a complex
    continued fraction for the exponential integral above it; absolute
    error is below 1e-13 over ``[0, 1e4]``.  Extended as an odd function
    to negative arguments.  Accepts scalars or numpy arrays.
    """
    if isinstance(x, np.ndarray):
        return _si_array(x)
    return _si_scalar(float(x))


# ---------------------------------------------------------------------------
# Adaptive Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_panel(f, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(np.asarray(f(mid + half * _GL_NODES), dtype=float), _GL_WEIGHTS))


def gauss_legendre(f, a: float, b: float, tol: float = 1e-10, max_panels: int = 4096) -> float:
    """Adaptive 16-point Gauss-Legendre integral of ``f`` over ``[a, b]``.

    Panels are bisected until the whole-vs-halves estimate of each panel's
    error drops below its width-proportional share of ``tol``.  ``f`` must
    accept numpy arrays of abscissae.

    Raises
    ------
    NonConvergenceError
        If more than ``max_panels`` panels are needed.
    """
    if not (a <= b):
        raise ValueError(f"invalid interval [{a}, {b}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0

    width = b - a
    total = 0.0
    stack = [(a, b, _gl_panel(f, a, b))]
    panels = 0
    while stack:
        lo, hi, whole = stack.pop()
        panels += 1
        if panels > max_panels:
            raise NonConvergenceError(
                f"gauss_legendre exceeded {max_panels} panels on [{a}, {b}]"
            )
        mid = 0.5 * (lo + hi)
        left = _gl_panel(f, lo, mid)
        right = _gl_panel(f, mid, hi)
        err = abs(left + right - whole)
        if err <= tol * max((hi - lo) / width, 1e-3) or (hi - lo) < 1e-14 * width:
            total += left + right
        else:
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
    return total


# ---------------------------------------------------------------------------
# Bracketed root finding on nondecreasing functions
# ---------------------------------------------------------------------------


def find_root_increasing(f, lo: float, hi: float, tol: float = 1e-12,
                         f_lo: float | None = None, f_hi: float | None = None) -> float:
    """Root of a continuous nondecreasing ``f`` on ``[lo, hi]`` by Brent's method.

    Requires ``f(lo) <= 0 <= f(hi)``.  Stops when ``|f(x)| <= tol`` or the
    bracket width falls below ``tol * max(1, |x|)``.

    ``f_lo``/``f_hi`` may pass along already-computed endpoint values.
    """
    fa = float(f(lo)) if f_lo is None else f_lo
    fb = float(f(hi)) if f_hi is None else f_hi
    if fa > 0.0 or fb < 0.0:
        raise BracketError(f"f({lo})={fa}, f({hi})={fb} does not bracket a root")
    if fa == 0.0:
        return lo
    if fb == 0.0:
        return hi

    a, b = lo, hi
    c, fc = a, fa
    d = e = b - a
    for _ in range(200):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        xtol = 0.5 * tol * max(1.0, abs(b))
        m = 0.5 * (c - b)
        if abs(fb) <= tol or abs(m) <= xtol:
            return b
        if abs(e) < xtol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(xtol * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        b = b + (d if abs(d) > xtol else math.copysign(xtol, m))
        fb = float(f(b))
    raise NonConvergenceError("find_root_increasing exceeded 200 iterations")


# ---------------------------------------------------------------------------
# Hermitian eigendecomposition
# ---------------------------------------------------------------------------


def hermitian_eig(matrix: np.ndarray, rtol: float = 1e-12):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Returns ``(values, vectors)`` with ``matrix = vectors @ diag(values)
    @ vectors.conj().T``.  Rejects inputs whose anti-Hermitian part exceeds
    ``rtol`` relative to the matrix norm.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    scale = np.linalg.norm(matrix)
    defect = np.linalg.norm(matrix - matrix.conj().T)
    if defect > rtol * max(scale, 1e-300):
        raise NonHermitianError(
            f"matrix is not Hermitian: |H - H^dag| = {defect:.3e} (|H| = {scale:.3e})"
        )
    values, vectors = np.linalg.eigh(matrix)
    return values, vectors


# ---------------------------------------------------------------------------
# Reproducible random streams
# ---------------------------------------------------------------------------


class RngStream:
    """Counter-based random stream keyed by ``(seed, index)``.

    Built on Philox4x64, so streams with distinct indices are independent
    and a given key reproduces the identical sequence on every platform.
    Trajectory ``k`` of a run owns the stream ``RngStream(seed, k)``;
    auxiliary draws (couplings, initial environment amplitudes) use
    reserved indices well outside the trajectory range.
    """

    #: reserved stream indices for non-trajectory randomness
    COUPLINGS_INDEX = 2**63
    ENVIRONMENT_INDEX = 2**63 + 1

    def __init__(self, seed: int, index: int = 0):
        if not (0 <= seed < 2**64):
            raise ValueError("seed must fit in uint64")
        if not (0 <= index < 2**64):
            raise ValueError("stream index must fit in uint64")
        self.seed = int(seed)
        self.index = int(index)
        key = np.array([self.seed, self.index], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index})"

    def uniform(self) -> float:
        """Uniform draw on the open interval (0, 1), never exactly 0 or 1."""
        k = int(self._gen.integers(0, 2**53, dtype=np.uint64))
        return (k + 0.5) / 2**53

    def normal(self) -> float:
        """Standard real Gaussian draw (zero mean, unit variance)."""
        return float(self._gen.standard_normal())

    def normal_array(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def complex_normal(self) -> complex:
        """Complex Gaussian with zero mean and E|c|^2 = 1.

        Real and imaginary parts are independent with variance 1/2 each.
        """
        x = self._gen.standard_normal(2)
        return complex(x[0], x[1]) / math.sqrt(2.0)

    def complex_normal_array(self, shape) -> np.ndarray:
        x = self._gen.standard_normal(shape)
        y = self._gen.standard_normal(shape)
        return (x + 1j * y) / math.sqrt(2.0)
