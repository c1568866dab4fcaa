"""2-D discrete Fourier analysis on the n x n torus, for arbitrary n.

Conventions.  Characters are e_{uv}(a, b) = exp(2*pi*i*(a*u + b*v)/n).  The
forward transform carries the 1/n^2 factor,

    coeffs(u, v) = (1/n^2) * sum_{a,b} f(a, b) * exp(-2*pi*i*(a*u + b*v)/n),

and the inverse carries none, so f = sum_{u,v} coeffs(u, v) * e_{uv}.

The 2-D transform is a row-column decomposition into 1-D transforms; lengths
that are powers of two run an iterative radix-2 kernel, everything else goes
through a Bluestein chirp-z reduction to a padded power-of-two convolution.
Twiddle and chirp tables are cached per length and immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import DomainSpec, Topology

IMAG_TOL = 1e-9

# ---------------------------------------------------------------------------
# 1-D kernels (operate along the last axis of a (m, L) block)
# ---------------------------------------------------------------------------

_POW2_CACHE: dict = {}
_BLUESTEIN_CACHE: dict = {}


def _is_pow2(L: int) -> bool:
    return L & (L - 1) == 0


def _pow2_tables(L: int):
    """Bit-reversal permutation and per-stage twiddles for length L = 2^k."""
    tables = _POW2_CACHE.get(L)
    if tables is None:
        bits = L.bit_length() - 1
        rev = np.zeros(L, dtype=np.int64)
        for i in range(L):
            r = 0
            x = i
            for _ in range(bits):
                r = (r << 1) | (x & 1)
                x >>= 1
            rev[i] = r
        twiddles = []
        half = 1
        while half < L:
            w = np.exp(-2j * np.pi * np.arange(half) / (2 * half))
            w.setflags(write=False)
            twiddles.append(w)
            half *= 2
        rev.setflags(write=False)
        tables = (rev, tuple(twiddles))
        _POW2_CACHE[L] = tables
    return tables


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    """Unnormalized DFT along axis 1 for power-of-two lengths."""
    m, L = x.shape
    if L == 1:
        return x.copy()
    rev, twiddles = _pow2_tables(L)
    y = np.ascontiguousarray(x[:, rev], dtype=np.complex128)
    half = 1
    stage = 0
    while half < L:
        step = 2 * half
        w = twiddles[stage]
        view = y.reshape(m, L // step, step)
        even = view[:, :, :half]
        odd = view[:, :, half:] * w
        view[:, :, half:] = even - odd
        view[:, :, :half] = even + odd
        half = step
        stage += 1
    return y


def _ifft_pow2(x: np.ndarray) -> np.ndarray:
    """Normalized inverse of :func:`_fft_pow2` (divides by L)."""
    return np.conj(_fft_pow2(np.conj(x))) / x.shape[1]


def _bluestein_tables(L: int):
    tables = _BLUESTEIN_CACHE.get(L)
    if tables is None:
        M = 1
        while M < 2 * L - 1:
            M *= 2
        j = np.arange(L)
        chirp = np.exp(-1j * np.pi * ((j * j) % (2 * L)) / L)
        kernel = np.zeros(M, dtype=np.complex128)
        kernel[:L] = np.conj(chirp)
        kernel[M - L + 1:] = np.conj(chirp[1:][::-1])
        kernel_hat = _fft_pow2(kernel[None, :])[0]
        chirp.setflags(write=False)
        kernel_hat.setflags(write=False)
        tables = (M, chirp, kernel_hat)
        _BLUESTEIN_CACHE[L] = tables
    return tables


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    """Unnormalized DFT along axis 1 for arbitrary lengths (chirp-z)."""
    m, L = x.shape
    M, chirp, kernel_hat = _bluestein_tables(L)
    a = np.zeros((m, M), dtype=np.complex128)
    a[:, :L] = x * chirp
    conv = _ifft_pow2(_fft_pow2(a) * kernel_hat)
    return conv[:, :L] * chirp


def _dft_rows(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized (inverse) DFT along axis 1 of a 2-D complex block."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if inverse:
        return np.conj(_dft_rows(np.conj(x)))
    L = x.shape[1]
    if L == 1:
        return x.copy()
    if _is_pow2(L):
        return _fft_pow2(x)
    return _fft_bluestein(x)


def _dft2_core(values: np.ndarray, inverse: bool = False) -> np.ndarray:
    y = _dft_rows(values, inverse)
    y = _dft_rows(y.T, inverse).T
    return np.ascontiguousarray(y)


# ---------------------------------------------------------------------------
# Public surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralField:
    """Complex coefficient table over frequencies (u, v) in Z_n^2."""

    domain: DomainSpec
    coeffs: np.ndarray

    def __post_init__(self):
        table = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if table.shape != (self.domain.n, self.domain.n):
            raise ValueError("coefficient table shape mismatch")
        table.setflags(write=False)
        object.__setattr__(self, "coeffs", table)


@dataclass(frozen=True)
class Multiplier:
    """Pointwise frequency weights m(u, v) defining the operator T_m."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        table = np.array(self.values, dtype=np.complex128, copy=True)
        if table.shape != (self.domain.n, self.domain.n):
            raise ValueError("multiplier table shape mismatch")
        if not np.all(np.isfinite(table)):
            raise ValueError("multiplier contains non-finite entries")
        table.setflags(write=False)
        object.__setattr__(self, "values", table)


def _require_torus(domain: DomainSpec) -> None:
    if domain.topology is not Topology.TORUS:
        raise ValueError("operation requires torus topology")


def _check_field(field: np.ndarray, domain: DomainSpec) -> np.ndarray:
    arr = np.asarray(field)
    if arr.shape != (domain.n, domain.n):
        raise ValueError(
            f"field shape {arr.shape} does not match domain {domain.n}x{domain.n}"
        )
    return arr


def character(domain: DomainSpec, u: int, v: int) -> np.ndarray:
    """The character e_{uv}(a, b) = exp(2*pi*i*(a*u + b*v)/n)."""
    n = domain.n
    a = np.arange(n).reshape(-1, 1)
    b = np.arange(n).reshape(1, -1)
    return np.exp(2j * np.pi * ((a * u + b * v) % n) / n)


def dft2(field: np.ndarray, domain: DomainSpec) -> SpectralField:
    """Forward transform with the 1/n^2 normalization."""
    _require_torus(domain)
    arr = _check_field(field, domain)
    coeffs = _dft2_core(arr.astype(np.complex128, copy=False)) / domain.size
    return SpectralField(domain, coeffs)


def idft2(spectrum: SpectralField) -> np.ndarray:
    """Inverse transform (no normalization factor); returns a complex field."""
    return _dft2_core(spectrum.coeffs, inverse=True)


def apply_multiplier(mult: Multiplier, field: np.ndarray) -> np.ndarray:
    """T_m f: transform, scale pointwise by m, transform back."""
    spectrum = dft2(field, mult.domain)
    return idft2(SpectralField(mult.domain, mult.values * spectrum.coeffs))


def partial_diff(axis: int, field: np.ndarray, domain: DomainSpec) -> np.ndarray:
    """Cyclic forward difference h(x + e_axis) - h(x); axis 1 is the first
    coordinate, axis 2 the second."""
    _require_torus(domain)
    arr = _check_field(field, domain)
    if axis == 1:
        return np.roll(arr, -1, axis=0) - arr
    if axis == 2:
        return np.roll(arr, -1, axis=1) - arr
    raise ValueError(f"axis must be 1 or 2, got {axis}")


def _freq_weights(domain: DomainSpec) -> tuple:
    """|exp(2*pi*i*u/n) - 1|^2 per axis, as broadcastable (n,1)/(1,n) grids.

    Evaluated as 4*sin(pi*u/n)^2, which is the same quantity without the
    cancellation error of the literal complex form.
    """
    n = domain.n
    u = np.arange(n).reshape(-1, 1)
    v = np.arange(n).reshape(1, -1)
    su = 4.0 * np.sin(np.pi * u / n) ** 2
    sv = 4.0 * np.sin(np.pi * v / n) ** 2
    return su, sv


def multiplier_m1(domain: DomainSpec) -> Multiplier:
    """m1(u,v) = |e(u)-1|^2 / (|e(u)-1|^2 + |e(v)-1|^2), zero at the origin,
    where e(u) is shorthand for exp(2*pi*i*u/n)."""
    if domain.n < 2:
        raise ValueError("multipliers need n >= 2")
    su, sv = _freq_weights(domain)
    denom = su + sv
    denom[0, 0] = 1.0  # origin is zeroed below
    values = su / denom
    values[0, 0] = 0.0
    return Multiplier(domain, values)


def multiplier_m2(domain: DomainSpec) -> Multiplier:
    """m2(u,v) = (conj(e(u))-1) * (e(v)-1) / (|e(u)-1|^2 + |e(v)-1|^2)."""
    if domain.n < 2:
        raise ValueError("multipliers need n >= 2")
    n = domain.n
    su, sv = _freq_weights(domain)
    denom = su + sv
    denom[0, 0] = 1.0
    u = np.arange(n).reshape(-1, 1)
    v = np.arange(n).reshape(1, -1)
    num = (np.exp(-2j * np.pi * u / n) - 1.0) * (np.exp(2j * np.pi * v / n) - 1.0)
    values = num / denom
    values[0, 0] = 0.0
    return Multiplier(domain, values)


def estimate_multiplier_pnorm(
    mult: Multiplier, p: float, trials: int, seed
) -> float:
    """Empirical lower bound on the p->p operator norm of T_m.

    Takes the best ratio ||T_m f||_p / ||f||_p over a seeded mix of random
    Gaussian fields, random Diracs, and random sign fields; Diracs probe the
    weak-(1,1) end of the operator's behaviour.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n = mult.domain.n
    best = 0.0
    for trial in range(trials):
        style = trial % 3
        if style == 0:
            f = rng.standard_normal((n, n))
        elif style == 1:
            f = np.zeros((n, n))
            f[rng.integers(n), rng.integers(n)] = 1.0
        else:
            f = rng.choice([-1.0, 1.0], size=(n, n))
        nf = float(np.sum(np.abs(f) ** p) ** (1.0 / p))
        if nf == 0.0:
            continue
        tf = apply_multiplier(mult, f)
        ntf = float(np.sum(np.abs(tf) ** p) ** (1.0 / p))
        ratio = ntf / nf
        if ratio > best:
            best = ratio
    return best
