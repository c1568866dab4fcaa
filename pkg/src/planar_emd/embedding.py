"""Linear embedding of torus measures into L1 by frequency-space scaling.

The two embedding operators act on the transform of a measure by

    A: scale coeff(u, v) by (e(u) - 1) / (|e(u) - 1|^2 + |e(v) - 1|^2)
    B: scale coeff(u, v) by (e(v) - 1) / (|e(u) - 1|^2 + |e(v) - 1|^2)

with e(u) = exp(2*pi*i*u/n) and the (0, 0) frequency dropped, so only the
mass-zero part of a measure is seen.  mu -> (A mu, B mu) lands in
L1 + L1 (counting measure on cells) and distorts the transport distance by
at most a logarithmic factor; the single-operator variant S scales by
|e(u) - 1| + |e(v) - 1| and halves the target dimension at the price of a
polylog distortion bound.

The adjoints A*, B* act on functions and produce outputs vanishing at the
base cell (0, 0); composed with cyclic partial differences they reconstruct
any function h with h(0, 0) = 0 exactly:  A*(d1 h) + B*(d2 h) = h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import IMAG_TOL, Multiplier, apply_multiplier, partial_diff
from .measures import (
    DomainSpec,
    ProbabilityMeasure,
    SignedMeasure,
    Topology,
    center,
)


@dataclass(frozen=True)
class EmbeddedVector:
    """Image of a measure: a pair of real fields on the torus cells."""

    domain: DomainSpec
    partA: np.ndarray
    partB: np.ndarray

    def __post_init__(self):
        for name in ("partA", "partB"):
            table = np.array(getattr(self, name), dtype=np.float64, copy=True)
            if table.shape != (self.domain.n, self.domain.n):
                raise ValueError(f"{name} shape mismatch")
            table.setflags(write=False)
            object.__setattr__(self, name, table)


def _require_embeddable(domain: DomainSpec) -> None:
    if domain.topology is not Topology.TORUS:
        raise ValueError("embedding operators require torus topology")
    if domain.n < 2:
        raise ValueError("embedding operators need n >= 2")


def _axis_numerators(domain: DomainSpec):
    n = domain.n
    u = np.arange(n).reshape(-1, 1)
    v = np.arange(n).reshape(1, -1)
    eu = np.exp(2j * np.pi * u / n) - 1.0
    ev = np.exp(2j * np.pi * v / n) - 1.0
    su = 4.0 * np.sin(np.pi * u / n) ** 2
    sv = 4.0 * np.sin(np.pi * v / n) ** 2
    denom = su + sv
    denom[0, 0] = 1.0  # the origin coefficient is dropped anyway
    return eu, ev, denom


def a_multiplier(domain: DomainSpec) -> Multiplier:
    _require_embeddable(domain)
    eu, _, denom = _axis_numerators(domain)
    values = eu / denom
    values[0, 0] = 0.0
    return Multiplier(domain, values)


def b_multiplier(domain: DomainSpec) -> Multiplier:
    _require_embeddable(domain)
    _, ev, denom = _axis_numerators(domain)
    values = ev / denom
    values[0, 0] = 0.0
    return Multiplier(domain, values)


def s_multiplier(domain: DomainSpec) -> Multiplier:
    """|e(u) - 1| + |e(v) - 1|, a real, even multiplier."""
    _require_embeddable(domain)
    n = domain.n
    u = np.arange(n).reshape(-1, 1)
    v = np.arange(n).reshape(1, -1)
    au = np.abs(np.exp(2j * np.pi * u / n) - 1.0)
    av = np.abs(np.exp(2j * np.pi * v / n) - 1.0)
    # (0, 0) needs no explicit drop: both terms vanish there
    return Multiplier(domain, au + av)


def _real_output(raw: np.ndarray, what: str) -> np.ndarray:
    residue = float(np.abs(raw.imag).max(initial=0.0))
    if residue > IMAG_TOL:
        raise ValueError(f"{what} produced imaginary residue {residue}")
    return np.ascontiguousarray(raw.real)


def op_A(sigma: SignedMeasure) -> np.ndarray:
    """First embedding operator applied to a measure; returns a real field."""
    _require_embeddable(sigma.domain)
    raw = apply_multiplier(a_multiplier(sigma.domain), sigma.mass)
    return _real_output(raw, "op_A")


def op_B(sigma: SignedMeasure) -> np.ndarray:
    """Second embedding operator; op_A with the axes' roles swapped."""
    _require_embeddable(sigma.domain)
    raw = apply_multiplier(b_multiplier(sigma.domain), sigma.mass)
    return _real_output(raw, "op_B")


def op_S(sigma: SignedMeasure) -> np.ndarray:
    """Single-operator embedding variant."""
    _require_embeddable(sigma.domain)
    raw = apply_multiplier(s_multiplier(sigma.domain), sigma.mass)
    return _real_output(raw, "op_S")


def _adjoint_apply(mult: Multiplier, f: np.ndarray) -> np.ndarray:
    # sum of m * f_hat * (e_uv - 1) = T_m f minus its value at the base cell
    g = apply_multiplier(mult, f)
    g = g - g[0, 0]
    if np.isrealobj(f):
        return _real_output(g, "adjoint")
    return g


def op_A_star(f: np.ndarray, domain: DomainSpec) -> np.ndarray:
    """Adjoint of op_A on functions; output vanishes at the base cell."""
    _require_embeddable(domain)
    eu, _, denom = _axis_numerators(domain)
    values = np.conj(eu) / denom
    values[0, 0] = 0.0
    return _adjoint_apply(Multiplier(domain, values), f)


def op_B_star(f: np.ndarray, domain: DomainSpec) -> np.ndarray:
    """Adjoint of op_B on functions; output vanishes at the base cell."""
    _require_embeddable(domain)
    _, ev, denom = _axis_numerators(domain)
    values = np.conj(ev) / denom
    values[0, 0] = 0.0
    return _adjoint_apply(Multiplier(domain, values), f)


def reconstruct(h: np.ndarray, domain: DomainSpec) -> np.ndarray:
    """A*(d1 h) + B*(d2 h); the identity on fields vanishing at (0, 0)."""
    _require_embeddable(domain)
    arr = np.asarray(h)
    if abs(complex(arr[0, 0])) > 1e-12:
        raise ValueError("reconstruct requires h(0, 0) = 0")
    return op_A_star(partial_diff(1, arr, domain), domain) + op_B_star(
        partial_diff(2, arr, domain), domain
    )


def embed(mu: ProbabilityMeasure, variant: str = "ab") -> EmbeddedVector:
    """Center a probability measure and push it through the embedding.

    ``variant="ab"`` fills both parts with (A sigma, B sigma); ``"s"`` puts
    S sigma in the first part and zeros in the second, so distances work the
    same way for either variant.
    """
    _require_embeddable(mu.domain)
    sigma = center(mu)
    if variant == "ab":
        return EmbeddedVector(mu.domain, op_A(sigma), op_B(sigma))
    if variant == "s":
        zero = np.zeros((mu.domain.n, mu.domain.n))
        return EmbeddedVector(mu.domain, op_S(sigma), zero)
    raise ValueError(f"unknown embedding variant: {variant!r}")


def embedded_distance(x: EmbeddedVector, y: EmbeddedVector) -> float:
    """L1 + L1 distance under counting measure on cells."""
    if x.domain != y.domain:
        raise ValueError("embedded vectors live on different domains")
    return float(np.abs(x.partA - y.partA).sum() + np.abs(x.partB - y.partB).sum())


def grid_to_torus(m):
    """Place a grid measure into the 2n torus, first quadrant, identically.

    Coordinate gaps within the quadrant never exceed n, so the geodesic
    torus distance restricted to the quadrant equals the planar distance
    and transport costs are preserved exactly.
    """
    measure = m.measure if isinstance(m, ProbabilityMeasure) else m
    if measure.domain.topology is not Topology.GRID:
        raise ValueError("grid_to_torus expects a grid measure")
    n = measure.domain.n
    target = DomainSpec(2 * n, Topology.TORUS)
    table = np.zeros((2 * n, 2 * n))
    table[:n, :n] = measure.mass
    out = SignedMeasure(target, table)
    if isinstance(m, ProbabilityMeasure):
        return ProbabilityMeasure(out)
    return out
