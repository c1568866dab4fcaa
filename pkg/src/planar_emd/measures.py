"""Signed and probability measures on n-by-n grids and discrete tori.

A measure is a dense real mass table indexed by cells (a, b) with
0 <= a, b < n.  The grid carries the planar Euclidean metric, the torus the
geodesic one; the topology lives in :class:`DomainSpec` and downstream modules
key their behaviour on it.  All types are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np

# Tolerances for membership and validation.  |total| <= MASS_ZERO_TOL counts
# as total mass zero; operations requiring mass zero repair drift up to
# MASS_ZERO_REPAIR by subtracting the mean instead of erroring.
MASS_ZERO_TOL = 1e-12
MASS_ZERO_REPAIR = 1e-9
PROB_TOTAL_TOL = 1e-12
NEGATIVE_CLAMP = -1e-14

Point = Tuple[int, int]


class Topology(Enum):
    GRID = "grid"
    TORUS = "torus"


def _coerce_topology(topology) -> Topology:
    if isinstance(topology, Topology):
        return topology
    if isinstance(topology, str):
        try:
            return Topology(topology.lower())
        except ValueError:
            pass
    raise ValueError(f"unknown topology: {topology!r}")


@dataclass(frozen=True)
class DomainSpec:
    """Side length and topology of the underlying n x n cell set."""

    n: int
    topology: Topology

    def __post_init__(self):
        object.__setattr__(self, "topology", _coerce_topology(self.topology))
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError(f"side length must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 1:
            raise ValueError(f"side length must be >= 1, got {self.n}")

    @property
    def size(self) -> int:
        return self.n * self.n

    def contains(self, p: Point) -> bool:
        a, b = p
        return 0 <= int(a) < self.n and 0 <= int(b) < self.n


def grid_domain(n: int) -> DomainSpec:
    return DomainSpec(n, Topology.GRID)


def torus_domain(n: int) -> DomainSpec:
    return DomainSpec(n, Topology.TORUS)


def sequential_total(values: np.ndarray) -> float:
    """Row-major sequential sum; one fixed summation order for reproducibility."""
    flat = np.asarray(values, dtype=np.float64).ravel(order="C")
    if flat.size == 0:
        return 0.0
    return float(np.cumsum(flat)[-1])


def _frozen_table(domain: DomainSpec, values) -> np.ndarray:
    table = np.array(values, dtype=np.float64, order="C", copy=True)
    if table.shape != (domain.n, domain.n):
        raise ValueError(
            f"mass table shape {table.shape} does not match domain {domain.n}x{domain.n}"
        )
    if not np.all(np.isfinite(table)):
        raise ValueError("mass table contains non-finite entries")
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class SignedMeasure:
    """Real-valued mass field on the domain's cells."""

    domain: DomainSpec
    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _frozen_table(self.domain, self.mass))

    def total_mass(self) -> float:
        return sequential_total(self.mass)

    def is_mass_zero(self, tol: float = MASS_ZERO_TOL) -> bool:
        return abs(self.total_mass()) <= tol


@dataclass(frozen=True)
class ProbabilityMeasure:
    """Nonnegative measure of total mass one (within ``PROB_TOTAL_TOL``).

    Entries in (NEGATIVE_CLAMP, 0) are treated as representational noise and
    clamped to 0; anything more negative is rejected.
    """

    measure: SignedMeasure

    def __post_init__(self):
        mass = self.measure.mass
        lowest = float(mass.min())
        if lowest < NEGATIVE_CLAMP:
            raise ValueError(f"negative mass {lowest} below clamping threshold")
        if lowest < 0.0:
            clamped = np.where(mass < 0.0, 0.0, mass)
            object.__setattr__(
                self, "measure", SignedMeasure(self.measure.domain, clamped)
            )
        total = self.measure.total_mass()
        if abs(total - 1.0) > PROB_TOTAL_TOL:
            raise ValueError(f"total mass {total} is not 1 within {PROB_TOTAL_TOL}")

    @property
    def domain(self) -> DomainSpec:
        return self.measure.domain

    @property
    def mass(self) -> np.ndarray:
        return self.measure.mass

    def total_mass(self) -> float:
        return self.measure.total_mass()


def from_dense(domain: DomainSpec, values) -> SignedMeasure:
    """Wrap an n x n table of finite reals as a measure."""
    return SignedMeasure(domain, values)


def dirac(domain: DomainSpec, p: Point) -> ProbabilityMeasure:
    """Unit point mass at cell p."""
    if not domain.contains(p):
        raise ValueError(f"point {p} outside {domain.n}x{domain.n} domain")
    table = np.zeros((domain.n, domain.n))
    table[int(p[0]), int(p[1])] = 1.0
    return ProbabilityMeasure(SignedMeasure(domain, table))


def uniform(domain: DomainSpec) -> ProbabilityMeasure:
    """The uniform probability measure: every cell holds 1/n^2."""
    table = np.full((domain.n, domain.n), 1.0 / domain.size)
    return ProbabilityMeasure(SignedMeasure(domain, table))


def uniform_on_set(domain: DomainSpec, points: Sequence[Point]) -> ProbabilityMeasure:
    """Mass 1/k on each of k distinct cells."""
    if len(points) == 0:
        raise ValueError("point set must be nonempty")
    seen = set()
    for p in points:
        if not domain.contains(p):
            raise ValueError(f"point {p} outside {domain.n}x{domain.n} domain")
        key = (int(p[0]), int(p[1]))
        if key in seen:
            raise ValueError(f"duplicate point {key}")
        seen.add(key)
    table = np.zeros((domain.n, domain.n))
    w = 1.0 / len(points)
    for a, b in seen:
        table[a, b] = w
    return ProbabilityMeasure(SignedMeasure(domain, table))


def jordan_decompose(mu: SignedMeasure) -> Tuple[SignedMeasure, SignedMeasure]:
    """Split into disjointly supported nonnegative parts with pos - neg == mu.

    The split is entrywise, so the reconstruction is bit-exact.
    """
    pos = np.where(mu.mass > 0.0, mu.mass, 0.0)
    neg = np.where(mu.mass < 0.0, -mu.mass, 0.0)
    return SignedMeasure(mu.domain, pos), SignedMeasure(mu.domain, neg)


def difference(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> SignedMeasure:
    """mu - nu; lands in the mass-zero subspace."""
    if mu.domain != nu.domain:
        raise ValueError(f"domain mismatch: {mu.domain} vs {nu.domain}")
    return SignedMeasure(mu.domain, mu.mass - nu.mass)


def center(mu: ProbabilityMeasure) -> SignedMeasure:
    """mu minus the uniform measure; an isometry onto the mass-zero subspace."""
    return SignedMeasure(mu.domain, mu.mass - 1.0 / mu.domain.size)


def linf_norm(mu: SignedMeasure) -> float:
    """Largest absolute cell mass."""
    return float(np.abs(mu.mass).max())


# ---------------------------------------------------------------------------
# Random generators (benchmark inputs).  All are pure in (seed, domain, kind).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseK:
    """Uniform measure on k random distinct cells."""

    k: int


@dataclass(frozen=True)
class DenseDirichlet:
    """Strictly positive masses, Dirichlet(1,...,1) over all cells."""


@dataclass(frozen=True)
class DiracPair:
    """Two unit point masses at distinct random cells (returned as a pair)."""


MeasureKind = Union[SparseK, DenseDirichlet, DiracPair]


def random_measure(
    seed, domain: DomainSpec, kind: MeasureKind
) -> Union[ProbabilityMeasure, Tuple[ProbabilityMeasure, ProbabilityMeasure]]:
    """Deterministic random measure(s) for the given seed.

    ``SparseK`` and ``DenseDirichlet`` return one measure; ``DiracPair``
    returns a pair supported on distinct cells.
    """
    rng = np.random.default_rng(seed)
    n = domain.n
    if isinstance(kind, SparseK):
        if kind.k < 1:
            raise ValueError("k must be >= 1")
        if kind.k > domain.size:
            raise ValueError(f"k={kind.k} exceeds cell count {domain.size}")
        cells = rng.choice(domain.size, size=kind.k, replace=False)
        points = [(int(c) // n, int(c) % n) for c in cells]
        return uniform_on_set(domain, points)
    if isinstance(kind, DenseDirichlet):
        raw = rng.dirichlet(np.ones(domain.size))
        raw = np.clip(raw, 1e-300, None)
        raw = raw / np.cumsum(raw)[-1]
        # absorb the remaining rounding residue into the largest entry
        raw[int(np.argmax(raw))] -= np.cumsum(raw)[-1] - 1.0
        return ProbabilityMeasure(SignedMeasure(domain, raw.reshape(n, n)))
    if isinstance(kind, DiracPair):
        if domain.size < 2:
            raise ValueError("DiracPair needs at least two cells")
        cells = rng.choice(domain.size, size=2, replace=False)
        p = (int(cells[0]) // n, int(cells[0]) % n)
        q = (int(cells[1]) // n, int(cells[1]) % n)
        return dirac(domain, p), dirac(domain, q)
    raise ValueError(f"unknown measure kind: {kind!r}")


# ---------------------------------------------------------------------------
# Text formats.  Shared header "n <n> <grid|torus>"; sparse bodies list one
# "<a> <b> <mass>" atom per line, dense bodies give n rows of n decimals.
# ---------------------------------------------------------------------------

def _format_header(domain: DomainSpec) -> str:
    return f"n {domain.n} {domain.topology.value}"


def write_sparse(mu: SignedMeasure) -> str:
    lines = [_format_header(mu.domain)]
    for a, b in np.argwhere(mu.mass != 0.0):
        lines.append(f"{a} {b} {float(mu.mass[a, b])!r}")
    return "\n".join(lines) + "\n"


def write_dense(mu: SignedMeasure) -> str:
    lines = [_format_header(mu.domain)]
    for row in mu.mass:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_measure(text: str) -> SignedMeasure:
    """Parse either text format; dense is assumed when the body is n rows of
    n values, sparse otherwise."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty measure file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "n":
        raise ValueError(f"bad header: {lines[0]!r}")
    domain = DomainSpec(int(header[1]), _coerce_topology(header[2]))
    body = lines[1:]
    n = domain.n
    tokens = [ln.split() for ln in body]
    dense = len(body) == n and all(len(t) == n for t in tokens)
    table = np.zeros((n, n))
    if dense:
        for a, row in enumerate(tokens):
            table[a] = [float(x) for x in row]
    else:
        for ln, t in zip(body, tokens):
            if len(t) != 3:
                raise ValueError(f"bad atom line: {ln!r}")
            a, b, m = int(t[0]), int(t[1]), float(t[2])
            if not domain.contains((a, b)):
                raise ValueError(f"atom {(a, b)} outside domain")
            table[a, b] += m
    return SignedMeasure(domain, table)


def read_measure(path) -> SignedMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_measure(fh.read())


def write_measure(mu: SignedMeasure, path, dense: bool = False) -> None:
    text = write_dense(mu) if dense else write_sparse(mu)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
