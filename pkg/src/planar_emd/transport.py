"""Exact transportation cost (earthmover / Wasserstein-1) on grids and tori.

The primal solver runs a transportation network simplex on the complete
bipartite graph between the supports of the positive and negative parts;
optima are certified against the solver's dual potentials via weak duality.
A separate LP builds Kantorovich dual certificates: 1-Lipschitz potentials
whose integral against the measure meets the primal cost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment, linprog

from . import _mincostflow
from .measures import (
    MASS_ZERO_REPAIR,
    DomainSpec,
    Point,
    ProbabilityMeasure,
    SignedMeasure,
    Topology,
)

# relative supply/demand imbalance we are willing to repair by rescaling
BALANCE_REL_TOL = 1e-6
# per-cell tolerance on transport plan marginals
MARGINAL_TOL = 1e-9
# side-length guard for the dense dual LP
DUAL_MAX_SIDE = 32
# brute-force matching guard (k! blowup)
BRUTE_FORCE_MAX = 9


class SolverError(RuntimeError):
    """An optimizer failed or returned an uncertifiable answer."""


@dataclass(frozen=True)
class GroundMetric:
    """Ground distance between cells.

    Grid: planar Euclidean distance.  Torus: geodesic Euclidean distance,
    i.e. the shorter arc is taken independently per coordinate before the
    l2 combination.
    """

    domain: DomainSpec

    def distance(self, p: Point, q: Point) -> float:
        self._check_point(p)
        self._check_point(q)
        da = abs(int(p[0]) - int(q[0]))
        db = abs(int(p[1]) - int(q[1]))
        if self.domain.topology is Topology.TORUS:
            n = self.domain.n
            da = min(da, n - da)
            db = min(db, n - db)
        return float(np.hypot(da, db))

    def pairwise(self, pts_a: np.ndarray, pts_b: np.ndarray) -> np.ndarray:
        """Distance matrix between two (k, 2) integer point arrays."""
        pa = np.asarray(pts_a, dtype=np.int64).reshape(-1, 2)
        pb = np.asarray(pts_b, dtype=np.int64).reshape(-1, 2)
        diff = np.abs(pa[:, None, :] - pb[None, :, :]).astype(np.float64)
        if self.domain.topology is Topology.TORUS:
            diff = np.minimum(diff, self.domain.n - diff)
        return np.sqrt(diff[:, :, 0] ** 2 + diff[:, :, 1] ** 2)

    def _check_point(self, p: Point) -> None:
        if not self.domain.contains(p):
            raise ValueError(f"point {p} outside {self.domain.n}x{self.domain.n} domain")


def ground_distance(metric: GroundMetric, p: Point, q: Point) -> float:
    return metric.distance(p, q)


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling: (source cell, target cell, mass) triples and its cost."""

    entries: Tuple[Tuple[Point, Point, float], ...]
    cost: float


@dataclass(frozen=True)
class PlanCheck:
    feasible: bool
    max_marginal_violation: float
    cost_recomputed: float


@dataclass(frozen=True)
class DualPotential:
    """Candidate Kantorovich potential; pinned to 0 at the base cell (0, 0)."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        table = np.array(self.values, dtype=np.float64, copy=True)
        if table.shape != (self.domain.n, self.domain.n):
            raise ValueError("potential table shape mismatch")
        if abs(table[0, 0]) > 1e-12:
            raise ValueError("potential must vanish at the base cell (0, 0)")
        table.setflags(write=False)
        object.__setattr__(self, "values", table)


# ---------------------------------------------------------------------------
# Primal solver
# ---------------------------------------------------------------------------

def _solve_on_supports(
    pts_a: np.ndarray, wa: np.ndarray, pts_b: np.ndarray, wb: np.ndarray,
    metric: GroundMetric,
) -> Tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Exact transport between weighted point sets.

    Returns (cost, rows, cols, flows) where flows[k] moves from
    pts_a[rows[k]] to pts_b[cols[k]].  Inputs must be balanced to float
    precision; the caller is responsible for symmetrization.
    """
    if len(wa) == 0 or len(wb) == 0:
        return 0.0, np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    C = metric.pairwise(pts_a, pts_b)
    sa = float(wa.sum())
    stop = 1e-12 * max(1.0, sa)
    s, t = len(wa), len(wb)
    max_pivots = 64 * (s + t) * max(4, int(np.log2(s + t + 2)) + 1) + 4096
    rows, cols, flows, pi, status = _mincostflow.solve_dense(
        C, wa, wb, stop, int(max_pivots)
    )
    if status != 0:
        raise SolverError(f"min-cost flow failed with status {status}")
    cost = float(flows @ C[rows, cols]) if len(flows) else 0.0

    # Certify with the solver's potentials: u_i + v_j <= C_ij up to rounding
    # drift, and the certified duality gap must be negligible.
    u = pi[:s]
    v = -pi[s: s + t]
    viol = float(max(0.0, (u[:, None] + v[None, :] - C).max()))
    dual = float(wa @ u + wb @ v) - viol * sa
    gap = cost - dual
    if gap > 1e-7 * (1.0 + abs(cost)):
        raise SolverError(f"uncertified optimum: duality gap {gap}")

    return cost, rows, cols, flows


def _balanced_parts(
    sigma: SignedMeasure,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Jordan parts of a mass-zero measure, symmetrized to exact balance."""
    total = sigma.total_mass()
    if abs(total) > MASS_ZERO_REPAIR:
        raise ValueError(f"total mass {total} too far from 0")
    mass = sigma.mass
    if total != 0.0:
        mass = mass - total / sigma.domain.size
    pts_a = np.argwhere(mass > 0.0).astype(np.int64)
    wa = mass[mass > 0.0].astype(np.float64)
    pts_b = np.argwhere(mass < 0.0).astype(np.int64)
    wb = (-mass[mass < 0.0]).astype(np.float64)
    sa, sb = float(wa.sum()), float(wb.sum())
    if max(sa, sb) <= 1e-15:
        return (np.empty((0, 2), np.int64), np.empty(0),
                np.empty((0, 2), np.int64), np.empty(0))
    if abs(sa - sb) > BALANCE_REL_TOL * max(sa, sb):
        raise ValueError(f"unbalanced parts: {sa} vs {sb}")
    wb = wb * (sa / sb)
    wb[int(np.argmax(wb))] += sa - float(wb.sum())
    return pts_a, wa, pts_b, wb


def emd(
    mu: ProbabilityMeasure, nu: ProbabilityMeasure, metric: GroundMetric
) -> Tuple[float, TransportPlan]:
    """Optimal transport cost between two probability measures and a plan.

    The flow problem is solved on the supports of (mu - nu)+ and (mu - nu)-;
    the common mass min(mu, nu) rides along on the diagonal at zero cost, so
    the returned plan is a genuine coupling of mu and nu.
    """
    if mu.domain != nu.domain:
        raise ValueError(f"domain mismatch: {mu.domain} vs {nu.domain}")
    if metric.domain != mu.domain:
        raise ValueError("metric domain does not match the measures")
    diff = SignedMeasure(mu.domain, mu.mass - nu.mass)
    pts_a, wa, pts_b, wb = _balanced_parts(diff)
    cost, rows, cols, flows = _solve_on_supports(pts_a, wa, pts_b, wb, metric)

    entries: List[Tuple[Point, Point, float]] = []
    common = np.minimum(mu.mass, nu.mass)
    for a, b in np.argwhere(common > 0.0):
        p = (int(a), int(b))
        entries.append((p, p, float(common[a, b])))
    for r, c, f in zip(rows, cols, flows):
        entries.append(
            ((int(pts_a[r, 0]), int(pts_a[r, 1])),
             (int(pts_b[c, 0]), int(pts_b[c, 1])),
             float(f))
        )
    entries.sort(key=lambda e: (e[0], e[1]))
    return cost, TransportPlan(tuple(entries), cost)


def emd_norm(sigma: SignedMeasure, metric: GroundMetric) -> float:
    """Transport norm of a mass-zero measure: tau(sigma+, sigma-)."""
    if metric.domain != sigma.domain:
        raise ValueError("metric domain does not match the measure")
    pts_a, wa, pts_b, wb = _balanced_parts(sigma)
    cost, _, _, _ = _solve_on_supports(pts_a, wa, pts_b, wb, metric)
    return cost


def verify_plan(
    plan: TransportPlan,
    mu_plus: SignedMeasure,
    mu_minus: SignedMeasure,
    metric: GroundMetric,
) -> PlanCheck:
    """Recompute marginals and cost of a plan independently of the solver."""
    n = mu_plus.domain.n
    row = np.zeros((n, n))
    col = np.zeros((n, n))
    cost = 0.0
    feasible = True
    for p, q, m in plan.entries:
        if m < 0.0:
            feasible = False
        row[p[0], p[1]] += m
        col[q[0], q[1]] += m
        cost += m * metric.distance(p, q)
    violation = max(
        float(np.abs(row - mu_plus.mass).max()),
        float(np.abs(col - mu_minus.mass).max()),
    )
    feasible = feasible and violation <= MARGINAL_TOL
    return PlanCheck(feasible, violation, cost)


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------

def _as_points(pts: Sequence[Point]) -> np.ndarray:
    arr = np.asarray([[int(p[0]), int(p[1])] for p in pts], dtype=np.int64)
    return arr.reshape(-1, 2)


def min_weight_matching(
    A: Sequence[Point], B: Sequence[Point], metric: GroundMetric
) -> Tuple[float, np.ndarray]:
    """Minimum total-cost bijection between equal-size point lists.

    Returns (cost, assignment) with A[i] matched to B[assignment[i]].  The
    cost is the plain sum of distances; dividing by k gives the transport
    distance between the corresponding uniform measures.
    """
    if len(A) != len(B) or len(A) == 0:
        raise ValueError("point lists must be nonempty and of equal size")
    pa, pb = _as_points(A), _as_points(B)
    for p in A:
        metric._check_point(p)
    for q in B:
        metric._check_point(q)
    C = metric.pairwise(pa, pb)
    rows, cols = linear_sum_assignment(C)
    cost = float(C[rows, cols].sum())
    return cost, cols.astype(np.int64)


def brute_force_matching(
    A: Sequence[Point], B: Sequence[Point], metric: GroundMetric
) -> float:
    """Exact minimum over all k! bijections; independent matching oracle."""
    if len(A) != len(B) or len(A) == 0:
        raise ValueError("point lists must be nonempty and of equal size")
    if len(A) > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force capped at k <= {BRUTE_FORCE_MAX}")
    C = metric.pairwise(_as_points(A), _as_points(B))
    k = len(A)
    best = np.inf
    for perm in itertools.permutations(range(k)):
        total = 0.0
        for i in range(k):
            total += C[i, perm[i]]
            if total >= best:
                break
        if total < best:
            best = total
    return float(best)


# ---------------------------------------------------------------------------
# Kantorovich dual certificates
# ---------------------------------------------------------------------------

def _neighbor_pairs(domain: DomainSpec) -> List[Tuple[int, int]]:
    """Flat-index pairs of horizontally/vertically adjacent cells."""
    n = domain.n
    pairs = []
    wrap = domain.topology is Topology.TORUS and n > 1
    for a in range(n):
        for b in range(n):
            i = a * n + b
            if a + 1 < n:
                pairs.append((i, (a + 1) * n + b))
            elif wrap:
                pairs.append((i, b))
            if b + 1 < n:
                pairs.append((i, a * n + b + 1))
            elif wrap:
                pairs.append((i, a * n))
    return pairs


def dual_potential(
    sigma: SignedMeasure, metric: GroundMetric
) -> Tuple[float, DualPotential]:
    """LP-optimal 1-Lipschitz potential certifying the transport norm.

    Variables are potential values on every cell; the Lipschitz feasibility
    set consists of all 4-neighbor edges plus every support-to-support pair.
    The support pairs alone pin the optimum to tau(sigma+, sigma-); the
    neighbor edges keep the witness well behaved away from the supports.
    """
    if metric.domain != sigma.domain:
        raise ValueError("metric domain does not match the measure")
    n = sigma.domain.n
    if n > DUAL_MAX_SIDE:
        raise ValueError(f"dual LP guarded to n <= {DUAL_MAX_SIDE}, got {n}")
    total = sigma.total_mass()
    if abs(total) > MASS_ZERO_REPAIR:
        raise ValueError(f"total mass {total} too far from 0")
    mass = sigma.mass
    if total != 0.0:
        mass = mass - total / sigma.domain.size

    pts_pos = np.argwhere(mass > 0.0)
    pts_neg = np.argwhere(mass < 0.0)
    if len(pts_pos) == 0 and len(pts_neg) == 0:
        return 0.0, DualPotential(sigma.domain, np.zeros((n, n)))

    pairs: List[Tuple[int, int]] = list(_neighbor_pairs(sigma.domain))
    bounds_d: List[float] = [1.0] * len(pairs)
    pos_flat = pts_pos[:, 0] * n + pts_pos[:, 1]
    neg_flat = pts_neg[:, 0] * n + pts_neg[:, 1]
    D = metric.pairwise(pts_pos, pts_neg)
    for ii, i in enumerate(pos_flat):
        for jj, j in enumerate(neg_flat):
            pairs.append((int(i), int(j)))
            bounds_d.append(float(D[ii, jj]))

    m = len(pairs)
    rows = np.repeat(np.arange(2 * m), 2)
    cols = np.empty(4 * m, dtype=np.int64)
    vals = np.empty(4 * m)
    for k, (i, j) in enumerate(pairs):
        # f_i - f_j <= d  and  f_j - f_i <= d
        cols[4 * k: 4 * k + 4] = (i, j, i, j)
        vals[4 * k: 4 * k + 4] = (1.0, -1.0, -1.0, 1.0)
    A_ub = sp.csr_matrix((vals, (rows, cols)), shape=(2 * m, n * n))
    b_ub = np.repeat(np.asarray(bounds_d), 2)

    c = -mass.ravel()
    bounds = [(None, None)] * (n * n)
    bounds[0] = (0.0, 0.0)  # base cell pinned
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"dual LP failed: {res.message}")
    f = res.x.reshape(n, n)
    f = f - f[0, 0]  # remove solver-level epsilon at the pinned cell

    slack = A_ub @ f.ravel() - b_ub
    if float(slack.max(initial=-np.inf)) > 1e-9:
        raise SolverError("dual witness violates a Lipschitz constraint")
    value = float(np.cumsum((f * mass).ravel(order="C"))[-1])
    return value, DualPotential(sigma.domain, f)
