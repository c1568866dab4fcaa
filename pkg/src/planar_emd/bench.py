"""Distortion, calibration, scaling and nearest-neighbor experiments.

Every run is a pure function of its configuration: per-item RNG streams are
derived from (seed, stream tag, item index), so reports are byte-for-byte
reproducible no matter how the work is scheduled.  The ``wall_ms`` report
field is pinned to 0.0 in report objects for the same reason; live timing
belongs to the caller (the CLI prints it to stderr).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence, Tuple

import numpy as np

from .embedding import embed, embedded_distance, grid_to_torus
from .measures import (
    DenseDirichlet,
    DiracPair,
    DomainSpec,
    MeasureKind,
    ProbabilityMeasure,
    SparseK,
    Topology,
    difference,
    random_measure,
)
from .transport import GroundMetric, emd_norm

# ratio guard: pairs with tau at or below this are excluded from statistics
TAU_FLOOR = 1e-12
# relative slack before a held-out pair counts as violating the calibrated
# lower inequality tau <= kappa * embdist
LOWER_SLACK = 0.01
# sample count used for the calibration pass inside a distortion run
CALIBRATION_SAMPLES = 64
# stream tags for derived RNG streams
_TAG_PAIRS = 0
_TAG_DATASET = 1
_TAG_QUERIES = 2
_TAG_CALIBRATION = 3

DEFAULT_MIX: Tuple[Tuple[MeasureKind, float], ...] = (
    (DiracPair(), 0.4),
    (SparseK(8), 0.4),
    (DenseDirichlet(), 0.2),
)

VARIANTS = ("ab", "s")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    pair_count: int
    seed: int
    mix: Tuple[Tuple[MeasureKind, float], ...] = DEFAULT_MIX
    topology: Topology = Topology.TORUS
    variant: str = "ab"

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.pair_count < 1:
            raise ConfigError("pair_count must be >= 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}")
        weights = [w for _, w in self.mix]
        if not weights or any(w < 0 for w in weights):
            raise ConfigError("mix weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ConfigError("mix weights must sum to 1")

    @property
    def domain(self) -> DomainSpec:
        return DomainSpec(self.n, self.topology)


@dataclass(frozen=True)
class DistortionReport:
    n: int
    variant: str
    pairs: int
    seed: int
    kappa: float
    max_expansion: float
    max_contraction: float
    distortion: float
    wall_ms: float = 0.0
    pairs_used: int = 0
    lower_violations: int = 0


@dataclass(frozen=True)
class NNReport:
    n: int
    variant: str
    dataset_size: int
    query_count: int
    seed: int
    recall_at_1: float
    mean_rank_of_true_nn: float
    degenerate: bool


def _pick_kind(mix, rng) -> MeasureKind:
    r = rng.random()
    acc = 0.0
    for kind, w in mix:
        acc += w
        if r < acc:
            return kind
    return mix[-1][0]


def _draw_measure(domain, kind, rng) -> ProbabilityMeasure:
    sub = int(rng.integers(0, 2**63 - 1))
    out = random_measure(sub, domain, kind)
    if isinstance(kind, DiracPair):
        return out[0]
    return out


def _draw_pair(domain, mix, seed, tag, index):
    rng = np.random.default_rng([seed, tag, index])
    kind = _pick_kind(mix, rng)
    if isinstance(kind, DiracPair):
        sub = int(rng.integers(0, 2**63 - 1))
        return random_measure(sub, domain, kind)
    return (
        _draw_measure(domain, kind, rng),
        _draw_measure(domain, kind, rng),
    )


def _pair_distances(mu, nu, metric, variant):
    """(transport distance, embedded L1 distance) for one measure pair."""
    tau = emd_norm(difference(mu, nu), metric)
    if metric.domain.topology is Topology.GRID:
        mu, nu = grid_to_torus(mu), grid_to_torus(nu)
    d = embedded_distance(embed(mu, variant), embed(nu, variant))
    return tau, d


def calibrate(
    n: int,
    seed: int,
    samples: int,
    variant: str = "ab",
    topology: Topology = Topology.TORUS,
    mix=DEFAULT_MIX,
) -> float:
    """Scale constant kappa = max over sampled pairs of tau / embdist.

    With this kappa, tau <= kappa * embdist holds on the calibration sample
    by construction; it stands in for the unspecified absolute scale of the
    embedding.
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    domain = DomainSpec(n, topology)
    metric = GroundMetric(domain)
    kappa = 0.0
    used = 0
    for idx in range(samples):
        mu, nu = _draw_pair(domain, mix, seed, _TAG_CALIBRATION, idx)
        tau, d = _pair_distances(mu, nu, metric, variant)
        if tau <= TAU_FLOOR or d <= 0.0:
            continue
        used += 1
        kappa = max(kappa, tau / d)
    if used == 0:
        raise ConfigError("degenerate calibration sample: no usable pairs")
    return kappa


def run_distortion_experiment(cfg: ExperimentConfig) -> DistortionReport:
    """Sample measure pairs, compare exact transport distance with the
    embedded L1 distance, and report the empirical distortion."""
    metric = GroundMetric(cfg.domain)
    kappa = calibrate(
        cfg.n, cfg.seed, CALIBRATION_SAMPLES, cfg.variant, cfg.topology, cfg.mix
    )
    max_expansion = 0.0
    max_contraction = 0.0
    used = 0
    violations = 0
    for idx in range(cfg.pair_count):
        mu, nu = _draw_pair(cfg.domain, cfg.mix, cfg.seed, _TAG_PAIRS, idx)
        tau, d = _pair_distances(mu, nu, metric, cfg.variant)
        if tau <= TAU_FLOOR or d <= 0.0:
            continue
        used += 1
        max_expansion = max(max_expansion, d / tau)
        max_contraction = max(max_contraction, tau / d)
        if tau > kappa * d * (1.0 + LOWER_SLACK):
            violations += 1
    distortion = max_expansion * max_contraction
    return DistortionReport(
        n=cfg.n,
        variant=cfg.variant,
        pairs=cfg.pair_count,
        seed=cfg.seed,
        kappa=kappa,
        max_expansion=max_expansion,
        max_contraction=max_contraction,
        distortion=distortion,
        pairs_used=used,
        lower_violations=violations,
    )


def run_scaling_sweep(ns: Sequence[int], **cfg_kwargs) -> list:
    """One distortion report per side length, same seed policy throughout."""
    reports = []
    for n in ns:
        cfg = ExperimentConfig(n=int(n), **cfg_kwargs)
        reports.append(run_distortion_experiment(cfg))
    return reports


def run_nn_experiment(
    cfg: ExperimentConfig, dataset_size: int, query_count: int
) -> NNReport:
    """Exhaustive nearest-neighbor comparison: exact transport distance
    against the embedded L1 proxy.

    Ties in either ordering go to the lowest dataset index; recall is the
    fraction of queries whose winners agree.  A dataset whose true nearest
    neighbor is tied (e.g. identical copies) is flagged degenerate.
    """
    if dataset_size < 2:
        raise ConfigError("dataset_size must be >= 2")
    if query_count < 1:
        raise ConfigError("query_count must be >= 1")
    metric = GroundMetric(cfg.domain)

    def draw(tag, idx):
        rng = np.random.default_rng([cfg.seed, tag, idx])
        return _draw_measure(cfg.domain, _pick_kind(cfg.mix, rng), rng)

    dataset = [draw(_TAG_DATASET, i) for i in range(dataset_size)]
    queries = [draw(_TAG_QUERIES, i) for i in range(query_count)]

    def to_vec(m):
        if cfg.topology is Topology.GRID:
            m = grid_to_torus(m)
        return embed(m, cfg.variant)

    dataset_vecs = [to_vec(m) for m in dataset]
    query_vecs = [to_vec(m) for m in queries]

    hits = 0
    rank_sum = 0.0
    degenerate = False
    for qi, q in enumerate(queries):
        taus = np.array(
            [emd_norm(difference(q, m), metric) for m in dataset]
        )
        dists = np.array(
            [embedded_distance(query_vecs[qi], v) for v in dataset_vecs]
        )
        true_nn = int(np.argmin(taus))          # argmin takes the lowest index
        embed_nn = int(np.argmin(dists))
        if np.count_nonzero(taus == taus[true_nn]) > 1:
            degenerate = True
        if true_nn == embed_nn:
            hits += 1
        better = np.count_nonzero(
            (dists < dists[true_nn])
            | ((dists == dists[true_nn]) & (np.arange(dataset_size) < true_nn))
        )
        rank_sum += 1.0 + better
    return NNReport(
        n=cfg.n,
        variant=cfg.variant,
        dataset_size=dataset_size,
        query_count=query_count,
        seed=cfg.seed,
        recall_at_1=hits / query_count,
        mean_rank_of_true_nn=rank_sum / query_count,
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# Serialization (stable across reruns: repr floats, fixed column order)
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = (
    "n", "variant", "pairs", "seed", "kappa",
    "max_expansion", "max_contraction", "distortion", "wall_ms",
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_json(report) -> str:
    return json.dumps(asdict(report), sort_keys=True, indent=2) + "\n"


def sweep_to_csv(reports: Sequence[DistortionReport]) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in reports:
        row = asdict(r)
        lines.append(",".join(_fmt(row[c]) for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"
