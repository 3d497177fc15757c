"""Four-phase decoding of noisy XOR answers.

Phase 1 reads each label off its degree-1 initialization query.  Phase 2
sharpens the estimate by majority vote: a degree-d query relays to each of
its labels the answer times the current estimate of the other d-1 labels.
Phase 3 scores workers by replaying queries against the current estimate and
counting disagreements per (worker, degree), truncated into [lambda, 0.5].
Phase 4 repeats the vote with each message weighted by the log odds of its
estimated error rate, which is the likelihood-optimal weighting.

Two schedules are supported.  The partitioned schedule reserves disjoint
query blocks A1..A4, one per phase, and runs each phase once.  The iterative
schedule reuses the whole non-initialization pool: Phase 2 runs for
``phase2_iters`` rounds, then Phases 3 and 4 alternate for
``phase34_iters`` rounds, each round re-scoring workers against the latest
estimate and re-voting.  All tie coins are drawn from the run's generator in
ascending label order, so results are reproducible from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import querygen
from .model import (
    LAMBDA_DEFAULT,
    AnswerSet,
    ConfigError,
    LabelVector,
    Phase,
    Query,
    ReliabilityMatrix,
    TripartiteGraph,
    pool_edges,
    xor_products,
)

__all__ = [
    "PARTITIONED",
    "ITERATIVE",
    "InferenceConfig",
    "InferenceResult",
    "phase1",
    "phase2_message",
    "phase2",
    "phase3",
    "phase4",
    "run",
]

PARTITIONED = "partitioned"
ITERATIVE = "iterative"


@dataclass(frozen=True)
class InferenceConfig:
    """Schedule and knobs for one decoding run."""

    mode: str = ITERATIVE
    phase2_iters: int = 10
    phase34_iters: int = 10
    lam: float = LAMBDA_DEFAULT
    phase3_ref: str = "latest"

    def validate(self) -> None:
        if self.mode not in (PARTITIONED, ITERATIVE):
            raise ConfigError(f"mode must be '{PARTITIONED}' or '{ITERATIVE}'")
        if self.phase2_iters < 0 or self.phase34_iters < 0:
            raise ConfigError("iteration counts must be non-negative")
        if not 0.0 < self.lam < 0.5:
            raise ConfigError("lambda must lie in (0, 0.5)")
        if self.phase3_ref not in ("latest", "weak"):
            raise ConfigError("phase3_ref must be 'latest' or 'weak'")

    @classmethod
    def from_dict(cls, data: dict) -> "InferenceConfig":
        try:
            cfg = cls(
                mode=str(data.get("mode", ITERATIVE)).lower(),
                phase2_iters=int(data.get("phase2_iters", 10)),
                phase34_iters=int(data.get("phase34_iters", 10)),
                lam=float(data.get("lambda", data.get("lam", LAMBDA_DEFAULT))),
                phase3_ref=str(data.get("phase3_ref", "latest")).lower(),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad inference config: {exc}") from exc
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class InferenceResult:
    """Estimates after each recovery stage; ``final`` aliases ``x4``."""

    x1: LabelVector
    x2: LabelVector
    x4: LabelVector
    eps_hat: ReliabilityMatrix
    tie_breaks: int = 0

    @property
    def final(self) -> LabelVector:
        return self.x4


def _resolve_pool(graph: TripartiteGraph, phase: Phase, pool) -> np.ndarray:
    if pool is not None:
        return np.asarray(pool, dtype=np.int64)
    if graph.is_partitioned:
        return graph.phase_ids(phase)
    raise ValueError(
        f"graph has no phase tags; pass pool= explicitly for {phase.name}"
    )


def _products(est_values: np.ndarray, edge_label, starts) -> np.ndarray:
    if starts.size == 0:
        return np.zeros(0, dtype=np.int8)
    neg = (est_values[edge_label] < 0).astype(np.int64)
    counts = np.add.reduceat(neg, starts)
    return (1 - 2 * (counts & 1)).astype(np.int8)


def _message_sums(
    y: AnswerSet,
    graph: TripartiteGraph,
    est_values: np.ndarray,
    pool: np.ndarray,
    edges,
    query_weights: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-label sum and count of messages from the pool's queries.

    The message from query j to its label i is y_j times the product of the
    estimates of the query's other labels, which equals y_j * prod(all) *
    est_i since estimates square to one.
    """
    edge_label, starts, counts_per_q = edges
    if pool.size == 0:
        return np.zeros(graph.m), np.zeros(graph.m, dtype=np.int64)
    prod_all = _products(est_values, edge_label, starts)
    per_query = (y.values[pool] * prod_all).astype(np.float64)
    if query_weights is not None:
        per_query *= query_weights
    per_edge = np.repeat(per_query, counts_per_q) * est_values[edge_label]
    sums = np.bincount(edge_label, weights=per_edge, minlength=graph.m)
    counts = np.bincount(edge_label, minlength=graph.m)
    return sums, counts


def _vote(
    sums: np.ndarray,
    counts: np.ndarray,
    prev_values: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Sign of each sum; zero-message labels keep ``prev``, ties flip coins."""
    out = prev_values.copy()
    decided = counts > 0
    out[decided & (sums > 0)] = 1
    out[decided & (sums < 0)] = -1
    ties = np.flatnonzero(decided & (sums == 0))
    if ties.size:
        out[ties] = rng.integers(0, 2, size=ties.size).astype(np.int8) * 2 - 1
    return out, int(ties.size)


def phase1(y: AnswerSet, graph: TripartiteGraph, pool=None) -> LabelVector:
    """Initial estimate: each label is its degree-1 query's answer."""
    mapping = graph.init_query_ids(pool)
    return LabelVector(y.values[mapping])


def phase2_message(y_j: int, query: Query, est: LabelVector, target: int) -> int:
    """Message a query sends to one of its labels under the estimate ``est``."""
    if target not in query.labels:
        raise ValueError(f"label {target} is not part of query {query.id}")
    prod = 1
    for i in query.labels:
        if i != target:
            prod *= est[i]
    return y_j * prod


def phase2(
    y: AnswerSet,
    graph: TripartiteGraph,
    prev: LabelVector,
    rng: np.random.Generator,
    pool=None,
) -> LabelVector:
    """Unweighted majority vote over the pool's messages."""
    pool = _resolve_pool(graph, Phase.A2, pool)
    edges = pool_edges(graph, pool)
    sums, counts = _message_sums(y, graph, prev.values, pool, edges)
    out, _ = _vote(sums, counts, prev.values, rng)
    return LabelVector(out)


def phase3(
    y: AnswerSet,
    graph: TripartiteGraph,
    ref: LabelVector,
    lam: float = LAMBDA_DEFAULT,
    pool=None,
) -> ReliabilityMatrix:
    """Estimate each (worker, degree) error rate against a reference estimate.

    The rate is the disagreement frequency between answers and the
    reference's XORs, truncated into [lambda, 0.5].  Pairs with no queries
    in the pool get the uninformative rate 0.5.
    """
    pool = _resolve_pool(graph, Phase.A3, pool)
    w, D = graph.w, graph.max_degree
    if pool.size == 0:
        return ReliabilityMatrix.estimated(np.full((w, D), 0.5), lam)
    prod = xor_products(ref.values, graph, pool)
    wrong = (y.values[pool] != prod).astype(np.float64)
    key = graph.workers[pool].astype(np.int64) * D + (graph.degrees[pool] - 1)
    num = np.bincount(key, weights=wrong, minlength=w * D)
    den = np.bincount(key, minlength=w * D)
    with np.errstate(invalid="ignore"):
        raw = np.clip(num / den, lam, 0.5)
    eps = np.where(den > 0, raw, 0.5).reshape(w, D)
    return ReliabilityMatrix.estimated(eps, lam)


def phase4(
    y: AnswerSet,
    graph: TripartiteGraph,
    prev: LabelVector,
    eps_hat: ReliabilityMatrix,
    rng: np.random.Generator,
    pool=None,
) -> LabelVector:
    """Log-odds weighted vote over the pool's messages."""
    pool = _resolve_pool(graph, Phase.A4, pool)
    edges = pool_edges(graph, pool)
    out, _ = _phase4_core(y, graph, prev.values, eps_hat, rng, pool, edges)
    return LabelVector(out)


def _phase4_core(y, graph, prev_values, eps_hat, rng, pool, edges):
    if pool.size == 0:
        return prev_values.copy(), 0
    if eps_hat.w < graph.w or eps_hat.D < int(graph.degrees[pool].max()):
        raise ValueError("estimated reliability table does not cover the pool")
    rates = eps_hat.eps[graph.workers[pool], graph.degrees[pool] - 1]
    if np.any(np.isnan(rates)) or np.any(rates < eps_hat.lam) or np.any(rates > 0.5):
        raise ValueError("estimated error rates must lie in [lambda, 0.5]")
    weights = np.log(1.0 - rates) - np.log(rates)
    sums, counts = _message_sums(y, graph, prev_values, pool, edges, weights)
    return _vote(sums, counts, prev_values, rng)


def run(
    y: AnswerSet,
    graph: TripartiteGraph,
    cfg: InferenceConfig | None = None,
    rng: np.random.Generator | int | None = None,
) -> InferenceResult:
    """Decode an answer set with the configured schedule.

    Parameters
    ----------
    y : AnswerSet
        One answer per query of ``graph``.
    graph : TripartiteGraph
        Must contain a degree-1 initialization block (the leading m queries,
        or the A1 tags on a partitioned graph).
    cfg : InferenceConfig, optional
        Defaults to the iterative schedule with 10 + 10 rounds.
    rng : numpy.random.Generator or int
        Source for tie coins; an int seeds a fresh generator.

    Returns
    -------
    InferenceResult
        Stage estimates, the last worker-rate table, and how many tie coins
        were drawn.
    """
    cfg = cfg or InferenceConfig()
    cfg.validate()
    if len(y) != graph.n:
        raise ValueError("answer count must match query count")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    ties = 0
    if cfg.mode == PARTITIONED:
        gp = graph if graph.is_partitioned else querygen.partition_phases(graph)
        x1 = phase1(y, gp)
        pool2 = gp.phase_ids(Phase.A2)
        edges2 = pool_edges(gp, pool2)
        sums, counts = _message_sums(y, gp, x1.values, pool2, edges2)
        x2_values, t = _vote(sums, counts, x1.values, rng)
        ties += t
        eps_hat = phase3(y, gp, LabelVector(x2_values), cfg.lam, pool=gp.phase_ids(Phase.A3))
        pool4 = gp.phase_ids(Phase.A4)
        x4_values, t = _phase4_core(
            y, gp, x2_values, eps_hat, rng, pool4, pool_edges(gp, pool4)
        )
        ties += t
        return InferenceResult(
            x1=x1,
            x2=LabelVector(x2_values),
            x4=LabelVector(x4_values),
            eps_hat=eps_hat,
            tie_breaks=ties,
        )

    # Iterative schedule: Phase 1 on the leading block, then every other
    # query participates in every round.
    x1 = phase1(y, graph, pool=np.arange(min(graph.m, graph.n)))
    pool = np.arange(graph.m, graph.n, dtype=np.int64)
    edges = pool_edges(graph, pool)

    est = x1.values
    for _ in range(cfg.phase2_iters):
        sums, counts = _message_sums(y, graph, est, pool, edges)
        est, t = _vote(sums, counts, est, rng)
        ties += t
    x2 = est

    eps_hat = None
    for _ in range(cfg.phase34_iters):
        ref = est if cfg.phase3_ref == "latest" else x2
        eps_hat = phase3(y, graph, LabelVector(ref), cfg.lam, pool=pool)
        est, t = _phase4_core(y, graph, est, eps_hat, rng, pool, edges)
        ties += t
    if eps_hat is None:
        eps_hat = ReliabilityMatrix.estimated(
            np.full((graph.w, graph.max_degree), 0.5), cfg.lam
        )
    return InferenceResult(
        x1=x1,
        x2=LabelVector(x2),
        x4=LabelVector(est),
        eps_hat=eps_hat,
        tie_breaks=ties,
    )
