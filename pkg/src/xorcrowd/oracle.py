"""Exhaustive maximum-likelihood reference decoder.

Scores every one of the 2^m label vectors by the log-likelihood of the
observed answers under known worker error rates and returns an argmax.  The
cost is exponential in m, so this is a ground-truth yardstick for small
instances (m <= 20), not a practical decoder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    AnswerSet,
    ConfigError,
    LabelVector,
    ReliabilityMatrix,
    TripartiteGraph,
    xor_products,
)

__all__ = ["M_MAX", "MlReport", "log_likelihood", "ml_decode"]

M_MAX = 20
_CHUNK = 1 << 13


@dataclass(frozen=True)
class MlReport:
    """Best vector, its log-likelihood, and how many vectors tied for best."""

    best: LabelVector
    log_likelihood: float
    tie_count: int


def _query_rates(graph: TripartiteGraph, reliability: ReliabilityMatrix) -> np.ndarray:
    if reliability.w < graph.w or reliability.D < graph.max_degree:
        raise ConfigError(
            f"reliability table {reliability.w}x{reliability.D} does not cover "
            f"w={graph.w}, max degree {graph.max_degree}"
        )
    rates = reliability.eps[graph.workers, graph.degrees - 1]
    if np.any(np.isnan(rates)):
        raise ConfigError("reliability table is missing a (worker, degree) entry")
    return rates


def log_likelihood(
    x: LabelVector,
    y: AnswerSet,
    graph: TripartiteGraph,
    reliability: ReliabilityMatrix,
) -> float:
    """Log-probability of the answers if ``x`` were the truth.

    Each matching answer contributes log(1 - eps) and each mismatch
    log(eps).  A mismatch at eps = 0 (or a match at eps = 1) yields -inf:
    the candidate is impossible.
    """
    if len(x) != graph.m or len(y) != graph.n:
        raise ValueError("x and y must match the graph dimensions")
    rates = _query_rates(graph, reliability)
    match = xor_products(x.values, graph) == y.values
    with np.errstate(divide="ignore"):
        terms = np.where(match, np.log(1.0 - rates), np.log(rates))
    return float(terms.sum())


def _candidate_signs(indices: np.ndarray, m: int) -> np.ndarray:
    """Sign matrix for candidate codes: bit b of the code sets label b to -1."""
    bits = (indices[:, None] >> np.arange(m)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def ml_decode(
    y: AnswerSet,
    graph: TripartiteGraph,
    reliability: ReliabilityMatrix,
    rng: np.random.Generator,
) -> MlReport:
    """Best label vector under the known error rates, ties drawn uniformly.

    Candidates are scored in chunks; co-maximal vectors (exact float
    equality) are collected and one is chosen with ``rng``.
    """
    m = graph.m
    if m > M_MAX:
        raise ConfigError(f"exhaustive decoding is limited to m <= {M_MAX}, got {m}")
    if len(y) != graph.n:
        raise ValueError("answer count must match query count")
    rates = _query_rates(graph, reliability)
    with np.errstate(divide="ignore"):
        log_match = np.log(1.0 - rates)
        log_miss = np.log(rates)

    edge_label = graph.label_flat
    starts = graph.label_offsets[:-1]
    y_row = y.values[None, :]

    best_ll = -np.inf
    best_codes: list[int] = []
    for lo in range(0, 1 << m, _CHUNK):
        codes = np.arange(lo, min(lo + _CHUNK, 1 << m))
        signs = _candidate_signs(codes, m)
        neg = (signs[:, edge_label] < 0).astype(np.int64)
        parity_counts = np.add.reduceat(neg, starts, axis=1)
        products = 1 - 2 * (parity_counts & 1)
        match = products == y_row
        lls = np.where(match, log_match[None, :], log_miss[None, :]).sum(axis=1)
        chunk_best = float(lls.max())
        if chunk_best > best_ll:
            best_ll = chunk_best
            best_codes = []
        if chunk_best == best_ll:
            best_codes.extend(int(c) for c in codes[lls == best_ll])
    pick = best_codes[int(rng.integers(0, len(best_codes)))]
    best = LabelVector(_candidate_signs(np.asarray([pick]), m)[0])
    return MlReport(best=best, log_likelihood=best_ll, tie_count=len(best_codes))
