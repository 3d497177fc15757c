"""Repetition-query baselines: plain majority vote and one-coin EM.

Both expect a graph of degree-1 queries only (each query asks one label
directly).  Majority vote sums the answers per label.  The EM baseline
models every worker with a single symmetric error rate: starting from the
majority-vote labels it alternates estimating each worker's rate as the
posterior-weighted disagreement (clamped into [lambda, 1 - lambda]) with a
posterior update from the workers' log odds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    LAMBDA_DEFAULT,
    AnswerSet,
    LabelVector,
    TripartiteGraph,
    sign_rand_vector,
)

__all__ = ["EmState", "majority_vote", "em_one_coin", "one_coin_log_likelihood"]

_POSTERIOR_TOL = 1e-8


@dataclass(frozen=True)
class EmState:
    """Fitted quantities of an EM run.

    ``posterior[i]`` is P(label i = +1), ``eps_hat[k]`` the worker rate, and
    ``log_likelihoods`` the observed-data log-likelihood recorded after each
    rate update (non-decreasing).
    """

    posterior: np.ndarray
    eps_hat: np.ndarray
    iterations: int
    log_likelihoods: tuple[float, ...] = ()


def _degree1_labels(graph: TripartiteGraph) -> np.ndarray:
    if graph.max_degree != 1:
        raise ValueError("repetition baselines need a degree-1-only graph")
    return graph.label_flat.astype(np.int64)


def majority_vote(
    y: AnswerSet, graph: TripartiteGraph, rng: np.random.Generator
) -> LabelVector:
    """Per-label sign of the summed answers; zero sums flip a fair coin."""
    labels = _degree1_labels(graph)
    sums = np.bincount(labels, weights=y.values, minlength=graph.m)
    signs, _ = sign_rand_vector(sums, rng)
    return LabelVector(signs)


def one_coin_log_likelihood(
    y: AnswerSet, graph: TripartiteGraph, eps_k: np.ndarray
) -> float:
    """Observed-data log-likelihood of the answers under per-worker rates.

    Labels are +1/-1 with prior 1/2, answers independent given the label.
    """
    labels = _degree1_labels(graph)
    eps_k = np.asarray(eps_k, dtype=np.float64)
    log_right = np.log1p(-eps_k)[graph.workers]
    log_wrong = np.log(eps_k)[graph.workers]
    plus = np.where(y.values == 1, log_right, log_wrong)
    minus = np.where(y.values == 1, log_wrong, log_right)
    sum_plus = np.bincount(labels, weights=plus, minlength=graph.m)
    sum_minus = np.bincount(labels, weights=minus, minlength=graph.m)
    return float(np.sum(np.logaddexp(sum_plus, sum_minus) + np.log(0.5)))


def em_one_coin(
    y: AnswerSet,
    graph: TripartiteGraph,
    iters: int = 50,
    lam: float = LAMBDA_DEFAULT,
    rng: np.random.Generator | None = None,
) -> tuple[LabelVector, EmState]:
    """One-coin EM labels; posteriors at exactly 1/2 are coin-flipped.

    Each iteration first re-fits the worker rates from the current
    posteriors, then refreshes the posteriors; it stops early once the
    largest posterior change drops below 1e-8.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if not 0.0 < lam < 0.5:
        raise ValueError("lambda must lie in (0, 0.5)")
    if rng is None:
        rng = np.random.default_rng()
    labels = _degree1_labels(graph)
    workers = graph.workers.astype(np.int64)

    mv = majority_vote(y, graph, rng)
    posterior = (mv.values.astype(np.float64) + 1.0) / 2.0

    eps_hat = np.full(graph.w, 0.5)
    lls: list[float] = []
    done = 0
    for _ in range(iters):
        # rate update: expected disagreement per worker
        p_wrong = np.where(y.values == 1, 1.0 - posterior[labels], posterior[labels])
        num = np.bincount(workers, weights=p_wrong, minlength=graph.w)
        den = np.bincount(workers, minlength=graph.w)
        with np.errstate(invalid="ignore"):
            raw = np.clip(num / den, lam, 1.0 - lam)
        eps_hat = np.where(den > 0, raw, 0.5)
        lls.append(one_coin_log_likelihood(y, graph, eps_hat))

        # posterior update from worker log odds
        log_odds = np.log1p(-eps_hat) - np.log(eps_hat)
        evidence = np.bincount(
            labels, weights=y.values * log_odds[workers], minlength=graph.m
        )
        updated = 1.0 / (1.0 + np.exp(-evidence))
        delta = float(np.max(np.abs(updated - posterior)))
        posterior = updated
        done += 1
        if delta < _POSTERIOR_TOL:
            break

    signs, _ = sign_rand_vector(posterior - 0.5, rng)
    state = EmState(
        posterior=posterior,
        eps_hat=eps_hat,
        iterations=done,
        log_likelihoods=tuple(lls),
    )
    return LabelVector(signs), state
