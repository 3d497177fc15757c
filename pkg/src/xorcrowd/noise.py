"""Worker answer synthesis.

A worker's answer to a query is the true XOR of its labels, flipped with the
worker's error rate for that degree.  Error rates come from one of three
noise models: an explicit (worker x degree) table, a degree-independent rate
per worker, or the d-coin-flip model where a degree-d answer is wrong
whenever an odd number of d independent per-label coins (each with the
worker's base rate) land on heads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    LAMBDA_DEFAULT,
    AnswerSet,
    ConfigError,
    LabelVector,
    Query,
    ReliabilityMatrix,
    TripartiteGraph,
    xor_products,
)

__all__ = [
    "EXPLICIT",
    "DEGREE_INDEPENDENT",
    "D_COIN_FLIP",
    "NoiseSpec",
    "true_xor",
    "coin_flip_epsilon",
    "build_reliability",
    "answer_queries",
]

EXPLICIT = "explicit"
DEGREE_INDEPENDENT = "degree_independent"
D_COIN_FLIP = "d_coin_flip"

_KINDS = (EXPLICIT, DEGREE_INDEPENDENT, D_COIN_FLIP)


@dataclass(frozen=True)
class NoiseSpec:
    """How worker error rates are parameterized.

    ``eps_k`` holds one base rate per worker for the degree-independent and
    d-coin-flip kinds; ``eps_kd`` holds the full (w x D) table for the
    explicit kind.  ``D`` optionally pins the maximum degree the spec is
    meant to cover.  ``checked=False`` skips the [lambda, 0.5) range check
    when the table is built, for noiseless or adversarial test setups.
    """

    kind: str
    eps_k: tuple[float, ...] | None = None
    eps_kd: tuple[tuple[float, ...], ...] | None = None
    D: int | None = None
    checked: bool = True

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r}")
        if self.kind == EXPLICIT:
            if self.eps_kd is None:
                raise ConfigError("explicit noise needs eps_kd")
        elif self.eps_k is None:
            raise ConfigError(f"{self.kind} noise needs eps_k")

    @classmethod
    def unchecked(cls, kind: str, **kwargs) -> "NoiseSpec":
        return cls(kind=kind, checked=False, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseSpec":
        try:
            kind = str(data["kind"]).lower()
            eps_k = data.get("eps_k")
            eps_kd = data.get("eps_kd")
            return cls(
                kind=kind,
                eps_k=tuple(float(e) for e in eps_k) if eps_k is not None else None,
                eps_kd=tuple(tuple(float(e) for e in row) for row in eps_kd)
                if eps_kd is not None
                else None,
                D=int(data["D"]) if data.get("D") is not None else None,
                checked=bool(data.get("checked", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad noise spec: {exc}") from exc


def true_xor(x: LabelVector, query: Query) -> int:
    """Noise-free answer to one query: the product of its labels."""
    out = 1
    for i in query.labels:
        out *= x[i]
    return out


def coin_flip_epsilon(eps: float, d: int) -> float:
    """Effective error rate of a degree-d answer under per-label coin flips.

    Each of the d labels is misread independently with probability ``eps``
    and the XOR is wrong exactly when an odd number are misread, which
    telescopes to (1 - (1 - 2 eps)^d) / 2.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"base rate must lie in [0, 1], got {eps!r}")
    return (1.0 - (1.0 - 2.0 * eps) ** d) / 2.0


def build_reliability(
    spec: NoiseSpec, w: int, D: int, lam: float = LAMBDA_DEFAULT
) -> ReliabilityMatrix:
    """Expand a noise spec into the full (w x D) error-rate table."""
    if w < 1 or D < 1:
        raise ConfigError("w and D must be positive")
    if spec.D is not None and spec.D < D:
        raise ConfigError(f"noise spec covers degrees up to {spec.D}, need {D}")
    if spec.kind == EXPLICIT:
        eps = np.asarray(spec.eps_kd, dtype=np.float64)
        if eps.ndim != 2 or eps.shape[0] != w or eps.shape[1] < D:
            raise ConfigError(
                f"explicit table must be w x D >= {w} x {D}, got {eps.shape}"
            )
        eps = eps[:, :D]
    else:
        base = np.asarray(spec.eps_k, dtype=np.float64)
        if base.ndim != 1 or base.size != w:
            raise ConfigError(f"eps_k must have one rate per worker ({w})")
        if spec.kind == DEGREE_INDEPENDENT:
            eps = np.repeat(base[:, None], D, axis=1)
        else:
            ds = np.arange(1, D + 1)
            eps = (1.0 - (1.0 - 2.0 * base[:, None]) ** ds[None, :]) / 2.0
    if spec.checked:
        try:
            return ReliabilityMatrix.true_params(eps, lam)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return ReliabilityMatrix.unchecked(eps, lam)


def answer_queries(
    x: LabelVector,
    graph: TripartiteGraph,
    reliability: ReliabilityMatrix,
    rng: np.random.Generator,
) -> AnswerSet:
    """Sample one answer per query: the true XOR, flipped at the worker rate.

    Flip coins are drawn as a single batch in query-id order, so the answer
    set is a pure function of the rng state.
    """
    if len(x) != graph.m:
        raise ValueError("label vector length must equal graph.m")
    if reliability.w < graph.w or reliability.D < graph.max_degree:
        raise ConfigError(
            f"reliability table {reliability.w}x{reliability.D} does not cover "
            f"w={graph.w}, max degree {graph.max_degree}"
        )
    rates = reliability.eps[graph.workers, graph.degrees - 1]
    if np.any(np.isnan(rates)):
        raise ConfigError("reliability table is missing a (worker, degree) entry")
    truth = xor_products(x.values, graph)
    flips = rng.random(graph.n) < rates
    return AnswerSet(np.where(flips, -truth, truth).astype(np.int8))
