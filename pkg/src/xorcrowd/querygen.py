"""Random query design.

Builds the tripartite graph: every query picks a degree from the degree
distribution, a uniform set of that many distinct labels, and a uniform
worker.  When ``degree1_init`` is set the first m queries are instead the
fixed initialization block, one degree-1 query per label in label order,
optionally restricted to a worker pool.  All draws come from one seeded
generator, so a seed pins the graph byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ConfigError,
    DegreeDistribution,
    Phase,
    Query,
    TripartiteGraph,
)

__all__ = [
    "QueryGenConfig",
    "sample_degree",
    "generate_queries",
    "phase_partition_sizes",
    "partition_phases",
]


@dataclass(frozen=True)
class QueryGenConfig:
    """Design parameters for one random query graph.

    ``degree1_worker_pool`` holds 0-based worker ids eligible for the
    initialization block; ``None`` means all workers.  ``seed`` may be left
    ``None`` only when the caller passes an explicit generator.
    """

    m: int
    n: int
    w: int
    phi: DegreeDistribution
    degree1_init: bool = True
    degree1_worker_pool: tuple[int, ...] | None = None
    seed: int | None = None

    def validate(self) -> None:
        if self.m < 1 or self.n < 1 or self.w < 1:
            raise ConfigError("m, n, and w must be positive")
        if self.m < self.phi.D:
            raise ConfigError(
                f"m={self.m} is smaller than the maximum degree D={self.phi.D}"
            )
        if self.degree1_init and self.n < self.m:
            raise ConfigError("degree1_init needs n >= m")
        if self.degree1_worker_pool is not None:
            pool = self.degree1_worker_pool
            if len(pool) == 0:
                raise ConfigError("degree1_worker_pool must not be empty")
            if len(set(pool)) != len(pool):
                raise ConfigError("degree1_worker_pool has repeated workers")
            if min(pool) < 0 or max(pool) >= self.w:
                raise ConfigError("degree1_worker_pool outside [0, w)")

    @classmethod
    def from_dict(cls, data: dict) -> "QueryGenConfig":
        """Build from a JSON-style dict; worker ids in the pool are 1-based."""
        try:
            phi = DegreeDistribution(data["phi"])
            pool = data.get("degree1_worker_pool")
            if pool is not None:
                pool = tuple(int(k) - 1 for k in pool)
            cfg = cls(
                m=int(data["m"]),
                n=int(data["n"]),
                w=int(data["w"]),
                phi=phi,
                degree1_init=bool(data.get("degree1_init", True)),
                degree1_worker_pool=pool,
                seed=int(data["seed"]) if data.get("seed") is not None else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad query generation config: {exc}") from exc
        cfg.validate()
        return cfg


def sample_degree(phi: DegreeDistribution, rng: np.random.Generator) -> int:
    """One draw from the degree distribution."""
    return int(rng.choice(np.arange(1, phi.D + 1), p=phi.probs))


def _sample_degrees(phi: DegreeDistribution, count: int, rng: np.random.Generator) -> np.ndarray:
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    return rng.choice(np.arange(1, phi.D + 1), size=count, p=phi.probs)


def _sample_label_sets(
    m: int, degrees: np.ndarray, rng: np.random.Generator
) -> list[tuple[int, ...]]:
    """Uniform distinct label sets, one per requested degree.

    Partial Fisher-Yates against a shared index array, undone after each
    query, so the cost is O(sum of degrees) with a single batched draw of
    uniforms.  floor(u * span) maps each uniform onto the remaining range.
    """
    total = int(degrees.sum())
    uniforms = rng.random(total)
    arr = np.arange(m, dtype=np.int64)
    out: list[tuple[int, ...]] = []
    pos = 0
    for d in degrees:
        d = int(d)
        swaps = []
        for t in range(d):
            r = t + int(uniforms[pos] * (m - t))
            pos += 1
            arr[t], arr[r] = arr[r], arr[t]
            swaps.append(r)
        out.append(tuple(sorted(int(v) for v in arr[:d])))
        for t in range(d - 1, -1, -1):
            r = swaps[t]
            arr[t], arr[r] = arr[r], arr[t]
    return out


def generate_queries(
    cfg: QueryGenConfig, rng: np.random.Generator | None = None
) -> TripartiteGraph:
    """Draw a full query graph from the design in ``cfg``.

    Parameters
    ----------
    cfg : QueryGenConfig
        Validated design; ``cfg.seed`` feeds a fresh generator unless an
        explicit ``rng`` is supplied.
    rng : numpy.random.Generator, optional
        Overrides the config seed (used by the experiment harness to derive
        per-trial streams).

    Returns
    -------
    TripartiteGraph
        Untagged graph whose first m queries are the initialization block
        when ``cfg.degree1_init`` is set.
    """
    cfg.validate()
    if rng is None:
        if cfg.seed is None:
            raise ConfigError("generate_queries needs cfg.seed or an explicit rng")
        rng = np.random.default_rng(cfg.seed)

    queries: list[Query] = []
    if cfg.degree1_init:
        if cfg.degree1_worker_pool is not None:
            pool = np.asarray(cfg.degree1_worker_pool, dtype=np.int64)
            init_workers = pool[rng.integers(0, pool.size, size=cfg.m)]
        else:
            init_workers = rng.integers(0, cfg.w, size=cfg.m)
        for i in range(cfg.m):
            queries.append(
                Query(id=i, degree=1, labels=(i,), worker=int(init_workers[i]))
            )

    rest = cfg.n - len(queries)
    degrees = _sample_degrees(cfg.phi, rest, rng)
    label_sets = _sample_label_sets(cfg.m, degrees, rng)
    workers = rng.integers(0, cfg.w, size=rest)
    base = len(queries)
    for i in range(rest):
        queries.append(
            Query(
                id=base + i,
                degree=int(degrees[i]),
                labels=label_sets[i],
                worker=int(workers[i]),
            )
        )
    return TripartiteGraph(cfg.m, cfg.w, queries)


def phase_partition_sizes(m: int, w: int, n: int) -> tuple[int, int, int, int]:
    """Sizes of the four reserved query blocks for an n-query budget.

    The first block holds the m degree-1 queries, the second
    ceil(m log m / log log m), the third ceil(w log m loglog m), and the
    remainder goes to the final weighted vote.  Natural logarithms; m must
    be at least 3 so log log m is positive.
    """
    if m < 3:
        raise ConfigError("phase partitioning needs m >= 3")
    loglog = math.log(math.log(m))
    n1 = m
    n2 = math.ceil(m * math.log(m) / loglog)
    n3 = math.ceil(w * math.log(m) * loglog)
    n4 = n - n1 - n2 - n3
    if n4 <= 0:
        raise ConfigError(
            f"n={n} is too small to partition: need more than {n1 + n2 + n3} queries"
        )
    return n1, n2, n3, n4


def partition_phases(graph: TripartiteGraph) -> TripartiteGraph:
    """Tag queries with their reserved block, in positional order.

    Requires the leading block of m queries to be a valid degree-1
    initialization (one query per label).
    """
    n1, n2, n3, n4 = phase_partition_sizes(graph.m, graph.w, graph.n)
    graph.init_query_ids(pool=np.arange(n1))
    codes = np.empty(graph.n, dtype=np.int8)
    codes[:n1] = int(Phase.A1)
    codes[n1 : n1 + n2] = int(Phase.A2)
    codes[n1 + n2 : n1 + n2 + n3] = int(Phase.A3)
    codes[n1 + n2 + n3 :] = int(Phase.A4)
    return graph.with_phases(codes)
