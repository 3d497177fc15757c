"""Core types for XOR-query crowdsourcing instances.

A task has ``m`` binary labels in {+1, -1}.  Each query asks one worker for
the XOR (product) of a small set of labels, and the worker answers wrong with
a probability that depends on the worker and on the query degree.  This
module holds the shared vocabulary: label/answer vectors, the degree
distribution, queries and the tripartite label/query/worker graph, the
per-(worker, degree) reliability table, the two notational primitives
``sign_rand`` and ``trunc``, and readers/writers for the on-disk formats.

External formats use 1-based label, worker, and query indices; everything in
memory is 0-based.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "LAMBDA_DEFAULT",
    "ConfigError",
    "MissingInitializationError",
    "sign_rand",
    "sign_rand_vector",
    "trunc",
    "LabelVector",
    "AnswerSet",
    "DegreeDistribution",
    "Phase",
    "Query",
    "ReliabilityMatrix",
    "TripartiteGraph",
    "pool_edges",
    "xor_products",
    "write_query_file",
    "read_query_file",
    "write_labels",
    "read_labels",
    "write_reliability_csv",
    "read_reliability_csv",
]

# Default floor for worker error rates; estimates are clipped to [floor, 0.5].
LAMBDA_DEFAULT = 0.01


class ConfigError(ValueError):
    """A configuration or input file is structurally invalid."""


class MissingInitializationError(ValueError):
    """Some label has no degree-1 query in the initialization set."""


def sign_rand(x: float, rng: np.random.Generator) -> int:
    """Sign of ``x`` as +1/-1, with a fair coin from ``rng`` when ``x == 0``."""
    if not math.isfinite(x):
        raise ValueError(f"sign_rand requires a finite value, got {x!r}")
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 1 if rng.integers(0, 2) == 1 else -1


def sign_rand_vector(values: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Elementwise ``sign_rand`` over a 1-D array.

    Coins for zero entries are drawn in ascending index order so the result
    is a deterministic function of ``rng``'s state.  Returns the sign array
    (int8) and the number of coins drawn.
    """
    values = np.asarray(values)
    out = np.where(values > 0, 1, -1).astype(np.int8)
    zeros = np.flatnonzero(values == 0)
    if zeros.size:
        out[zeros] = rng.integers(0, 2, size=zeros.size).astype(np.int8) * 2 - 1
    return out, int(zeros.size)


def trunc(x: float, lo: float, hi: float) -> float:
    """Closest point to ``x`` inside the closed interval [lo, hi]."""
    if lo > hi:
        raise ValueError(f"empty interval: [{lo}, {hi}]")
    return min(max(x, lo), hi)


def _as_sign_array(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{what} must be a non-empty 1-D sequence")
    arr = arr.astype(np.int8)
    if not np.all(np.abs(arr) == 1):
        raise ValueError(f"{what} entries must all be +1 or -1")
    arr.setflags(write=False)
    return arr


class LabelVector:
    """Immutable vector of m ground-truth or estimated labels in {+1, -1}."""

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        self.values = _as_sign_array(values, "label vector")

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "LabelVector":
        """Uniform labels, one independent fair coin per entry."""
        if m < 1:
            raise ValueError("m must be positive")
        return cls(rng.integers(0, 2, size=m).astype(np.int8) * 2 - 1)

    def hamming_fraction(self, other: "LabelVector") -> float:
        if len(other) != len(self):
            raise ValueError("length mismatch")
        return float(np.count_nonzero(self.values != other.values)) / len(self)

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, i: int) -> int:
        return int(self.values[i])

    def __neg__(self) -> "LabelVector":
        return LabelVector(-self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelVector):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.all(self.values == other.values)
        )

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)

    def __repr__(self) -> str:
        return f"LabelVector(m={len(self)})"


class AnswerSet:
    """Immutable vector of n worker answers in {+1, -1}, indexed by query id."""

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        self.values = _as_sign_array(values, "answer set")

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, j: int) -> int:
        return int(self.values[j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnswerSet):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.all(self.values == other.values)
        )

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)

    def __repr__(self) -> str:
        return f"AnswerSet(n={len(self)})"


class DegreeDistribution:
    """Distribution over query degrees 1..D, stored as (p_1, ..., p_D)."""

    __slots__ = ("probs",)

    def __init__(self, probs) -> None:
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("degree distribution must be a non-empty 1-D sequence")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("degree probabilities must be finite and non-negative")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValueError(f"degree probabilities must sum to 1, got {arr.sum()!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.probs = arr

    @classmethod
    def point_mass(cls, d: int) -> "DegreeDistribution":
        if d < 1:
            raise ValueError("degree must be >= 1")
        probs = np.zeros(d)
        probs[d - 1] = 1.0
        return cls(probs)

    @classmethod
    def uniform_over(cls, degrees) -> "DegreeDistribution":
        """Uniform over a set of degrees, e.g. {3, 4, 5, 6}."""
        degrees = sorted(set(int(d) for d in degrees))
        if not degrees or degrees[0] < 1:
            raise ValueError("degrees must be a non-empty set of integers >= 1")
        probs = np.zeros(degrees[-1])
        probs[np.asarray(degrees) - 1] = 1.0 / len(degrees)
        return cls(probs)

    @property
    def D(self) -> int:
        return int(self.probs.size)

    @property
    def mean_degree(self) -> float:
        return float(np.arange(1, self.D + 1) @ self.probs)

    @property
    def has_odd_support(self) -> bool:
        # odd degrees sit at even 0-based positions
        return bool(np.any(self.probs[0::2] > 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return self.probs.shape == other.probs.shape and bool(
            np.all(self.probs == other.probs)
        )

    def __repr__(self) -> str:
        return f"DegreeDistribution({list(self.probs)!r})"


class Phase(enum.IntEnum):
    """Which inference pass a query is reserved for; 0 means no reservation."""

    UNPARTITIONED = 0
    A1 = 1
    A2 = 2
    A3 = 3
    A4 = 4


@dataclass(frozen=True, slots=True)
class Query:
    """One XOR query: the product of ``labels`` asked of ``worker``."""

    id: int
    degree: int
    labels: tuple[int, ...]
    worker: int
    phase: Phase = Phase.UNPARTITIONED

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("query degree must be >= 1")
        if len(self.labels) != self.degree or len(set(self.labels)) != self.degree:
            raise ValueError(
                f"query {self.id}: labels must be {self.degree} distinct indices"
            )


class ReliabilityMatrix:
    """Worker error rates indexed by (worker, degree), plus the floor lambda.

    ``eps[k, d-1]`` is the probability worker ``k`` answers a degree-``d``
    query incorrectly.  True rates live in [lambda, 0.5); estimates may touch
    0.5 exactly.  The ``unchecked`` constructor skips the range check so tests
    can build noiseless or adversarial tables.
    """

    __slots__ = ("eps", "lam")

    def __init__(self, eps, lam: float = LAMBDA_DEFAULT, check: str = "true") -> None:
        arr = np.asarray(eps, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("reliability table must be a non-empty 2-D array (w x D)")
        if not 0.0 < lam < 0.5:
            raise ValueError(f"lambda must lie in (0, 0.5), got {lam!r}")
        if check == "true":
            if not np.all(np.isfinite(arr)) or np.any(arr < lam) or np.any(arr >= 0.5):
                raise ValueError("true error rates must lie in [lambda, 0.5)")
        elif check == "estimate":
            if not np.all(np.isfinite(arr)) or np.any(arr < lam) or np.any(arr > 0.5):
                raise ValueError("estimated error rates must lie in [lambda, 0.5]")
        elif check == "off":
            with np.errstate(invalid="ignore"):
                bad = np.any((arr < 0) | (arr > 1))
            if bad:
                raise ValueError("error rates must lie in [0, 1]")
        else:
            raise ValueError(f"unknown check mode {check!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.eps = arr
        self.lam = float(lam)

    @classmethod
    def true_params(cls, eps, lam: float = LAMBDA_DEFAULT) -> "ReliabilityMatrix":
        return cls(eps, lam, check="true")

    @classmethod
    def estimated(cls, eps, lam: float = LAMBDA_DEFAULT) -> "ReliabilityMatrix":
        return cls(eps, lam, check="estimate")

    @classmethod
    def unchecked(cls, eps, lam: float = LAMBDA_DEFAULT) -> "ReliabilityMatrix":
        return cls(eps, lam, check="off")

    @property
    def w(self) -> int:
        return int(self.eps.shape[0])

    @property
    def D(self) -> int:
        return int(self.eps.shape[1])

    def value(self, worker: int, degree: int) -> float:
        """Error rate for a 0-based worker and 1-based degree."""
        return float(self.eps[worker, degree - 1])

    def log_odds(self) -> np.ndarray:
        """log((1 - eps) / eps) per entry; the natural message weight."""
        with np.errstate(divide="ignore"):
            return np.log(1.0 - self.eps) - np.log(self.eps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReliabilityMatrix):
            return NotImplemented
        return (
            self.lam == other.lam
            and self.eps.shape == other.eps.shape
            and bool(np.all((self.eps == other.eps) | (np.isnan(self.eps) & np.isnan(other.eps))))
        )

    def __repr__(self) -> str:
        return f"ReliabilityMatrix(w={self.w}, D={self.D}, lam={self.lam})"


class TripartiteGraph:
    """Immutable label/query/worker incidence structure.

    Alongside the ``queries`` tuple the constructor caches flat numpy views
    used by the vectorized passes:

    - ``degrees``, ``workers``, ``phase_codes``: one entry per query,
    - ``label_offsets``/``label_flat``: CSR rows of labels per query,
    - ``edge_query``: the query id owning each ``label_flat`` entry.

    Query ids must equal positions (0..n-1); files store them 1-based.
    """

    __slots__ = (
        "m",
        "w",
        "queries",
        "degrees",
        "workers",
        "phase_codes",
        "label_offsets",
        "label_flat",
        "edge_query",
        "_label_adj",
        "_worker_adj",
    )

    def __init__(self, m: int, w: int, queries) -> None:
        if m < 1 or w < 1:
            raise ValueError("m and w must be positive")
        queries = tuple(queries)
        n = len(queries)
        if n == 0:
            raise ValueError("a graph needs at least one query")
        self.m = int(m)
        self.w = int(w)
        self.queries = queries

        degrees = np.empty(n, dtype=np.int32)
        workers = np.empty(n, dtype=np.int32)
        phases = np.empty(n, dtype=np.int8)
        for pos, q in enumerate(queries):
            if q.id != pos:
                raise ValueError(f"query ids must be consecutive from 0, got {q.id} at {pos}")
            if not 0 <= q.worker < w:
                raise ValueError(f"query {pos}: worker {q.worker} outside [0, {w})")
            if min(q.labels) < 0 or max(q.labels) >= m:
                raise ValueError(f"query {pos}: label outside [0, {m})")
            degrees[pos] = q.degree
            workers[pos] = q.worker
            phases[pos] = int(q.phase)
        for arr in (degrees, workers, phases):
            arr.setflags(write=False)
        self.degrees = degrees
        self.workers = workers
        self.phase_codes = phases

        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=offsets[1:])
        flat = np.empty(int(offsets[-1]), dtype=np.int32)
        for pos, q in enumerate(queries):
            flat[offsets[pos] : offsets[pos + 1]] = q.labels
        edge_query = np.repeat(np.arange(n, dtype=np.int32), degrees)
        for arr in (offsets, flat, edge_query):
            arr.setflags(write=False)
        self.label_offsets = offsets
        self.label_flat = flat
        self.edge_query = edge_query
        self._label_adj = None
        self._worker_adj = None

    @property
    def n(self) -> int:
        return len(self.queries)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def is_partitioned(self) -> bool:
        return bool(np.all(self.phase_codes != Phase.UNPARTITIONED))

    def phase_ids(self, phase: Phase) -> np.ndarray:
        """Query ids tagged with ``phase``, ascending."""
        return np.flatnonzero(self.phase_codes == int(phase))

    def label_adjacency(self) -> list[np.ndarray]:
        """For each label, the ascending array of query ids touching it."""
        if self._label_adj is None:
            order = np.argsort(self.label_flat, kind="stable")
            counts = np.bincount(self.label_flat, minlength=self.m)
            bounds = np.zeros(self.m + 1, dtype=np.int64)
            np.cumsum(counts, out=bounds[1:])
            by_label = self.edge_query[order]
            self._label_adj = [
                by_label[bounds[i] : bounds[i + 1]] for i in range(self.m)
            ]
        return self._label_adj

    def worker_adjacency(self) -> dict[tuple[int, int], np.ndarray]:
        """Map (worker, degree) -> ascending query ids; absent pairs omitted."""
        if self._worker_adj is None:
            adj: dict[tuple[int, int], list[int]] = {}
            for j in range(self.n):
                adj.setdefault((int(self.workers[j]), int(self.degrees[j])), []).append(j)
            self._worker_adj = {
                key: np.asarray(ids, dtype=np.int64) for key, ids in adj.items()
            }
        return self._worker_adj

    def with_phases(self, codes) -> "TripartiteGraph":
        """Copy of the graph with phase tags replaced."""
        codes = np.asarray(codes, dtype=np.int64)
        if codes.shape != (self.n,):
            raise ValueError("need one phase code per query")
        queries = tuple(
            replace(q, phase=Phase(int(c))) for q, c in zip(self.queries, codes)
        )
        return TripartiteGraph(self.m, self.w, queries)

    def init_query_ids(self, pool: np.ndarray | None = None) -> np.ndarray:
        """Map each label to its degree-1 initialization query.

        ``pool`` defaults to the A1 set on a partitioned graph and to the
        leading block of m queries otherwise.  When a label is covered more
        than once the earliest query wins; an uncovered label raises
        ``MissingInitializationError``.
        """
        if pool is None:
            if self.is_partitioned:
                pool = self.phase_ids(Phase.A1)
            else:
                pool = np.arange(min(self.m, self.n))
        pool = np.asarray(pool)
        d1 = pool[self.degrees[pool] == 1]
        mapping = np.full(self.m, -1, dtype=np.int64)
        if d1.size:
            labs = self.label_flat[self.label_offsets[d1]]
            mapping[labs[::-1]] = d1[::-1]
        missing = np.flatnonzero(mapping < 0)
        if missing.size:
            raise MissingInitializationError(
                f"{missing.size} labels lack a degree-1 initialization query "
                f"(first missing: {int(missing[0])})"
            )
        return mapping

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripartiteGraph):
            return NotImplemented
        return self.m == other.m and self.w == other.w and self.queries == other.queries


def pool_edges(
    graph: TripartiteGraph, pool: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR view of the label incidences of a query subset.

    Returns ``(edge_label, starts, counts)``: the concatenated labels of the
    pool's queries in pool order, the pool-local start offset of each query's
    slice, and each query's degree.
    """
    pool = np.asarray(pool, dtype=np.int64)
    counts = graph.degrees[pool].astype(np.int64)
    starts = np.zeros(pool.size, dtype=np.int64)
    if pool.size:
        np.cumsum(counts[:-1], out=starts[1:])
    total = int(counts.sum())
    offsets = np.repeat(starts, counts)
    idx = np.repeat(graph.label_offsets[pool], counts) + (np.arange(total) - offsets)
    return graph.label_flat[idx], starts, counts


def xor_products(values, graph: TripartiteGraph, pool: np.ndarray | None = None) -> np.ndarray:
    """Product of +-1 ``values`` over each query's label set.

    ``pool`` restricts (and orders) the queries; ``None`` means all of them.
    Products are computed from the parity of negative entries, so the result
    is exact int8 arithmetic.
    """
    values = np.asarray(values)
    if pool is None:
        edge_label = graph.label_flat
        starts = graph.label_offsets[:-1]
    else:
        pool = np.asarray(pool, dtype=np.int64)
        if pool.size == 0:
            return np.zeros(0, dtype=np.int8)
        edge_label, starts, _ = pool_edges(graph, pool)
    neg = (values[edge_label] < 0).astype(np.int64)
    counts = np.add.reduceat(neg, starts)
    return (1 - 2 * (counts & 1)).astype(np.int8)


# ---------------------------------------------------------------------------
# On-disk formats.  Query records are whitespace-separated:
#     query_id degree label[,label...] worker [answer]
# with 1-based ids and answer in {+1, -1}; '#' lines are comments.  Writers
# emit a '# m=<m> n=<n> w=<w>' comment so readers can recover the counts.
# ---------------------------------------------------------------------------


def _open_for(dest, mode: str):
    if hasattr(dest, "write") or hasattr(dest, "read"):
        return dest, False
    return open(os.fspath(dest), mode, encoding="utf-8"), True


def write_query_file(dest, graph: TripartiteGraph, answers: AnswerSet | None = None) -> None:
    """Write queries (and answers, when given) in the line format above."""
    if answers is not None and len(answers) != graph.n:
        raise ValueError("answer count must match query count")
    fh, owned = _open_for(dest, "w")
    try:
        fh.write(f"# m={graph.m} n={graph.n} w={graph.w}\n")
        for q in graph.queries:
            labels = ",".join(str(i + 1) for i in q.labels)
            line = f"{q.id + 1} {q.degree} {labels} {q.worker + 1}"
            if answers is not None:
                line += f" {answers[q.id]:+d}"
            fh.write(line + "\n")
    finally:
        if owned:
            fh.close()


def read_query_file(
    src, m: int | None = None, w: int | None = None
) -> tuple[TripartiteGraph, AnswerSet | None]:
    """Parse a query or query/answer file.

    ``m``/``w`` override the header comment; with neither, counts fall back
    to the largest label/worker index seen.  Answers must be present on all
    records or on none.
    """
    fh, owned = _open_for(src, "r")
    try:
        meta: dict[str, int] = {}
        records: list[tuple[int, int, tuple[int, ...], int, int | None]] = []
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    key, sep, val = part.partition("=")
                    if sep and key in ("m", "n", "w") and val.isdigit():
                        meta[key] = int(val)
                continue
            fields = line.split()
            if len(fields) not in (4, 5):
                raise ConfigError(f"line {lineno}: expected 4 or 5 fields, got {len(fields)}")
            try:
                qid = int(fields[0]) - 1
                degree = int(fields[1])
                labels = tuple(int(s) - 1 for s in fields[2].split(","))
                worker = int(fields[3]) - 1
                answer = None
                if len(fields) == 5:
                    answer = int(fields[4])
                    if answer not in (1, -1):
                        raise ValueError
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: malformed record {line!r}") from exc
            if qid < 0 or worker < 0 or min(labels) < 0:
                raise ConfigError(f"line {lineno}: indices must be >= 1")
            records.append((qid, degree, labels, worker, answer))
    finally:
        if owned:
            fh.close()

    if not records:
        raise ConfigError("no query records found")
    with_answers = sum(1 for r in records if r[4] is not None)
    if with_answers not in (0, len(records)):
        raise ConfigError("answers must be present on all records or on none")

    records.sort(key=lambda r: r[0])
    ids = [r[0] for r in records]
    if ids != list(range(len(records))):
        raise ConfigError("query ids must be exactly 1..n with no gaps or repeats")
    if m is None:
        m = meta.get("m", max(max(r[2]) for r in records) + 1)
    if w is None:
        w = meta.get("w", max(r[3] for r in records) + 1)

    queries = [
        Query(id=qid, degree=degree, labels=labels, worker=worker)
        for qid, degree, labels, worker, _ in records
    ]
    graph = TripartiteGraph(m, w, queries)
    answers = None
    if with_answers:
        answers = AnswerSet(np.asarray([r[4] for r in records], dtype=np.int8))
    return graph, answers


def write_labels(dest, labels: LabelVector) -> None:
    """One signed label per line: '+1' or '-1'."""
    fh, owned = _open_for(dest, "w")
    try:
        for v in labels.values:
            fh.write(f"{int(v):+d}\n")
    finally:
        if owned:
            fh.close()


def read_labels(src) -> LabelVector:
    fh, owned = _open_for(src, "r")
    try:
        values = []
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                v = int(line)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: not a signed label: {line!r}") from exc
            if v not in (1, -1):
                raise ConfigError(f"line {lineno}: labels must be +1 or -1")
            values.append(v)
    finally:
        if owned:
            fh.close()
    if not values:
        raise ConfigError("no labels found")
    return LabelVector(np.asarray(values, dtype=np.int8))


def write_reliability_csv(dest, matrix: ReliabilityMatrix) -> None:
    """CSV rows 'worker,degree,eps_hat' with 1-based worker ids."""
    fh, owned = _open_for(dest, "w")
    try:
        fh.write("worker,degree,eps_hat\n")
        for k in range(matrix.w):
            for d in range(1, matrix.D + 1):
                fh.write(f"{k + 1},{d},{matrix.value(k, d)!r}\n")
    finally:
        if owned:
            fh.close()


def read_reliability_csv(
    src, lam: float = LAMBDA_DEFAULT, w: int | None = None, D: int | None = None
) -> ReliabilityMatrix:
    """Parse a 'worker,degree,eps_hat' CSV into an unchecked matrix.

    Pairs absent from the file are NaN; consumers that need a pair will
    reject NaN at use time.  Ranges are only sanity-checked to [0, 1].
    """
    fh, owned = _open_for(src, "r")
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < {"worker", "degree"}:
            raise ConfigError("reliability CSV needs a worker,degree,eps_hat header")
        eps_field = "eps_hat" if "eps_hat" in reader.fieldnames else "eps"
        if eps_field not in reader.fieldnames:
            raise ConfigError("reliability CSV needs an eps_hat column")
        entries: dict[tuple[int, int], float] = {}
        for row in reader:
            try:
                k = int(row["worker"]) - 1
                d = int(row["degree"])
                eps = float(row[eps_field])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"malformed reliability row: {row!r}") from exc
            if k < 0 or d < 1:
                raise ConfigError("worker and degree indices must be >= 1")
            entries[(k, d)] = eps
    finally:
        if owned:
            fh.close()
    if not entries:
        raise ConfigError("no reliability rows found")
    w = w if w is not None else max(k for k, _ in entries) + 1
    D = D if D is not None else max(d for _, d in entries)
    eps = np.full((w, D), np.nan)
    for (k, d), value in entries.items():
        if k >= w or d > D:
            raise ConfigError(f"reliability row ({k + 1},{d}) outside table {w}x{D}")
        eps[k, d - 1] = value
    return ReliabilityMatrix.unchecked(eps, lam)
