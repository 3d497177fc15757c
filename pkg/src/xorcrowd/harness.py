"""Error-rate sweeps over query budgets.

For each budget the harness runs independent trials of the full pipeline
(draw truth, draw a query graph, draw noisy answers, decode) and aggregates
the frame error rate (fraction of trials with any wrong label) and bit error
rate (mean fraction of wrong labels).  Budgets count the queries beyond the
m-query initialization block, either as absolute counts or as multiples of
the recovery threshold n*; the reported ``budget_n`` is the total query
count including the block.

Every trial derives its generator from (master seed, budget index, trial
index), so results are independent of execution order and thread count, and
a fixed seed reproduces the table byte for byte.  Wall times are measured
per row and are the one column outside the determinism guarantee.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import em_one_coin, majority_vote
from .infer import InferenceConfig
from .infer import run as infer_run
from .limits import xor_limit
from .model import (
    LAMBDA_DEFAULT,
    ConfigError,
    DegreeDistribution,
    LabelVector,
    ReliabilityMatrix,
)
from .noise import NoiseSpec, answer_queries, build_reliability
from .oracle import M_MAX, ml_decode
from .querygen import QueryGenConfig, generate_queries

__all__ = [
    "DECODERS",
    "ExperimentConfig",
    "ResultRow",
    "threshold_for",
    "run_experiment",
    "write_csv",
    "read_csv",
]

DECODERS = ("xor4phase", "ml", "majority", "em")

CSV_HEADER = "budget_n,normalized_budget,fer,ber,trials,wall_time_s"


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a query design, a noise model, a decoder, and budgets."""

    m: int
    w: int
    phi: DegreeDistribution
    noise: NoiseSpec
    decoder: str
    budgets: tuple[float, ...]
    trials: int
    seed: int | None = None
    budget_mode: str = "normalized"
    inference: InferenceConfig = field(default_factory=InferenceConfig)
    degree1_worker_pool: tuple[int, ...] | None = None
    em_iters: int = 50
    lam: float = LAMBDA_DEFAULT

    def validate(self) -> None:
        if self.m < 1 or self.w < 1:
            raise ConfigError("m and w must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.decoder not in DECODERS:
            raise ConfigError(f"decoder must be one of {DECODERS}")
        if self.budget_mode not in ("normalized", "absolute"):
            raise ConfigError("budget_mode must be 'normalized' or 'absolute'")
        if not self.budgets:
            raise ConfigError("budgets must be non-empty")
        if any(not math.isfinite(b) or b < 0 for b in self.budgets):
            raise ConfigError("budgets must be finite and non-negative")
        if self.budget_mode == "absolute" and any(
            b != int(b) for b in self.budgets
        ):
            raise ConfigError("absolute budgets must be whole query counts")
        if self.decoder in ("majority", "em") and (
            self.phi.D != 1 or self.phi.probs[0] != 1.0
        ):
            raise ConfigError(
                f"decoder {self.decoder!r} needs a degree-1-only design (phi = [1.0])"
            )
        if self.decoder == "ml" and self.m > M_MAX:
            raise ConfigError(f"ml decoder is exhaustive and needs m <= {M_MAX}")
        self.inference.validate()

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Build from a JSON-style dict; pool worker ids are 1-based."""
        try:
            pool = data.get("degree1_worker_pool")
            if pool is not None:
                pool = tuple(int(k) - 1 for k in pool)
            cfg = cls(
                m=int(data["m"]),
                w=int(data["w"]),
                phi=DegreeDistribution(data["phi"]),
                noise=NoiseSpec.from_dict(data["noise"]),
                decoder=str(data["decoder"]).lower(),
                budgets=tuple(float(b) for b in data["budgets"]),
                trials=int(data["trials"]),
                seed=int(data["seed"]) if data.get("seed") is not None else None,
                budget_mode=str(data.get("budget_mode", "normalized")).lower(),
                inference=InferenceConfig.from_dict(data.get("inference", {})),
                degree1_worker_pool=pool,
                em_iters=int(data.get("em_iters", 50)),
                lam=float(data.get("lambda", data.get("lam", LAMBDA_DEFAULT))),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class ResultRow:
    """Aggregates for one budget."""

    budget_n: int
    normalized_budget: float
    fer: float
    ber: float
    trials: int
    wall_time_s: float


def _decode(cfg: ExperimentConfig, reliability: ReliabilityMatrix):
    if cfg.decoder == "xor4phase":
        return lambda y, g, rng: infer_run(y, g, cfg.inference, rng).final
    if cfg.decoder == "ml":
        return lambda y, g, rng: ml_decode(y, g, reliability, rng).best
    if cfg.decoder == "majority":
        return lambda y, g, rng: majority_vote(y, g, rng)
    return lambda y, g, rng: em_one_coin(y, g, cfg.em_iters, cfg.lam, rng)[0]


def threshold_for(cfg: ExperimentConfig) -> float:
    """Recovery threshold n* for the sweep's design and noise."""
    reliability = build_reliability(cfg.noise, cfg.w, cfg.phi.D, cfg.lam)
    return xor_limit(cfg.m, cfg.phi, reliability).n_star


def run_experiment(cfg: ExperimentConfig, threads: int | None = 1) -> list[ResultRow]:
    """Run the sweep and return one row per budget.

    Parameters
    ----------
    cfg : ExperimentConfig
        Validated sweep description; ``cfg.seed`` must be set.
    threads : int, optional
        Worker threads for the trial loop.  ``None`` uses the machine's
        core count.  The output is identical for every thread count.
    """
    cfg.validate()
    if cfg.seed is None:
        raise ConfigError("run_experiment needs cfg.seed")
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigError("threads must be >= 1")

    reliability = build_reliability(cfg.noise, cfg.w, cfg.phi.D, cfg.lam)
    n_star: float | None = None
    limit_error: ConfigError | None = None
    try:
        n_star = xor_limit(cfg.m, cfg.phi, reliability).n_star
    except ConfigError as exc:
        limit_error = exc
    if cfg.budget_mode == "normalized" and n_star is None:
        raise limit_error

    decode = _decode(cfg, reliability)

    rows: list[ResultRow] = []
    for b_idx, budget in enumerate(cfg.budgets):
        if cfg.budget_mode == "normalized":
            n_extra = math.ceil(budget * n_star)
        else:
            n_extra = int(budget)
        n_total = cfg.m + n_extra
        gen_cfg = QueryGenConfig(
            m=cfg.m,
            n=n_total,
            w=cfg.w,
            phi=cfg.phi,
            degree1_init=True,
            degree1_worker_pool=cfg.degree1_worker_pool,
        )
        gen_cfg.validate()

        def trial(t: int, b_idx: int = b_idx) -> int:
            seq = np.random.SeedSequence(cfg.seed, spawn_key=(b_idx, t))
            r_truth, r_graph, r_answer, r_decode = (
                np.random.default_rng(s) for s in seq.spawn(4)
            )
            x = LabelVector.random(cfg.m, r_truth)
            g = generate_queries(gen_cfg, rng=r_graph)
            y = answer_queries(x, g, reliability, r_answer)
            x_hat = decode(y, g, r_decode)
            return int(np.count_nonzero(x_hat.values != x.values))

        start = time.perf_counter()
        if threads == 1:
            errors = [trial(t) for t in range(cfg.trials)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                errors = list(pool.map(trial, range(cfg.trials)))
        wall = time.perf_counter() - start

        errors_arr = np.asarray(errors)
        rows.append(
            ResultRow(
                budget_n=n_total,
                normalized_budget=(n_extra / n_star) if n_star else float("nan"),
                fer=float(np.mean(errors_arr > 0)),
                ber=float(np.mean(errors_arr) / cfg.m),
                trials=cfg.trials,
                wall_time_s=wall,
            )
        )
    return rows


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(rows, dest) -> None:
    """Write rows under the fixed header, reals at six significant digits."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    own = False
    if not hasattr(dest, "write"):
        dest = open(os.fspath(dest), "w", encoding="utf-8")
        own = True
    try:
        dest.write(CSV_HEADER + "\n")
        for r in rows:
            dest.write(
                f"{r.budget_n},{_fmt(r.normalized_budget)},{_fmt(r.fer)},"
                f"{_fmt(r.ber)},{r.trials},{_fmt(r.wall_time_s)}\n"
            )
    finally:
        if own:
            dest.close()


def read_csv(src) -> list[ResultRow]:
    """Parse a results file produced by ``write_csv``."""
    own = False
    if not hasattr(src, "read"):
        src = open(os.fspath(src), "r", encoding="utf-8")
        own = True
    try:
        lines = [ln.strip() for ln in src if ln.strip()]
    finally:
        if own:
            src.close()
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"results file must start with the header {CSV_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise ConfigError(f"malformed results row: {ln!r}")
        rows.append(
            ResultRow(
                budget_n=int(parts[0]),
                normalized_budget=float(parts[1]),
                fer=float(parts[2]),
                ber=float(parts[3]),
                trials=int(parts[4]),
                wall_time_s=float(parts[5]),
            )
        )
    return rows
