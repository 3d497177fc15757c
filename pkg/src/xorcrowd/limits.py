"""Closed-form query budgets for exact label recovery.

The threshold number of XOR queries for m labels is

    n* = m log m / sum_d sum_k (d phi_d / w) (sqrt(1 - eps_kd) - sqrt(eps_kd))^2

with natural logarithms.  Budgets above (1 + eta) n* admit strong recovery
and budgets below (1 - eta) n* defeat every estimator, so the denominator
acts as a per-query efficiency score.  The threshold requires the degree
distribution to put mass on at least one odd degree; callers comparing
even-degree designs can disable that guard.  ``homogeneous_limit`` is the
matching threshold when all queries must take exactly d distinct labels and
be answered by one worker pool with a common rate, which is a factor
2^(d-2) more expensive.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import ConfigError, DegreeDistribution, ReliabilityMatrix

__all__ = [
    "LimitReport",
    "efficiency_denominator",
    "xor_limit",
    "optimal_degree",
    "homogeneous_limit",
]


@dataclass(frozen=True)
class LimitReport:
    """Threshold budget together with the quantities that produced it."""

    n_star: float
    denominator: float
    eta: float
    side: str

    def to_dict(self) -> dict:
        return asdict(self)


def efficiency_denominator(phi: DegreeDistribution, reliability: ReliabilityMatrix) -> float:
    """Average per-query information rate under the design (phi, reliability)."""
    D = phi.D
    if reliability.D < D and np.any(phi.probs[reliability.D :] > 0):
        raise ConfigError(
            f"reliability table covers degrees up to {reliability.D}, "
            f"but the degree distribution reaches {D}"
        )
    d_used = min(D, reliability.D)
    eps = reliability.eps[:, :d_used]
    probs = phi.probs[:d_used]
    if np.any(np.isnan(eps[:, probs > 0])):
        raise ConfigError("reliability table is missing an entry for a used degree")
    gap = (np.sqrt(1.0 - eps) - np.sqrt(eps)) ** 2
    ds = np.arange(1, d_used + 1, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        per_degree = np.where(probs > 0, np.nansum(gap, axis=0) * ds * probs, 0.0)
    return float(per_degree.sum()) / reliability.w


def xor_limit(
    m: int,
    phi: DegreeDistribution,
    reliability: ReliabilityMatrix,
    eta: float = 0.0,
    side: str = "upper",
    require_odd_support: bool = True,
) -> LimitReport:
    """Threshold query count n* scaled to the requested side of the phase transition.

    ``side="upper"`` returns (1 + eta) n*, the budget at which recovery is
    guaranteed; ``side="lower"`` returns (1 - eta) n*.  ``eta=0`` gives the
    threshold itself.
    """
    if m < 1:
        raise ConfigError("m must be positive")
    if eta < 0:
        raise ConfigError("eta must be non-negative")
    if side not in ("upper", "lower"):
        raise ConfigError(f"side must be 'upper' or 'lower', got {side!r}")
    if require_odd_support and not phi.has_odd_support:
        raise ConfigError(
            "the degree distribution must put mass on an odd degree "
            "(pass require_odd_support=False to compare even-only designs)"
        )
    denominator = efficiency_denominator(phi, reliability)
    if denominator <= 0.0:
        raise ConfigError(
            "zero efficiency denominator: every contributing error rate is 0.5"
        )
    factor = 1.0 + eta if side == "upper" else 1.0 - eta
    n_star = factor * m * math.log(m) / denominator
    return LimitReport(n_star=n_star, denominator=denominator, eta=float(eta), side=side)


def optimal_degree(reliability: ReliabilityMatrix, D: int | None = None) -> int:
    """Degree whose point-mass design maximizes the efficiency denominator.

    Evaluates d * sum_k (sqrt(1 - eps_kd) - sqrt(eps_kd))^2 for each degree
    up to ``D`` (default: the table width) and returns the smallest argmax.
    """
    if D is None:
        D = reliability.D
    if not 1 <= D <= reliability.D:
        raise ConfigError(f"D must lie in [1, {reliability.D}]")
    eps = reliability.eps[:, :D]
    if np.any(np.isnan(eps)):
        raise ConfigError("reliability table is missing an entry")
    gap = (np.sqrt(1.0 - eps) - np.sqrt(eps)) ** 2
    objective = gap.sum(axis=0) * np.arange(1, D + 1)
    return int(np.argmax(objective)) + 1


def homogeneous_limit(m: int, d: int, eps: float) -> float:
    """Threshold when every query must XOR exactly d labels at a common rate.

    Requiring all-degree-d queries (instead of mixing in the lighter degrees)
    inflates the budget to (2^(d-2) / d) m log m / (sqrt(1-eps) - sqrt(eps))^2.
    """
    if m < 1:
        raise ConfigError("m must be positive")
    if d < 1:
        raise ConfigError("d must be >= 1")
    if not 0.0 < eps < 0.5:
        raise ConfigError(f"eps must lie in (0, 0.5), got {eps!r}")
    gap = (math.sqrt(1.0 - eps) - math.sqrt(eps)) ** 2
    return (2.0 ** (d - 2) / d) * m * math.log(m) / gap
