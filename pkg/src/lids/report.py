"""Score-distribution statistics, Sharpe ratios, rescaling, correlations,
and report assembly.

Correlation confidence intervals: Fisher z for Pearson, a normal
approximation with variance 2(2n+5)/(9n(n-1)) for Kendall's tau-b, and a
seeded percentile bootstrap (2000 resamples) for distance correlation.
"""

from __future__ import annotations

import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateRange,
    LengthMismatch,
    ZeroDispersion,
    ZeroDistanceVariance,
    ZeroVariance,
)

DCOR_BOOTSTRAP_SEED = 7919
DCOR_BOOTSTRAP_RESAMPLES = 2000


@dataclass(frozen=True)
class ScoreDistribution:
    label: str
    scores: tuple[float, ...]
    mean: float
    sd: float
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @classmethod
    def from_scores(cls, label: str, scores: Sequence[float]) -> "ScoreDistribution":
        arr = np.asarray(list(scores), dtype=np.float64)
        if arr.size == 0:
            raise ZeroDispersion(f"distribution {label!r} has no scores")
        sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        q1, med, q3 = (float(v) for v in np.percentile(arr, [25, 50, 75]))
        return cls(
            label=label,
            scores=tuple(float(x) for x in arr),
            mean=float(np.mean(arr)),
            sd=sd,
            min=float(arr.min()),
            q1=q1,
            median=med,
            q3=q3,
            max=float(arr.max()),
        )


@dataclass(frozen=True)
class CorrelationEstimate:
    estimate: float
    ci_low: float
    ci_high: float


def sharpe_ratio(mean: float, sd: float) -> float:
    """Mean divided by standard deviation."""
    if sd <= 0:
        raise ZeroDispersion(f"sd must be positive, got {sd}")
    return mean / sd


def rescale_unit_interval(groups: list[Sequence[float]]) -> list[list[float]]:
    """Affine map of all groups onto [0, 1] using the pooled min and max."""
    pooled = [x for g in groups for x in g]
    if not pooled:
        raise DegenerateRange("no scores to rescale")
    lo, hi = min(pooled), max(pooled)
    if hi == lo:
        raise DegenerateRange(f"all {len(pooled)} pooled values equal {lo}")
    span = hi - lo
    return [[(x - lo) / span for x in g] for g in groups]


def _paired(x, y, min_n: int):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"shapes {x.shape} vs {y.shape}")
    if len(x) < min_n:
        raise LengthMismatch(f"need at least {min_n} pairs, got {len(x)}")
    return x, y


def pearson(x, y) -> CorrelationEstimate:
    """Sample Pearson r with a 95% Fisher-transform interval."""
    x, y = _paired(x, y, 3)
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0 or vy == 0:
        raise ZeroVariance("an input has zero variance")
    r = float(xc @ yc) / np.sqrt(vx * vy)
    n = len(x)
    zcrit = float(norm.ppf(0.975))
    r_c = min(max(r, -1.0 + 1e-15), 1.0 - 1e-15)
    z = np.arctanh(r_c)
    if n > 3:
        se = 1.0 / np.sqrt(n - 3)
        lo, hi = np.tanh(z - zcrit * se), np.tanh(z + zcrit * se)
    else:
        lo, hi = -1.0, 1.0
    return CorrelationEstimate(estimate=r, ci_low=float(lo), ci_high=float(hi))


def kendall_tau(x, y) -> CorrelationEstimate:
    """Tie-corrected tau-b with a normal-approximation 95% interval."""
    x, y = _paired(x, y, 3)
    n = len(x)
    concordant = discordant = 0
    ties_x = ties_y = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                ties_x += 1
                ties_y += 1
            elif dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = np.sqrt(float(n0 - ties_x) * float(n0 - ties_y))
    if denom == 0:
        raise ZeroVariance("an input is constant")
    tau = (concordant - discordant) / denom
    zcrit = float(norm.ppf(0.975))
    se = np.sqrt(2.0 * (2 * n + 5) / (9.0 * n * (n - 1)))
    lo = max(tau - zcrit * se, -1.0)
    hi = min(tau + zcrit * se, 1.0)
    return CorrelationEstimate(estimate=float(tau), ci_low=float(lo), ci_high=float(hi))


def _dcor_stat(x: np.ndarray, y: np.ndarray) -> float:
    """Biased double-centering distance correlation on 1-D samples."""
    ax = np.abs(x[:, None] - x[None, :])
    ay = np.abs(y[:, None] - y[None, :])
    A = ax - ax.mean(axis=0, keepdims=True) - ax.mean(axis=1, keepdims=True) + ax.mean()
    B = ay - ay.mean(axis=0, keepdims=True) - ay.mean(axis=1, keepdims=True) + ay.mean()
    dvar_x = float((A * A).mean())
    dvar_y = float((B * B).mean())
    if dvar_x <= 0 or dvar_y <= 0:
        raise ZeroDistanceVariance("a sample has zero distance variance")
    dcov2 = float((A * B).mean())
    return float(np.sqrt(max(dcov2, 0.0) / np.sqrt(dvar_x * dvar_y)))


def distance_correlation(
    x,
    y,
    bootstrap_resamples: int = DCOR_BOOTSTRAP_RESAMPLES,
    seed: int = DCOR_BOOTSTRAP_SEED,
) -> CorrelationEstimate:
    """Distance correlation with a seeded percentile-bootstrap interval.

    Degenerate resamples (zero distance variance) are skipped, which is
    deterministic under the fixed seed.
    """
    x, y = _paired(x, y, 4)
    est = _dcor_stat(x, y)
    rng = np.random.default_rng(seed)
    n = len(x)
    stats = []
    for _ in range(bootstrap_resamples):
        idx = rng.integers(0, n, size=n)
        try:
            stats.append(_dcor_stat(x[idx], y[idx]))
        except ZeroDistanceVariance:
            continue
    if stats:
        lo, hi = (float(v) for v in np.percentile(stats, [2.5, 97.5]))
    else:
        lo, hi = 0.0, 1.0
    return CorrelationEstimate(estimate=est, ci_low=lo, ci_high=hi)


@dataclass(frozen=True)
class EvaluationReport:
    distributions: tuple[ScoreDistribution, ...]
    sharpe: dict[str, float]
    rescaled: dict[str, list[list[float]]] | None
    correlations: dict[str, CorrelationEstimate] | None
    timings_s: dict[str, float] | None
    memory_mb: dict[str, float] | None
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "distributions": [
                {
                    "label": d.label,
                    "n": len(d.scores),
                    "mean": d.mean,
                    "sd": d.sd,
                    "min": d.min,
                    "q1": d.q1,
                    "median": d.median,
                    "q3": d.q3,
                    "max": d.max,
                }
                for d in self.distributions
            ],
            "sharpe": dict(self.sharpe),
            "rescaled": self.rescaled,
            "correlations": None
            if self.correlations is None
            else {
                kind: {"estimate": c.estimate, "ci_low": c.ci_low, "ci_high": c.ci_high}
                for kind, c in self.correlations.items()
            },
            "timings_s": self.timings_s,
            "memory_mb": self.memory_mb,
            "meta": dict(self.meta),
        }
        return out

    def render_table(self) -> str:
        lines = []
        header = f"{'label':<16} {'n':>4} {'mean':>12} {'sd':>12} {'sharpe':>12}"
        lines.append(header)
        lines.append("-" * len(header))
        for d in self.distributions:
            sr = self.sharpe.get(d.label)
            sr_s = f"{sr:12.4f}" if sr is not None else " " * 12
            lines.append(f"{d.label:<16} {len(d.scores):>4} {d.mean:12.6f} {d.sd:12.6f} {sr_s}")
        if self.correlations:
            lines.append("")
            lines.append(f"{'correlation':<16} {'estimate':>10} {'95% CI':>20}")
            for kind, c in self.correlations.items():
                lines.append(
                    f"{kind:<16} {c.estimate:>10.4f}     [{c.ci_low:.4f}, {c.ci_high:.4f}]"
                )
        return "\n".join(lines)


def build_report(
    labelled_scores: Sequence[tuple[str, Sequence[float]]],
    human_scores: Sequence[float] | None = None,
    correlate_label: str | None = None,
    metric_label: str = "similarity",
    timings_s: dict[str, float] | None = None,
    memory_mb: dict[str, float] | None = None,
    meta: dict | None = None,
) -> EvaluationReport:
    """Assemble the full report; optional sections stay None when absent.

    human_scores, when given, are correlated against the distribution
    named by correlate_label (default: the first one).
    """
    if not labelled_scores:
        raise ZeroDispersion("need at least one scored distribution")
    dists = tuple(ScoreDistribution.from_scores(label, s) for label, s in labelled_scores)
    sharpe = {d.label: sharpe_ratio(d.mean, d.sd) for d in dists}
    rescaled = None
    if len([x for d in dists for x in d.scores]) >= 2:
        try:
            rescaled = {metric_label: rescale_unit_interval([list(d.scores) for d in dists])}
        except DegenerateRange:
            rescaled = None
    correlations = None
    if human_scores is not None:
        target = correlate_label or dists[0].label
        by_label = {d.label: d for d in dists}
        if target not in by_label:
            raise LengthMismatch(f"correlate_label {target!r} not among distributions")
        metric_scores = list(by_label[target].scores)
        correlations = {
            "pearson": pearson(human_scores, metric_scores),
            "kendall": kendall_tau(human_scores, metric_scores),
            "dcor": distance_correlation(human_scores, metric_scores),
        }
    return EvaluationReport(
        distributions=dists,
        sharpe=sharpe,
        rescaled=rescaled,
        correlations=correlations,
        timings_s=timings_s,
        memory_mb=memory_mb,
        meta=meta or {},
    )


def measure_cost(fn: Callable[[], object]) -> tuple[float, float]:
    """Wall-clock seconds and peak traced-memory MB of one call."""
    tracemalloc.start()
    t0 = time.perf_counter()
    fn()
    elapsed = time.perf_counter() - t0
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return elapsed, peak / (1024 * 1024)
