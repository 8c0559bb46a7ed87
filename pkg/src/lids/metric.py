"""Cosine similarity, the max-absolute-cosine score, and summary embeddings.

Scoring a (reference, test) pair: both matrices get the same row mask,
each is decomposed, and for every layer count k up to
K = min(n_test, n_ref, p) the absolute cosine between the two layered
direction vectors is recorded. The score is the curve maximum, k_hat the
smallest maximizing k, and the test text's d(k_hat) is its embedding.

Curve entries are clipped to [0, 1] and rounded to 12 significant digits
before the argmax so platform-dependent last-bit noise cannot flip ties;
the stored curve holds those rounded values, which keeps
score == max(curve) == curve[k_hat] exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyCurve, LidsError
from .store import EmbeddedText, MaskPolicy, apply_row_mask
from .svd import compute_svd, direction_profile

NORM_EPS = 1e-12


class CosineSimilarity(NamedTuple):
    value: float
    degenerate: bool


def round_sig(x: float, digits: int = 12) -> float:
    return float(f"{x:.{digits}g}")


def cosine_similarity(a, b) -> CosineSimilarity:
    """Standard cosine; near-zero norms give value 0 with degenerate=True."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DimensionMismatch("inputs must be finite")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < NORM_EPS or nb < NORM_EPS:
        return CosineSimilarity(0.0, True)
    return CosineSimilarity(float(a @ b) / (na * nb), False)


@dataclass(frozen=True, eq=False)
class SimilarityResult:
    score: float
    k_hat: int
    curve: tuple[float, ...]
    embedding: np.ndarray


@dataclass(frozen=True)
class BatchFailure:
    index: int
    error: str


def macs(
    reference: EmbeddedText,
    test: EmbeddedText,
    alpha: float = 1.0,
    mask: MaskPolicy = MaskPolicy(),
) -> SimilarityResult:
    """Max absolute cosine similarity over layer counts, plus the embedding."""
    if reference.p != test.p:
        raise DimensionMismatch(f"reference p={reference.p} vs test p={test.p}")
    ref_m = apply_row_mask(reference, mask)
    test_m = apply_row_mask(test, mask)
    K = min(test_m.n, ref_m.n, ref_m.p)
    if K < 1:
        raise EmptyCurve("no layer count to scan")
    ref_stack = compute_svd(ref_m.matrix)
    test_stack = compute_svd(test_m.matrix)
    ref_dirs = direction_profile(ref_m, ref_stack, K, alpha)
    test_dirs = direction_profile(test_m, test_stack, K, alpha)

    curve = []
    for k in range(K):
        cs = cosine_similarity(test_dirs[k].values, ref_dirs[k].values)
        val = 0.0 if cs.degenerate else abs(cs.value)
        curve.append(round_sig(min(max(val, 0.0), 1.0), 12))
    k_hat = int(np.argmax(curve)) + 1
    return SimilarityResult(
        score=curve[k_hat - 1],
        k_hat=k_hat,
        curve=tuple(curve),
        embedding=test_dirs[k_hat - 1].values,
    )


def score_batch(
    reference: EmbeddedText,
    tests: list[EmbeddedText],
    alpha: float = 1.0,
    mask: MaskPolicy = MaskPolicy(),
) -> list[SimilarityResult | BatchFailure]:
    """Score each test against the reference; failures are collected in place."""
    out: list[SimilarityResult | BatchFailure] = []
    for i, t in enumerate(tests):
        try:
            out.append(macs(reference, t, alpha=alpha, mask=mask))
        except LidsError as e:
            out.append(BatchFailure(index=i, error=f"{type(e).__name__}: {e}"))
    return out
