"""Baseline similarity metrics: ROUGE-1, ROUGE-L, BLEU, and a greedy
token-matching embedding metric.

The embedding metric scores each token by its best cosine match on the
other side and averages (optionally idf-weighted); per-token matches are
floored at 0 so all components stay in [0, 1] even on adversarial
embeddings.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTokenWarning, EmptyInput
from .store import EmbeddedText


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "PrfScore":
        s = precision + recall
        f1 = 2.0 * precision * recall / s if s > 0 else 0.0
        return cls(precision=precision, recall=recall, f1=f1)


def _check_nonempty(reference_tokens, candidate_tokens):
    if not reference_tokens or not candidate_tokens:
        raise EmptyInput("reference and candidate token lists must be non-empty")


def rouge1(reference_tokens: list[str], candidate_tokens: list[str]) -> PrfScore:
    """Clipped unigram overlap."""
    _check_nonempty(reference_tokens, candidate_tokens)
    ref_counts = Counter(reference_tokens)
    cand_counts = Counter(candidate_tokens)
    match = sum(min(c, ref_counts[w]) for w, c in cand_counts.items())
    return PrfScore.from_pr(
        precision=match / len(candidate_tokens),
        recall=match / len(reference_tokens),
    )


def _lcs_length(a: list[str], b: list[str]) -> int:
    # single-row DP; O(len(a) * len(b))
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rougeL(reference_tokens: list[str], candidate_tokens: list[str]) -> PrfScore:
    """Longest-common-subsequence overlap."""
    _check_nonempty(reference_tokens, candidate_tokens)
    lcs = _lcs_length(reference_tokens, candidate_tokens)
    return PrfScore.from_pr(
        precision=lcs / len(candidate_tokens),
        recall=lcs / len(reference_tokens),
    )


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(reference_tokens: list[str], candidate_tokens: list[str], max_n: int = 4) -> float:
    """Geometric mean of modified n-gram precisions with a brevity penalty.

    Zero-count precisions for n >= 2 get add-one smoothing on numerator
    and denominator; a zero unigram precision is not smoothed, so fully
    disjoint inputs score 0.
    """
    _check_nonempty(reference_tokens, candidate_tokens)
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = _ngrams(candidate_tokens, n)
        ref = _ngrams(reference_tokens, n)
        total = sum(cand.values())
        match = sum(min(c, ref[g]) for g, c in cand.items())
        if match == 0 and n >= 2:
            match, total = match + 1, total + 1
        if match == 0 or total == 0:
            return 0.0
        log_sum += math.log(match / total)
    bp = 1.0
    if len(candidate_tokens) < len(reference_tokens):
        bp = math.exp(1.0 - len(reference_tokens) / len(candidate_tokens))
    return bp * math.exp(log_sum / max_n)


def idf_weights_from_texts(token_lists: list[list[str]]) -> dict[str, float]:
    """Smoothed inverse document frequencies over a token-list corpus."""
    if not token_lists:
        raise EmptyInput("corpus is empty")
    n_docs = len(token_lists)
    df = Counter()
    for toks in token_lists:
        df.update(set(toks))
    return {w: math.log((n_docs + 1) / (d + 1)) for w, d in df.items()}


def _match_rows(t: EmbeddedText) -> tuple[list[int], np.ndarray]:
    """Indices and unit-normalized rows of matchable tokens.

    Special tokens are excluded; all-zero rows are excluded with a
    DegenerateTokenWarning.
    """
    keep = []
    for i, tok in enumerate(t.tokens):
        if tok.special:
            continue
        if not t.matrix[i].any():
            warnings.warn(
                f"token {i} ({tok.text!r}) has an all-zero embedding; excluded",
                DegenerateTokenWarning,
                stacklevel=3,
            )
            continue
        keep.append(i)
    rows = t.matrix[keep].astype(np.float64)
    if len(keep):
        rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return keep, rows


def _side_score(
    own: EmbeddedText, own_idx: list[int], best: np.ndarray,
    use_idf: bool, idf_weights: dict[str, float] | None,
) -> float:
    if use_idf:
        if not idf_weights:
            raise EmptyInput("use_idf requires idf_weights")
        w = np.array([idf_weights.get(own.tokens[i].text, 0.0) for i in own_idx])
        if w.sum() <= 0:
            raise EmptyInput("all idf weights are zero for this text")
    else:
        w = np.ones(len(own_idx))
    return float((w * best).sum() / w.sum())


def bertscore(
    reference: EmbeddedText,
    candidate: EmbeddedText,
    use_idf: bool = False,
    idf_weights: dict[str, float] | None = None,
) -> PrfScore:
    """Greedy max-cosine token matching averaged over each side."""
    ref_idx, ref_rows = _match_rows(reference)
    cand_idx, cand_rows = _match_rows(candidate)
    if not ref_idx or not cand_idx:
        raise EmptyInput("no matchable tokens after exclusions")
    sims = ref_rows @ cand_rows.T
    np.clip(sims, 0.0, 1.0, out=sims)
    recall = _side_score(reference, ref_idx, sims.max(axis=1), use_idf, idf_weights)
    precision = _side_score(candidate, cand_idx, sims.max(axis=0), use_idf, idf_weights)
    return PrfScore.from_pr(precision=precision, recall=recall)
