"""Shared generators and independent brute-force oracles for the tests.

The oracles deliberately use a different computation style (explicit
loops, literal definitions) from the library code they check.
"""

from __future__ import annotations

import math

import numpy as np

from lids.store import EmbeddedText, TokenRecord

STOP_WORDS = ("the", "of", "and", "a", "to", "in")


def make_tokens(rng: np.random.Generator, n: int, stop_frac: float = 0.2) -> tuple[TokenRecord, ...]:
    """A valid token sequence: one word per token, some stopwords."""
    tokens = []
    for i in range(n):
        if rng.random() < stop_frac:
            text = STOP_WORDS[int(rng.integers(0, len(STOP_WORDS)))]
            tokens.append(TokenRecord(text, i, stopword=True))
        else:
            tokens.append(TokenRecord(f"w{i:03d}", i))
    return tuple(tokens)


def rand_text(
    rng: np.random.Generator,
    n: int,
    p: int,
    scale: float = 1.0,
    model_id: str = "test",
    stop_frac: float = 0.2,
) -> EmbeddedText:
    matrix = (scale * rng.normal(size=(n, p))).astype(np.float32)
    return EmbeddedText(model_id=model_id, tokens=make_tokens(rng, n, stop_frac), matrix=matrix)


def scale_text(t: EmbeddedText, c: float) -> EmbeddedText:
    return EmbeddedText(
        model_id=t.model_id,
        tokens=t.tokens,
        matrix=(np.asarray(t.matrix, dtype=np.float64) * c).astype(np.float32),
    )


# ── oracles ──────────────────────────────────────────────────────────

def bh_oracle(pvalues, q: float) -> set[int]:
    """Literal max-i evaluation of the step-up definition."""
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    i_star = 0
    for rank in range(1, m + 1):
        if pvalues[order[rank - 1]] <= rank * q / m:
            i_star = rank
    return set(order[:i_star])


def pearson_oracle(x, y) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def kendall_oracle(x, y) -> float:
    n = len(x)
    c = d = tx = ty = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                tx += 1
                ty += 1
            elif dx == 0:
                tx += 1
            elif dy == 0:
                ty += 1
            elif (dx > 0 and dy > 0) or (dx < 0 and dy < 0):
                c += 1
            else:
                d += 1
    n0 = n * (n - 1) // 2
    return (c - d) / math.sqrt((n0 - tx) * (n0 - ty))


def dcor_oracle(x, y) -> float:
    """Explicit O(n^2) double-centering with scalar loops."""
    n = len(x)
    a = [[abs(x[i] - x[j]) for j in range(n)] for i in range(n)]
    b = [[abs(y[i] - y[j]) for j in range(n)] for i in range(n)]

    def center(mat):
        row = [sum(r) / n for r in mat]
        col = [sum(mat[i][j] for i in range(n)) / n for j in range(n)]
        grand = sum(row) / n
        return [[mat[i][j] - row[i] - col[j] + grand for j in range(n)] for i in range(n)]

    A = center(a)
    B = center(b)
    dcov2 = sum(A[i][j] * B[i][j] for i in range(n) for j in range(n)) / (n * n)
    dvarx = sum(A[i][j] ** 2 for i in range(n) for j in range(n)) / (n * n)
    dvary = sum(B[i][j] ** 2 for i in range(n) for j in range(n)) / (n * n)
    return math.sqrt(max(dcov2, 0.0) / math.sqrt(dvarx * dvary))


def bertscore_oracle(ref_rows, cand_rows) -> tuple[float, float, float]:
    """Brute-force greedy matching over all token pairs, floored at 0."""

    def cos(u, v):
        nu = math.sqrt(sum(a * a for a in u))
        nv = math.sqrt(sum(a * a for a in v))
        return sum(a * b for a, b in zip(u, v)) / (nu * nv)

    recall = sum(max(0.0, max(cos(r, c) for c in cand_rows)) for r in ref_rows) / len(ref_rows)
    precision = sum(max(0.0, max(cos(c, r) for r in ref_rows)) for c in cand_rows) / len(cand_rows)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def bootstrap_u_sd(X, layer: int, n_rep: int, seed: int) -> np.ndarray:
    """Parametric-bootstrap SDs of left-singular-vector components.

    Resamples X_k + E*, E* ~ N(0, sigma_hat^2), recomputes the SVD, and
    sign-aligns each replicate to the original vector.
    """
    from lids.inference import estimate_noise_sigma

    X = np.asarray(X, dtype=np.float64)
    k = layer
    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    Xk = (U[:, :k] * s[:k]) @ Vh[:k]
    sigma = estimate_noise_sigma(X, k)
    rng = np.random.default_rng(seed)
    u_ref = U[:, k - 1]
    reps = []
    for _ in range(n_rep):
        Xb = Xk + rng.normal(0.0, sigma, size=X.shape)
        Ub = np.linalg.svd(Xb, full_matrices=False)[0][:, k - 1]
        if Ub @ u_ref < 0:
            Ub = -Ub
        reps.append(Ub)
    return np.std(np.stack(reps), axis=0, ddof=1)
