"""Thin SVD stacks, per-layer signs, and layered direction vectors.

A direction vector accumulates, over the top k SVD layers, the
singular-value-weighted and sign-corrected sum of token embedding rows:

    d(k) = sum_{l<=k} lam_l^alpha * s_l * sum_i u_li * w_i

with s_l the sign of the right singular vector's mean component, which
fixes the sign ambiguity of each (u_l, v_l) pair. Since sum_i u_li w_i
is exactly X^T u_l = lam_l v_l when w are the rows X was decomposed
from, d(k) equals sum_l lam_l^(alpha+1) s_l v_l up to float noise; the
token-sum form is the one implemented, the identity is used by tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LayerOutOfRange, NonFiniteEntry, NumericalFailure, ZeroMatrix
from .store import EmbeddedText


@dataclass(frozen=True)
class SvdStack:
    singular_values: np.ndarray  # (r,), nonincreasing, r = min(n, p)
    left_vectors: np.ndarray     # (n, r), columns u_l
    right_vectors: np.ndarray    # (p, r), columns v_l
    signs: np.ndarray            # (r,), each +1 or -1

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    def orthonormality_error(self) -> float:
        """Max Frobenius deviation of U^T U and V^T V from identity."""
        r = self.rank
        eye = np.eye(r)
        eu = np.linalg.norm(self.left_vectors.T @ self.left_vectors - eye)
        ev = np.linalg.norm(self.right_vectors.T @ self.right_vectors - eye)
        return float(max(eu, ev))

    def reconstruction_error(self, X) -> float:
        """Relative Frobenius error of U diag(lam) V^T against X."""
        X = np.asarray(X, dtype=np.float64)
        approx = (self.left_vectors * self.singular_values) @ self.right_vectors.T
        return float(np.linalg.norm(X - approx) / np.linalg.norm(X))


@dataclass(frozen=True)
class DirectionVector:
    values: np.ndarray
    k: int
    alpha: float


def layer_sign(v: np.ndarray) -> int:
    """Sign of <v, 1/sqrt(p)>; exactly-zero inner products break to +1."""
    total = float(np.sum(np.asarray(v, dtype=np.float64)))
    return -1 if total < 0.0 else 1


def compute_svd(X) -> SvdStack:
    """Full thin SVD with per-layer signs; computed in float64."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ZeroMatrix(f"need a nonempty 2-D matrix, got shape {X.shape}")
    if not np.isfinite(X).all():
        idx = np.argwhere(~np.isfinite(X))[0]
        raise NonFiniteEntry(f"non-finite entry at row {idx[0]}, col {idx[1]}")
    if not X.any():
        raise ZeroMatrix("matrix has Frobenius norm 0")
    try:
        U, s, Vh = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"SVD did not converge: {e}") from None
    signs = np.array([layer_sign(Vh[l]) for l in range(len(s))], dtype=np.int64)
    return SvdStack(
        singular_values=s,
        left_vectors=U,
        right_vectors=np.ascontiguousarray(Vh.T),
        signs=signs,
    )


def _accumulate_layers(matrix, stack: SvdStack, k: int, alpha: float):
    """Yield the running direction sum after each of the first k layers.

    direction_vector and direction_profile both consume this generator,
    so a profile entry and the corresponding standalone vector are
    computed by the identical sequence of float operations.
    """
    Xt = np.ascontiguousarray(np.asarray(matrix, dtype=np.float64).T)
    acc = np.zeros(Xt.shape[0], dtype=np.float64)
    for l in range(k):
        lam = stack.singular_values[l]
        coeff = (lam ** alpha) * stack.signs[l]
        acc = acc + coeff * (Xt @ stack.left_vectors[:, l])
        yield acc


def _check_k(stack: SvdStack, k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise LayerOutOfRange(f"layer count must be a positive integer, got {k!r}")
    if k > stack.rank:
        raise LayerOutOfRange(f"k={k} exceeds available layers r={stack.rank}")


def direction_vector(t: EmbeddedText, s: SvdStack, k: int, alpha: float = 1.0) -> DirectionVector:
    """Layered direction vector d(k) for a text and its SVD stack."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    _check_k(s, k)
    for acc in _accumulate_layers(t.matrix, s, k, alpha):
        pass
    return DirectionVector(values=acc, k=int(k), alpha=float(alpha))


def direction_profile(
    t: EmbeddedText, s: SvdStack, k_max: int, alpha: float = 1.0
) -> list[DirectionVector]:
    """d(k) for every k = 1..k_max, sharing one incremental accumulation."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    _check_k(s, k_max)
    out = []
    for k, acc in enumerate(_accumulate_layers(t.matrix, s, k_max, alpha), start=1):
        out.append(DirectionVector(values=acc.copy(), k=k, alpha=float(alpha)))
    return out
