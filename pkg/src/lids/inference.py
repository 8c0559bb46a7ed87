"""Per-layer keyword selection with FDR control, and word-cloud emission.

Test statistics for the components of a left singular vector use the
first-order perturbation plug-in SE(u_li) ~ sigma/lam_l. Raw singular
values of a noisy matrix absorb noise energy up to the bulk edge
sigma*(sqrt(n)+sqrt(p)), which makes the raw plug-in anti-conservative
on weak or absent signal layers; by default the statistic therefore uses
the edge-debiased value

    lam_eff^2 = max(lam^2 - (sqrt(n)+sqrt(p))^2 * sigma^2, 0)

so that layers indistinguishable from noise produce z = 0. Pass
edge_correction=False for the raw plug-in. Outputs are labelled
"sofari-approx-plugin" to mark the approximation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape as xml_escape

import numpy as np
from scipy.special import erfc

from .errors import LengthMismatch, RankTooLarge, ZeroSingularValue
from .store import EmbeddedText, TokenRecord
from .svd import SvdStack, compute_svd

SIGMA_FLOOR = 1e-12
CLOUD_METHOD = "sofari-approx-plugin"


@dataclass(frozen=True)
class LayerStats:
    layer: int
    z: np.ndarray
    pvalues: np.ndarray
    sigma_hat: float


@dataclass(frozen=True)
class WordEntry:
    word: str
    stat: float
    pvalue: float
    selected: bool


@dataclass(frozen=True)
class RecombinedWord:
    word: str
    stat: float
    pvalue: float
    piece_indices: tuple[int, ...]


@dataclass(frozen=True)
class LayerKeywordSet:
    layer: int
    entries: tuple[WordEntry, ...]
    q: float
    singular_value: float


def estimate_noise_sigma(X, k: int) -> float:
    """Residual-based noise scale after removing the top k layers.

    sigma^2 = ||X - X_k||_F^2 / max(1, n*p - k*(n + p - k)), floored at
    1e-12 so exactly low-rank inputs stay usable downstream.
    """
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= min(n, p):
        raise RankTooLarge(f"k={k} leaves no residual for min(n,p)={min(n, p)}")
    s = np.linalg.svd(X, compute_uv=False)
    residual = float(np.sum(s[k:] ** 2))
    dof = max(1, n * p - k * (n + p - k))
    return max(math.sqrt(residual / dof), SIGMA_FLOOR)


def noise_edge(n: int, p: int) -> float:
    """Bulk-edge factor: the largest singular value of pure noise
    concentrates at sigma * (sqrt(n) + sqrt(p))."""
    return math.sqrt(n) + math.sqrt(p)


def layer_zstats(
    stack: SvdStack,
    sigma_hat: float,
    l: int,
    edge_correction: bool = True,
) -> LayerStats:
    """Component z-statistics and two-sided normal p-values for layer l."""
    if sigma_hat <= 0:
        raise ValueError(f"sigma_hat must be positive, got {sigma_hat}")
    if not 1 <= l <= stack.rank:
        raise RankTooLarge(f"layer {l} out of 1..{stack.rank}")
    lam = float(stack.singular_values[l - 1])
    if lam <= 1e-12:
        raise ZeroSingularValue(f"layer {l} has singular value {lam}")
    if edge_correction:
        n = stack.left_vectors.shape[0]
        p = stack.right_vectors.shape[0]
        lam_eff = math.sqrt(max(lam**2 - (noise_edge(n, p) * sigma_hat) ** 2, 0.0))
    else:
        lam_eff = lam
    u = stack.left_vectors[:, l - 1].astype(np.float64)
    z = lam_eff * u / sigma_hat
    pvalues = erfc(np.abs(z) / math.sqrt(2.0))
    return LayerStats(layer=int(l), z=z, pvalues=pvalues, sigma_hat=float(sigma_hat))


def bh_select(pvalues, q: float) -> set[int]:
    """Step-up selection: reject the i* smallest p-values where
    i* = max{i : p_(i) <= i*q/m}, returning original indices."""
    p = np.asarray(pvalues, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("pvalues must be 1-D")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("pvalues must lie in [0, 1]")
    if not 0 < q < 1:
        raise ValueError(f"q must be in (0, 1), got {q}")
    m = len(p)
    if m == 0:
        return set()
    order = np.argsort(p, kind="stable")
    ranked = p[order]
    ok = ranked <= (np.arange(1, m + 1) * q) / m
    if not ok.any():
        return set()
    i_star = int(np.max(np.nonzero(ok)[0])) + 1
    return {int(i) for i in order[:i_star]}


def recombine_words(
    tokens: tuple[TokenRecord, ...] | list[TokenRecord],
    stats,
    pvalues,
) -> list[RecombinedWord]:
    """Collapse wordpieces to words: stat = max |piece stat|, pvalue = min.

    Continuation markers ("##" prefixes) are stripped when concatenating.
    Words made entirely of stopword/punctuation/special pieces are dropped.
    """
    stats = np.asarray(stats, dtype=np.float64)
    pvalues = np.asarray(pvalues, dtype=np.float64)
    if not (len(tokens) == len(stats) == len(pvalues)):
        raise LengthMismatch(
            f"{len(tokens)} tokens vs {len(stats)} stats vs {len(pvalues)} p-values"
        )
    groups: dict[int, list[int]] = {}
    for i, tok in enumerate(tokens):
        groups.setdefault(tok.word_index, []).append(i)
    out = []
    for word_index in sorted(groups):
        idx = groups[word_index]
        if all(
            tokens[i].stopword or tokens[i].punctuation or tokens[i].special
            for i in idx
        ):
            continue
        pieces = []
        for i in idx:
            text = tokens[i].text
            if tokens[i].continuation and text.startswith("##"):
                text = text[2:]
            pieces.append(text)
        out.append(
            RecombinedWord(
                word="".join(pieces),
                stat=float(np.max(np.abs(stats[idx]))),
                pvalue=float(np.min(pvalues[idx])),
                piece_indices=tuple(idx),
            )
        )
    return out


def keyword_clouds(
    t: EmbeddedText,
    k_hat: int,
    q: float = 0.005,
    rank_for_noise: int | None = None,
) -> list[LayerKeywordSet]:
    """Keyword sets for layers 1..k_hat: per-layer z-stats, piece-level
    BH selection, then wordpiece recombination for display."""
    if not 0 < q < 1:
        raise ValueError(f"q must be in (0, 1), got {q}")
    if k_hat < 1 or k_hat > min(t.n, t.p) - 1:
        raise RankTooLarge(
            f"k_hat={k_hat} must lie in 1..min(n,p)-1 = {min(t.n, t.p) - 1}"
        )
    rank = k_hat if rank_for_noise is None else rank_for_noise
    sigma = estimate_noise_sigma(t.matrix, rank)
    stack = compute_svd(t.matrix)
    sets = []
    for layer in range(1, k_hat + 1):
        st = layer_zstats(stack, sigma, layer)
        selected = bh_select(st.pvalues, q)
        words = recombine_words(t.tokens, st.z, st.pvalues)
        entries = tuple(
            WordEntry(
                word=w.word,
                stat=w.stat,
                pvalue=w.pvalue,
                selected=any(i in selected for i in w.piece_indices),
            )
            for w in words
        )
        sets.append(
            LayerKeywordSet(
                layer=layer,
                entries=entries,
                q=float(q),
                singular_value=float(stack.singular_values[layer - 1]),
            )
        )
    return sets


# ── emission ─────────────────────────────────────────────────────────

SVG_WIDTH = 800
SVG_PANEL_HEIGHT = 400
_FONT_MAX = 48.0
_FONT_MIN = 14.0
_PALETTE = ("#1f3a60", "#2e6f95", "#468faf", "#61a5c2", "#89c2d9")


def _round9(x: float) -> float:
    return float(f"{x:.9g}")


def emit_cloud(
    sets: list[LayerKeywordSet],
    format: str = "json",
    sigma_hat: float = SIGMA_FLOOR,
) -> bytes:
    """Serialize keyword sets as cloud JSON or a deterministic SVG."""
    if not sets:
        raise ValueError("sets must be non-empty")
    if format == "json":
        return _emit_json(sets, sigma_hat)
    if format == "svg":
        return _emit_svg(sets)
    raise ValueError(f"format must be 'json' or 'svg', got {format!r}")


def _emit_json(sets: list[LayerKeywordSet], sigma_hat: float) -> bytes:
    obj = {
        "layers": [
            {
                "layer": s.layer,
                "singular_value": _round9(s.singular_value),
                "q": _round9(s.q),
                "words": [
                    {
                        "word": e.word,
                        "stat": _round9(e.stat),
                        "pvalue": _round9(e.pvalue),
                        "selected": e.selected,
                    }
                    for e in s.entries
                ],
            }
            for s in sets
        ],
        "method": CLOUD_METHOD,
        "sigma_hat": _round9(sigma_hat),
    }
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _font_size(rank: int, n_words: int) -> float:
    if n_words <= 1:
        return _FONT_MAX
    return _FONT_MAX - (_FONT_MAX - _FONT_MIN) * rank / (n_words - 1)


def _spiral_place(words: list[tuple[str, float]], top: float) -> list[str]:
    """Place (word, size) boxes on an arithmetic spiral from the panel
    center, in the given order, skipping positions that collide."""
    placed: list[tuple[float, float, float, float]] = []
    elems = []
    cx, cy = SVG_WIDTH / 2.0, top + SVG_PANEL_HEIGHT / 2.0
    for rank, (word, size) in enumerate(words):
        w = 0.62 * size * max(len(word), 1)
        h = 1.05 * size
        step = 0
        while True:
            theta = 0.35 * step
            r = 3.0 + 2.2 * theta
            x = cx + 1.6 * r * math.cos(theta) - w / 2.0
            y = cy + r * math.sin(theta) - h / 2.0
            step += 1
            if x < 4 or y < top + 4 or x + w > SVG_WIDTH - 4 or y + h > top + SVG_PANEL_HEIGHT - 4:
                if step > 4000:
                    break  # give up; drop overflowing word
                continue
            if any(
                x < px + pw and px < x + w and y < py + ph and py < y + h
                for px, py, pw, ph in placed
            ):
                continue
            placed.append((x, y, w, h))
            color = _PALETTE[rank % len(_PALETTE)]
            elems.append(
                f'<text x="{x + w / 2:.2f}" y="{y + h * 0.8:.2f}" '
                f'font-size="{size:.2f}" text-anchor="middle" '
                f'font-family="sans-serif" fill="{color}">{xml_escape(word)}</text>'
            )
            break
    return elems


def _emit_svg(sets: list[LayerKeywordSet]) -> bytes:
    total_h = SVG_PANEL_HEIGHT * len(sets)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
        f'height="{total_h}" viewBox="0 0 {SVG_WIDTH} {total_h}">',
    ]
    for panel, s in enumerate(sets):
        top = panel * SVG_PANEL_HEIGHT
        parts.append(f'<g id="layer-{s.layer}">')
        parts.append(
            f'<rect x="0" y="{top}" width="{SVG_WIDTH}" height="{SVG_PANEL_HEIGHT}" '
            'fill="#ffffff" stroke="#cccccc"/>'
        )
        parts.append(
            f'<text x="10" y="{top + 22}" font-size="16" font-family="sans-serif" '
            f'fill="#333333">layer {s.layer} (singular value {s.singular_value:.9g})</text>'
        )
        chosen = [e for e in s.entries if e.selected]
        chosen.sort(key=lambda e: (-e.stat, e.word))
        if not chosen:
            parts.append(
                f'<text x="{SVG_WIDTH / 2}" y="{top + SVG_PANEL_HEIGHT / 2}" '
                'font-size="18" text-anchor="middle" font-family="sans-serif" '
                'fill="#999999">no selected words</text>'
            )
        else:
            sized = [
                (e.word, _font_size(rank, len(chosen)))
                for rank, e in enumerate(chosen)
            ]
            parts.extend(_spiral_place(sized, float(top)))
        parts.append("</g>")
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
