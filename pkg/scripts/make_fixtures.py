#!/usr/bin/env python3
"""Generate the checked-in test fixture bundle.

Builds a synthetic embedding world with the structure real encoder
output exhibits: every fluent text shares a dominant common direction
(anisotropy), coherent texts add strong theme directions, and scrambled
word-sample texts lose most of the common direction and gain noise.
That reproduces the qualitative ordering the benchmark-separation test
pins down: good summaries > off-topic summaries > word-sample summaries.

Run from the repo root: python scripts/make_fixtures.py
Regenerating overwrites tests/fixtures; the golden MACS value is
recomputed and frozen alongside the binary files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from lids.metric import macs
from lids.store import EmbeddedText, TokenRecord, save_embedded_text

OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
SEED = 20250808
P = 32
MODEL_ID = "fixture-encoder-v1"

ARTICLE_LEN = 160
SUMMARY_LEN = 40
STOP_SHARE = 0.30

COMMON_SCALE = 1.45     # shared "fluent language" direction strength
THEME_SCALE = 1.0       # per-word theme content strength
NOISE_SCALE = 0.18      # per-token contextual noise for fluent text
NAIVE_COMMON = 0.42     # scrambled text keeps only a fraction of the common direction
NAIVE_THEME = 0.85
NAIVE_NOISE = 0.95

STOPWORDS = ["the", "of", "and", "a", "to", "in", "is", "was", "for", "on"]

CONTENT_WORDS = {
    0: ["lawsuit", "family", "house", "mold", "sued", "owner", "damages", "court"],
    1: ["murder", "charges", "husband", "police", "arrest", "trial", "evidence", "widow"],
    2: ["mortgage", "flipping", "market", "renovation", "inspection", "contract", "escrow", "realtor"],
    3: ["rover", "landing", "crater", "orbit", "thrusters", "telemetry", "descent", "parachute"],
    4: ["harvest", "orchard", "cider", "grafting", "blossom", "pruning", "frost", "yield"],
    5: ["violin", "concerto", "rehearsal", "maestro", "strings", "tempo", "encore", "soloist"],
}


def orthonormal_directions(rng: np.random.Generator, count: int) -> np.ndarray:
    raw = rng.normal(size=(P, count))
    q, _ = np.linalg.qr(raw)
    return q.T  # rows are orthonormal


def build_lexicon(rng: np.random.Generator, themes: np.ndarray) -> dict[str, np.ndarray]:
    vecs: dict[str, np.ndarray] = {}
    for theme_id, words in CONTENT_WORDS.items():
        for w in words:
            idio = rng.normal(size=P)
            idio /= np.linalg.norm(idio)
            v = themes[theme_id] + 0.45 * idio
            vecs[w] = v / np.linalg.norm(v)
    for w in STOPWORDS:
        idio = rng.normal(size=P)
        vecs[w] = 0.35 * idio / np.linalg.norm(idio)
    return vecs


def sample_words(
    rng: np.random.Generator,
    theme_weights: dict[int, float],
    length: int,
) -> list[str]:
    themes = list(theme_weights)
    probs = np.array([theme_weights[t] for t in themes], dtype=float)
    probs /= probs.sum()
    words = []
    for _ in range(length):
        if rng.random() < STOP_SHARE:
            words.append(STOPWORDS[int(rng.integers(0, len(STOPWORDS)))])
        else:
            theme = themes[int(rng.choice(len(themes), p=probs))]
            pool = CONTENT_WORDS[theme]
            words.append(pool[int(rng.integers(0, len(pool)))])
    return words


def embed(
    rng: np.random.Generator,
    words: list[str],
    lexicon: dict[str, np.ndarray],
    common: np.ndarray,
    common_scale: float,
    theme_scale: float,
    noise_scale: float,
) -> EmbeddedText:
    rows = np.empty((len(words), P), dtype=np.float64)
    tokens = []
    for i, w in enumerate(words):
        rows[i] = (
            common_scale * common
            + theme_scale * lexicon[w]
            + noise_scale * rng.normal(size=P)
        )
        tokens.append(TokenRecord(w, i, stopword=(w in STOPWORDS)))
    return EmbeddedText(
        model_id=MODEL_ID, tokens=tuple(tokens), matrix=rows.astype(np.float32)
    )


def fluent(rng, words, lexicon, common) -> EmbeddedText:
    return embed(rng, words, lexicon, common, COMMON_SCALE, THEME_SCALE, NOISE_SCALE)


def scrambled(rng, words, lexicon, common) -> EmbeddedText:
    return embed(
        rng,
        words,
        lexicon,
        common,
        COMMON_SCALE * NAIVE_COMMON,
        THEME_SCALE * NAIVE_THEME,
        NOISE_SCALE * NAIVE_NOISE / NOISE_SCALE,  # absolute naive noise level
    )


def jitter_weights(rng, weights: dict[int, float]) -> dict[int, float]:
    jittered = {t: max(w + 0.06 * rng.normal(), 0.02) for t, w in weights.items()}
    total = sum(jittered.values())
    return {t: w / total for t, w in jittered.items()}


def make_human_verification_pairs(rng: np.random.Generator) -> list[dict]:
    """30 (human, metric) pairs with a strong but imperfect linear link."""
    pairs = []
    for _ in range(30):
        human = float(np.round(rng.uniform(1.2, 5.0), 2))
        metric = 0.55 + 0.085 * human + 0.035 * rng.normal()
        pairs.append({"human": human, "metric": float(np.round(min(max(metric, 0.0), 1.0), 6))})
    return pairs


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    directions = orthonormal_directions(rng, 7)
    common = directions[0]
    themes = directions[1:]
    lexicon = build_lexicon(rng, themes)

    article_weights = {0: 0.55, 1: 0.30, 2: 0.15}
    offtopic_weights = {3: 0.55, 4: 0.30, 5: 0.15}

    article_words = sample_words(rng, article_weights, ARTICLE_LEN)
    article = fluent(rng, article_words, lexicon, common)

    goods, naives, offtopics = [], [], []
    for _ in range(10):
        words = sample_words(rng, jitter_weights(rng, article_weights), SUMMARY_LEN)
        goods.append(fluent(rng, words, lexicon, common))
    for _ in range(10):
        # the word-sample mechanism: draw words from the article itself
        idx = rng.integers(0, len(article_words), size=SUMMARY_LEN)
        words = [article_words[i] for i in idx]
        naives.append(scrambled(rng, words, lexicon, common))
    for _ in range(10):
        words = sample_words(rng, jitter_weights(rng, offtopic_weights), SUMMARY_LEN)
        offtopics.append(fluent(rng, words, lexicon, common))

    good_scores = [macs(article, t).score for t in goods]
    naive_scores = [macs(article, t).score for t in naives]
    off_scores = [macs(article, t).score for t in offtopics]

    print(f"good     min={min(good_scores):.6f} max={max(good_scores):.6f}")
    print(f"offtopic min={min(off_scores):.6f} max={max(off_scores):.6f}")
    print(f"naive    min={min(naive_scores):.6f} max={max(naive_scores):.6f}")

    margin1 = min(good_scores) - max(off_scores)
    margin2 = max(off_scores) - max(naive_scores)
    if margin1 <= 0.01 or margin2 <= 0.01:
        print(f"separation too thin: {margin1:.4f}, {margin2:.4f}", file=sys.stderr)
        return 1

    (OUT_DIR / "article.lids").write_bytes(save_embedded_text(article))
    for i, t in enumerate(goods, 1):
        (OUT_DIR / f"good_{i:02d}.lids").write_bytes(save_embedded_text(t))
    for i, t in enumerate(naives, 1):
        (OUT_DIR / f"naive_{i:02d}.lids").write_bytes(save_embedded_text(t))
    for i, t in enumerate(offtopics, 1):
        (OUT_DIR / f"offtopic_{i:02d}.lids").write_bytes(save_embedded_text(t))

    first = macs(article, goods[0])
    golden = {
        "article_vs_good_01": {"score": round(first.score, 6), "k_hat": first.k_hat},
        "separation": {
            "min_good": round(min(good_scores), 6),
            "max_offtopic": round(max(off_scores), 6),
            "max_naive": round(max(naive_scores), 6),
        },
        "seed": SEED,
    }
    (OUT_DIR / "golden.json").write_text(json.dumps(golden, indent=2) + "\n")

    pairs = make_human_verification_pairs(rng)
    (OUT_DIR / "human_scores.json").write_text(json.dumps(pairs, indent=2) + "\n")

    print(f"wrote {2 + 30 + 1} fixture files to {OUT_DIR}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
