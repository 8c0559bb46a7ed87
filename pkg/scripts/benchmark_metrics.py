#!/usr/bin/env python3
"""Measure per-metric cost and score spread on the fixture bundle.

For each similarity metric, scores the fixture article against all 30
fixture summaries while recording wall-clock time and peak traced
memory. Writes:

    costs.json          {"timings_s": {...}, "memory_mb": {...}}
    scores_good.json    MACS scores of the 10 good summaries
    scores_naive.json   ... word-sample summaries
    scores_offtopic.json ... off-topic summaries

Feed the outputs to the report command, e.g.

    lids report good=out/scores_good.json naive=out/scores_naive.json \
        offtopic=out/scores_offtopic.json --timings out/costs.json --out out
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from lids.metric import macs
from lids.refmetrics import bertscore, bleu, rouge1, rougeL
from lids.report import measure_cost
from lids.store import load_embedded_text

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def token_texts(t):
    return [tok.text for tok in t.tokens if not tok.special]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="benchmark_out", help="output directory")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    article = load_embedded_text((FIXTURES / "article.lids").read_bytes())
    groups = {
        name: [
            load_embedded_text(p.read_bytes())
            for p in sorted(FIXTURES.glob(f"{name}_*.lids"))
        ]
        for name in ("good", "naive", "offtopic")
    }
    summaries = [t for group in groups.values() for t in group]
    article_toks = token_texts(article)
    summary_toks = [token_texts(t) for t in summaries]

    metrics = {
        "lids": lambda: [macs(article, t).score for t in summaries],
        "rouge1": lambda: [rouge1(article_toks, toks).f1 for toks in summary_toks],
        "rougeL": lambda: [rougeL(article_toks, toks).f1 for toks in summary_toks],
        "bleu": lambda: [bleu(article_toks, toks) for toks in summary_toks],
        "bertscore": lambda: [bertscore(article, t).f1 for t in summaries],
    }

    timings: dict[str, float] = {}
    memory: dict[str, float] = {}
    print(f"{'metric':<12} {'seconds':>10} {'peak MB':>10}")
    for name, fn in metrics.items():
        seconds, mb = measure_cost(fn)
        timings[name] = round(seconds, 6)
        memory[name] = round(mb, 3)
        print(f"{name:<12} {seconds:>10.4f} {mb:>10.3f}")

    (out_dir / "costs.json").write_text(
        json.dumps({"timings_s": timings, "memory_mb": memory}, indent=2) + "\n"
    )
    for name, group in groups.items():
        scores = [round(macs(article, t).score, 9) for t in group]
        (out_dir / f"scores_{name}.json").write_text(json.dumps(scores) + "\n")
    print(f"wrote costs and score sets to {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
