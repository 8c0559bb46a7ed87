"""Command-line surface: score, baseline, keywords, report.

Exit codes: 0 success, 1 internal error, 2 load/parse failure, 3 keyword
run in which no layer selected anything. All emitted JSON rounds floats
to 9 significant digits so identical inputs and configuration reproduce
byte-identical outputs.

Configuration precedence is flags > config file > defaults. The config
file (./lids.toml by default, overridable via the LIDS_CONFIG env var)
is plain `key = value` text: full-line # comments, booleans true/false,
numbers parsed as int then float, everything else kept as a string.
Recognized keys: alpha, q, seed, mask_stopwords, mask_punctuation,
mask_special, out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .baselines import naive_summary, split_words
from .errors import LidsError
from .inference import emit_cloud, estimate_noise_sigma, keyword_clouds
from .metric import BatchFailure, macs, score_batch
from .report import DCOR_BOOTSTRAP_SEED, build_report
from .store import EmbeddedText, MaskPolicy, load_embedded_text

DEFAULT_CONFIG_NAME = "lids.toml"
CONFIG_ENV_VAR = "LIDS_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1.0
    fdr_q: float = 0.005
    mask: MaskPolicy = MaskPolicy()
    seed: int = 0
    output_dir: Path = Path(".")

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.fdr_q < 1:
            raise ValueError(f"q must be in (0, 1), got {self.fdr_q}")


def fmt9(x: float) -> float:
    return float(f"{x:.9g}")


def parse_config_file(path: Path) -> dict:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LidsError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip().strip('"')
        if val.lower() in ("true", "false"):
            values[key] = val.lower() == "true"
            continue
        for cast in (int, float):
            try:
                values[key] = cast(val)
                break
            except ValueError:
                continue
        else:
            values[key] = val
    return values


def _load_config_values(explicit_path: str | None) -> dict:
    path = explicit_path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        p = Path(path)
        if not p.is_file():
            raise LidsError(f"config file not found: {p}")
        return parse_config_file(p)
    p = Path(DEFAULT_CONFIG_NAME)
    if p.is_file():
        return parse_config_file(p)
    return {}


def _resolve(flag_value, cfg: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cfg[key]
    return default


def build_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = _load_config_values(getattr(args, "config", None))
    mask = MaskPolicy(
        zero_stopwords=bool(_resolve(getattr(args, "mask_stopwords", None), cfg, "mask_stopwords", False)),
        zero_punctuation=bool(cfg.get("mask_punctuation", False)),
        zero_special=bool(cfg.get("mask_special", False)),
    )
    return RunConfig(
        alpha=float(_resolve(getattr(args, "alpha", None), cfg, "alpha", 1.0)),
        fdr_q=float(_resolve(getattr(args, "q", None), cfg, "q", 0.005)),
        mask=mask,
        seed=int(_resolve(getattr(args, "seed", None), cfg, "seed", 0)),
        output_dir=Path(_resolve(getattr(args, "out", None), cfg, "out", ".")),
    )


def _load_texts(paths: list[str]) -> tuple[dict[str, EmbeddedText], list[str]]:
    loaded: dict[str, EmbeddedText] = {}
    failures: list[str] = []
    for p in paths:
        try:
            loaded[p] = load_embedded_text(Path(p).read_bytes())
        except (OSError, LidsError) as e:
            failures.append(f"{p}: {type(e).__name__}: {e}")
    return loaded, failures


def _out_dir(config: RunConfig) -> Path:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config.output_dir


def cmd_score(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    loaded, failures = _load_texts([args.reference, *args.summaries])
    if failures:
        for f in failures:
            print(f"load failure: {f}", file=sys.stderr)
        return 2
    reference = loaded[args.reference]
    tests = [loaded[p] for p in args.summaries]
    results = score_batch(reference, tests, alpha=config.alpha, mask=config.mask)
    had_error = False
    for path, res in zip(args.summaries, results):
        if isinstance(res, BatchFailure):
            had_error = True
            print(f"scoring failure: {path}: {res.error}", file=sys.stderr)
            continue
        print(json.dumps({"path": path, "score": fmt9(res.score), "k_hat": res.k_hat}))
        if args.emit_embeddings:
            out = _out_dir(config) / (Path(path).stem + ".embedding.json")
            payload = {
                "path": path,
                "k_hat": res.k_hat,
                "alpha": fmt9(config.alpha),
                "embedding": [fmt9(v) for v in res.embedding],
            }
            out.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return 1 if had_error else 0


def cmd_baseline(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    if args.mode != "naive":
        print(f"unknown baseline mode: {args.mode}", file=sys.stderr)
        return 2
    try:
        text = Path(args.reference).read_text(encoding="utf-8")
    except OSError as e:
        print(f"load failure: {args.reference}: {e}", file=sys.stderr)
        return 2
    words = split_words(text)
    if not words and args.count > 0:
        print(f"load failure: {args.reference}: no words", file=sys.stderr)
        return 2
    out_dir = _out_dir(config)
    for i in range(1, args.count + 1):
        seed = config.seed + i
        sample = naive_summary(words, args.target_len, seed)
        path = out_dir / f"naive_{i}.txt"
        path.write_text(" ".join(sample.words), encoding="utf-8")
        print(json.dumps({"path": str(path), "seed": seed}))
    return 0


def cmd_keywords(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    loaded, failures = _load_texts([args.summary])
    if failures:
        for f in failures:
            print(f"load failure: {f}", file=sys.stderr)
        return 2
    summary = loaded[args.summary]

    if args.layers is not None:
        layers = args.layers
    elif args.reference is not None:
        ref_loaded, ref_failures = _load_texts([args.reference])
        if ref_failures:
            for f in ref_failures:
                print(f"load failure: {f}", file=sys.stderr)
            return 2
        try:
            layers = macs(
                ref_loaded[args.reference], summary, alpha=config.alpha, mask=config.mask
            ).k_hat
        except LidsError as e:
            print(f"{type(e).__name__}: {e}", file=sys.stderr)
            return 2
        layers = min(layers, min(summary.n, summary.p) - 1)
        if layers < 1:
            print("RankTooLarge: text too small for noise estimation", file=sys.stderr)
            return 2
    else:
        print("need --reference or --layers to fix the layer count", file=sys.stderr)
        return 2

    rank = args.noise_rank if args.noise_rank is not None else layers
    try:
        sets = keyword_clouds(summary, layers, q=config.fdr_q, rank_for_noise=rank)
        sigma = estimate_noise_sigma(summary.matrix, rank)
    except LidsError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2

    out_dir = _out_dir(config)
    stem = Path(args.summary).stem
    json_path = out_dir / f"{stem}_clouds.json"
    json_path.write_bytes(emit_cloud(sets, format="json", sigma_hat=sigma))
    print(str(json_path))
    if args.format == "svg":
        svg_path = out_dir / f"{stem}_clouds.svg"
        svg_path.write_bytes(emit_cloud(sets, format="svg", sigma_hat=sigma))
        print(str(svg_path))
    if all(not any(e.selected for e in s.entries) for s in sets):
        return 3
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    labelled = []
    for spec_arg in args.scores:
        if "=" not in spec_arg:
            print(f"expected LABEL=FILE, got {spec_arg!r}", file=sys.stderr)
            return 2
        label, _, path = spec_arg.partition("=")
        try:
            scores = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            print(f"parse failure: {path}: {e}", file=sys.stderr)
            return 2
        if not isinstance(scores, list) or not scores:
            print(f"parse failure: {path}: expected a non-empty JSON list", file=sys.stderr)
            return 2
        labelled.append((label, [float(s) for s in scores]))

    human = None
    if args.human:
        try:
            human = json.loads(Path(args.human).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            print(f"parse failure: {args.human}: {e}", file=sys.stderr)
            return 2

    timings_s = memory_mb = None
    if args.timings:
        try:
            cost = json.loads(Path(args.timings).read_text(encoding="utf-8"))
            timings_s = cost.get("timings_s")
            memory_mb = cost.get("memory_mb")
        except (OSError, json.JSONDecodeError) as e:
            print(f"parse failure: {args.timings}: {e}", file=sys.stderr)
            return 2

    try:
        report = build_report(
            labelled,
            human_scores=human,
            correlate_label=args.correlate,
            metric_label=args.metric_label,
            timings_s=timings_s,
            memory_mb=memory_mb,
            meta={"dcor_bootstrap_seed": DCOR_BOOTSTRAP_SEED, "seed": config.seed},
        )
    except LidsError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2

    print(report.render_table())
    out_path = _out_dir(config) / "report.json"
    out_path.write_text(
        json.dumps(_round_floats(report.to_json_dict()), indent=2) + "\n",
        encoding="utf-8",
    )
    print(str(out_path))
    return 0


def _round_floats(obj):
    if isinstance(obj, float):
        return fmt9(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def _add_common(sub: argparse.ArgumentParser, *, mask: bool = True) -> None:
    sub.add_argument("--alpha", type=float, default=None, help="singular value weight exponent")
    sub.add_argument("--q", type=float, default=None, help="FDR level")
    sub.add_argument("--seed", type=int, default=None, help="base RNG seed")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--config", default=None, help="config file path")
    if mask:
        sub.add_argument(
            "--mask-stopwords",
            action=argparse.BooleanOptionalAction,
            default=None,
            help="zero stopword rows before decomposition",
        )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lids")
    subs = parser.add_subparsers(dest="command", required=True)

    p_score = subs.add_parser("score", help="score summaries against a reference")
    p_score.add_argument("--reference", required=True, help="reference embedding file")
    p_score.add_argument("summaries", nargs="+", help="summary embedding files")
    p_score.add_argument("--emit-embeddings", action="store_true")
    _add_common(p_score)
    p_score.set_defaults(func=cmd_score)

    p_base = subs.add_parser("baseline", help="generate benchmark summaries")
    p_base.add_argument("--reference", required=True, help="plain-text reference")
    p_base.add_argument("--mode", default="naive", choices=["naive"])
    p_base.add_argument("--count", type=int, required=True)
    p_base.add_argument("--target-len", type=int, required=True)
    _add_common(p_base, mask=False)
    p_base.set_defaults(func=cmd_baseline)

    p_kw = subs.add_parser("keywords", help="select and emit per-layer keywords")
    p_kw.add_argument("summary", help="summary embedding file")
    p_kw.add_argument("--reference", default=None, help="reference for choosing k")
    p_kw.add_argument("--layers", type=int, default=None, help="explicit layer count")
    p_kw.add_argument("--noise-rank", type=int, default=None, help="rank for noise estimation")
    p_kw.add_argument("--format", default="json", choices=["json", "svg"])
    _add_common(p_kw)
    p_kw.set_defaults(func=cmd_keywords)

    p_rep = subs.add_parser("report", help="assemble an evaluation report")
    p_rep.add_argument("scores", nargs="+", metavar="LABEL=FILE")
    p_rep.add_argument("--human", default=None, help="JSON list of human scores")
    p_rep.add_argument("--correlate", default=None, help="label to pair with human scores")
    p_rep.add_argument("--metric-label", default="similarity")
    p_rep.add_argument("--timings", default=None, help="JSON cost file")
    _add_common(p_rep, mask=False)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except LidsError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # internal error contract
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
