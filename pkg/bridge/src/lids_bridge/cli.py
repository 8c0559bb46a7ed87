"""Embedding CLI: one file or a manifest of files to .lids outputs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bridge import BatchItem, BridgeConfig, BridgeError, embed_batch, embed_text


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lids-embed", description=__doc__)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="in_file", help="one UTF-8 text file")
    source.add_argument("--manifest", help="file listing text paths, one per line")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--model", default=BridgeConfig.model_id, help="model id or local path")
    parser.add_argument("--layer", default="final", help="'final' or a hidden layer index")
    parser.add_argument("--max-seq", type=int, default=512)
    parser.add_argument("--stopwords", default=None, help="stopword list path")
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    layer = args.layer if args.layer == "final" else int(args.layer)
    config = BridgeConfig(
        model_id=args.model,
        max_sequence=args.max_seq,
        stopword_list=Path(args.stopwords) if args.stopwords else None,
        device=args.device,
        hidden_layer=layer,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.in_file:
        src = Path(args.in_file)
        try:
            blob = embed_text(src.read_text(encoding="utf-8"), config)
        except (OSError, BridgeError) as e:
            print(f"{type(e).__name__}: {e}", file=sys.stderr)
            return 1
        dest = out_dir / (src.stem + ".lids")
        dest.write_bytes(blob)
        print(str(dest))
        return 0

    results: list[BatchItem] = embed_batch(Path(args.manifest), config, out_dir)
    failed = 0
    for item in results:
        if item.error:
            failed += 1
            print(f"failed: {item.source}: {item.error}", file=sys.stderr)
        else:
            print(str(item.output))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
