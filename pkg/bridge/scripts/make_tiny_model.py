#!/usr/bin/env python3
"""Build the tiny deterministic encoder into a directory.

    python scripts/make_tiny_model.py [--out DIR]

Point `lids-embed --model DIR` at the result to run the bridge without
network access or a real pretrained checkpoint.
"""

import argparse

from lids_bridge.testmodel import build_tiny_model


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="tiny_model", help="output directory")
    args = parser.parse_args()
    path = build_tiny_model(args.out)
    print(str(path))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
