"""Writer for the canonical embedding file format.

The format is the interface between this bridge and the scoring
toolkit (magic "LIDS", version 1, little-endian; see the toolkit README
for the full layout). Only writing lives here; the toolkit owns
loading and validation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"LIDS"
VERSION = 1

FLAG_STOPWORD = 1 << 0
FLAG_PUNCTUATION = 1 << 1
FLAG_CONTINUATION = 1 << 2
FLAG_SPECIAL = 1 << 3


@dataclass(frozen=True)
class TokenInfo:
    text: str
    word_index: int
    flags: int


def write_embedded_text(model_id: str, tokens: list[TokenInfo], matrix: np.ndarray) -> bytes:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    n, p = matrix.shape
    if n != len(tokens):
        raise ValueError(f"{len(tokens)} tokens vs {n} matrix rows")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HH", VERSION, 0)
    out += struct.pack("<II", n, p)
    mid = model_id.encode("utf-8")
    out += struct.pack("<H", len(mid)) + mid
    for tok in tokens:
        text = tok.text.encode("utf-8")
        out += struct.pack("<H", len(text)) + text
        out += struct.pack("<IB", tok.word_index, tok.flags)
    out += matrix.tobytes()
    return bytes(out)
