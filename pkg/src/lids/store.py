"""Canonical embedding file formats, validation, and row masking.

Binary layout (canonical, little-endian throughout):

    magic     4 bytes   ASCII "LIDS"
    version   u16       currently 1
    reserved  u16       must be 0
    n         u32       token count (>= 1)
    p         u32       embedding dimensionality (>= 1)
    model_id  u16 byte length + UTF-8 bytes
    tokens    n records: u16 byte length + UTF-8 text, u32 word_index,
              u8 flags (bit0 stopword, bit1 punctuation,
              bit2 wordpiece_continuation, bit3 special)
    matrix    n*p float32 values, row-major

A JSON debug form is accepted on input only (auto-detected by a leading
"{" instead of the magic): an object with "model_id", "tokens" (array of
{"text", "word_index", "flags": [names]}) and "matrix" (array of rows).
save_embedded_text always emits the binary form.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllRowsZero,
    BadDimensions,
    BadMagic,
    InvalidTokenRecord,
    MalformedDebugJson,
    NonFiniteEntry,
    TokenCountMismatch,
    TrailingData,
    TruncatedFile,
    UnsupportedVersion,
)

MAGIC = b"LIDS"
VERSION = 1

FLAG_STOPWORD = 1 << 0
FLAG_PUNCTUATION = 1 << 1
FLAG_CONTINUATION = 1 << 2
FLAG_SPECIAL = 1 << 3
_ALL_FLAGS = FLAG_STOPWORD | FLAG_PUNCTUATION | FLAG_CONTINUATION | FLAG_SPECIAL

FLAG_NAMES = {
    "stopword": FLAG_STOPWORD,
    "punctuation": FLAG_PUNCTUATION,
    "wordpiece_continuation": FLAG_CONTINUATION,
    "special": FLAG_SPECIAL,
}


@dataclass(frozen=True)
class TokenRecord:
    text: str
    word_index: int
    stopword: bool = False
    punctuation: bool = False
    continuation: bool = False
    special: bool = False

    @property
    def flags(self) -> int:
        return (
            (FLAG_STOPWORD if self.stopword else 0)
            | (FLAG_PUNCTUATION if self.punctuation else 0)
            | (FLAG_CONTINUATION if self.continuation else 0)
            | (FLAG_SPECIAL if self.special else 0)
        )

    @classmethod
    def from_flags(cls, text: str, word_index: int, flags: int) -> "TokenRecord":
        return cls(
            text=text,
            word_index=word_index,
            stopword=bool(flags & FLAG_STOPWORD),
            punctuation=bool(flags & FLAG_PUNCTUATION),
            continuation=bool(flags & FLAG_CONTINUATION),
            special=bool(flags & FLAG_SPECIAL),
        )

    def flag_names(self) -> list[str]:
        return [name for name, bit in FLAG_NAMES.items() if self.flags & bit]


def _validate_tokens(tokens: tuple[TokenRecord, ...]) -> None:
    prev: TokenRecord | None = None
    for i, tok in enumerate(tokens):
        if tok.word_index < 0:
            raise InvalidTokenRecord(f"record {i}: negative word_index {tok.word_index}")
        if tok.special and (tok.stopword or tok.punctuation):
            raise InvalidTokenRecord(
                f"record {i}: special token must not carry stopword/punctuation flags"
            )
        if prev is not None:
            if tok.word_index < prev.word_index:
                raise InvalidTokenRecord(
                    f"record {i}: word_index decreased ({prev.word_index} -> {tok.word_index})"
                )
            if tok.word_index > prev.word_index + 1:
                raise InvalidTokenRecord(
                    f"record {i}: word_index jumped ({prev.word_index} -> {tok.word_index})"
                )
            if tok.continuation and tok.word_index != prev.word_index:
                raise InvalidTokenRecord(
                    f"record {i}: continuation piece must share word_index with predecessor"
                )
        elif tok.continuation:
            raise InvalidTokenRecord("record 0: continuation piece has no predecessor")
        prev = tok


@dataclass(frozen=True, eq=False)
class EmbeddedText:
    """A text's token table plus its n x p float32 embedding matrix.

    Immutable after construction; the matrix buffer is marked read-only.
    Construction casts to float32 (the canonical on-disk precision) and
    validates every invariant, so downstream code can trust instances.
    """

    model_id: str
    tokens: tuple[TokenRecord, ...] = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        m = np.asarray(self.matrix, dtype=np.float32)
        if m.ndim != 2:
            raise BadDimensions(f"matrix must be 2-D, got shape {m.shape}")
        n, p = m.shape
        if n < 1 or p < 1:
            raise BadDimensions(f"matrix must be at least 1x1, got {n}x{p}")
        if len(self.tokens) != n:
            raise TokenCountMismatch(
                f"{len(self.tokens)} token records vs {n} matrix rows"
            )
        if not np.isfinite(m).all():
            idx = np.argwhere(~np.isfinite(m))[0]
            raise NonFiniteEntry(f"non-finite matrix entry at row {idx[0]}, col {idx[1]}")
        _validate_tokens(self.tokens)
        m = np.ascontiguousarray(m)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddedText):
            return NotImplemented
        return (
            self.model_id == other.model_id
            and self.tokens == other.tokens
            and self.matrix.dtype == other.matrix.dtype
            and np.array_equal(self.matrix, other.matrix)
        )


@dataclass(frozen=True)
class MaskPolicy:
    """Which token classes get their embedding rows zeroed.

    The all-False default keeps every row, including special delimiter
    tokens, for metric computation.
    """

    zero_stopwords: bool = False
    zero_punctuation: bool = False
    zero_special: bool = False

    def matches(self, tok: TokenRecord) -> bool:
        return (
            (self.zero_stopwords and tok.stopword)
            or (self.zero_punctuation and tok.punctuation)
            or (self.zero_special and tok.special)
        )


class _Reader:
    """Cursor over a byte buffer that raises TruncatedFile with offsets."""

    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def take(self, k: int) -> bytes:
        if self.off + k > len(self.data):
            raise TruncatedFile(
                f"need {k} bytes at offset {self.off}, file has {len(self.data)}"
            )
        chunk = self.data[self.off : self.off + k]
        self.off += k
        return chunk

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]


def load_embedded_text(data: bytes) -> EmbeddedText:
    """Parse binary or JSON-debug bytes into a validated EmbeddedText."""
    if data[:4] == MAGIC:
        return _load_binary(data)
    stripped = data.lstrip(b" \t\r\n")
    if stripped[:1] == b"{":
        return _load_json(stripped)
    raise BadMagic(f"bad magic {data[:4]!r} at offset 0, expected {MAGIC!r}")


def _load_binary(data: bytes) -> EmbeddedText:
    r = _Reader(data)
    r.take(4)  # magic, already checked
    version = r.u16()
    if version != VERSION:
        raise UnsupportedVersion(f"version {version} at offset 4, expected {VERSION}")
    r.u16()  # reserved
    n = r.u32()
    p = r.u32()
    if n < 1 or p < 1:
        raise BadDimensions(f"header declares n={n}, p={p}; both must be >= 1")
    mid_len = r.u16()
    try:
        model_id = r.take(mid_len).decode("utf-8")
    except UnicodeDecodeError as e:
        raise InvalidTokenRecord(f"model_id is not valid UTF-8: {e}") from None

    tokens = []
    for i in range(n):
        rec_off = r.off
        t_len = r.u16()
        try:
            text = r.take(t_len).decode("utf-8")
        except UnicodeDecodeError:
            raise InvalidTokenRecord(
                f"record {i}: token text at offset {rec_off} is not valid UTF-8"
            ) from None
        word_index = r.u32()
        flags = r.u8()
        if flags & ~_ALL_FLAGS:
            raise InvalidTokenRecord(f"record {i}: unknown flag bits 0x{flags:02x}")
        tokens.append(TokenRecord.from_flags(text, word_index, flags))

    mat_off = r.off
    raw = r.take(4 * n * p)
    if r.off != len(data):
        raise TrailingData(f"{len(data) - r.off} unexpected bytes after offset {r.off}")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(n, p)
    if not np.isfinite(matrix).all():
        flat = int(np.argwhere(~np.isfinite(matrix.ravel()))[0][0])
        raise NonFiniteEntry(
            f"non-finite float at byte offset {mat_off + 4 * flat} "
            f"(row {flat // p}, col {flat % p})"
        )
    return EmbeddedText(model_id=model_id, tokens=tuple(tokens), matrix=matrix)


def _load_json(data: bytes) -> EmbeddedText:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedDebugJson(f"debug JSON does not parse: {e}") from None
    try:
        model_id = obj["model_id"]
        raw_tokens = obj["tokens"]
        raw_matrix = obj["matrix"]
    except (KeyError, TypeError) as e:
        raise MalformedDebugJson(f"debug JSON missing field: {e}") from None
    if len(raw_tokens) != len(raw_matrix):
        raise TokenCountMismatch(
            f"{len(raw_tokens)} token records vs {len(raw_matrix)} matrix rows"
        )
    if not raw_matrix:
        raise BadDimensions("matrix is empty")
    p = len(raw_matrix[0])
    for i, row in enumerate(raw_matrix):
        if len(row) != p:
            raise TokenCountMismatch(f"matrix row {i} has {len(row)} entries, expected {p}")
    tokens = []
    for i, t in enumerate(raw_tokens):
        try:
            names = t.get("flags", [])
            flags = 0
            for name in names:
                flags |= FLAG_NAMES[name]
            tokens.append(TokenRecord.from_flags(t["text"], int(t["word_index"]), flags))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidTokenRecord(f"record {i}: {e}") from None
    matrix = np.array(raw_matrix, dtype=np.float32)
    return EmbeddedText(model_id=model_id, tokens=tuple(tokens), matrix=matrix)


def save_embedded_text(t: EmbeddedText) -> bytes:
    """Serialize to the canonical binary form; round-trips bit-exactly."""
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HH", VERSION, 0)
    out += struct.pack("<II", t.n, t.p)
    mid = t.model_id.encode("utf-8")
    if len(mid) > 0xFFFF:
        raise InvalidTokenRecord(f"model_id is {len(mid)} bytes, limit 65535")
    out += struct.pack("<H", len(mid)) + mid
    for i, tok in enumerate(t.tokens):
        text = tok.text.encode("utf-8")
        if len(text) > 0xFFFF:
            raise InvalidTokenRecord(f"record {i}: token text is {len(text)} bytes, limit 65535")
        out += struct.pack("<H", len(text)) + text
        out += struct.pack("<IB", tok.word_index, tok.flags)
    out += np.ascontiguousarray(t.matrix, dtype="<f4").tobytes()
    return bytes(out)


def apply_row_mask(t: EmbeddedText, m: MaskPolicy) -> EmbeddedText:
    """Zero the rows of tokens matching the policy; shape and tokens unchanged."""
    masked = np.array(t.matrix, dtype=np.float32, copy=True)
    rows = [i for i, tok in enumerate(t.tokens) if m.matches(tok)]
    if rows:
        masked[rows, :] = 0.0
    if not masked.any():
        raise AllRowsZero(f"masking left no nonzero row among {t.n} rows")
    return EmbeddedText(model_id=t.model_id, tokens=t.tokens, matrix=masked)
