"""Contextual token embeddings from a pretrained bidirectional encoder.

embed_text runs wordpiece tokenization and the encoder's hidden states
over a text and emits canonical embedding-file bytes. Texts longer than
the sequence limit are windowed with stride max_sequence/2 and the
embeddings of overlapping positions averaged; the leading and trailing
delimiter tokens come from the first and last window. The default model
id needs either a local directory or a populated download cache; with
neither, loading raises ModelUnavailable.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .format import (
    FLAG_CONTINUATION,
    FLAG_PUNCTUATION,
    FLAG_SPECIAL,
    FLAG_STOPWORD,
    TokenInfo,
    write_embedded_text,
)

DEFAULT_MODEL = "bert-base-uncased"


class BridgeError(Exception):
    pass


class EmptyText(BridgeError):
    pass


class ModelUnavailable(BridgeError):
    pass


@dataclass(frozen=True)
class BridgeConfig:
    model_id: str = DEFAULT_MODEL
    max_sequence: int = 512
    stopword_list: Path | None = None  # None = packaged English list
    device: str = "cpu"
    hidden_layer: int | str = "final"

    def __post_init__(self):
        if self.max_sequence < 3:
            raise ValueError("max_sequence must fit a token between the delimiters")


def load_stopwords(path: Path | None = None) -> frozenset[str]:
    if path is None:
        text = (resources.files("lids_bridge") / "data" / "stopwords_en.txt").read_text(
            encoding="utf-8"
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


_ENCODER_CACHE: dict[tuple[str, str], tuple] = {}


def load_encoder(config: BridgeConfig):
    """Tokenizer and model for the configured id, cached per process."""
    key = (config.model_id, config.device)
    if key in _ENCODER_CACHE:
        return _ENCODER_CACHE[key]
    try:
        import torch
        from transformers import AutoModel, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(config.model_id)
        model = AutoModel.from_pretrained(config.model_id)
    except Exception as e:
        raise ModelUnavailable(f"cannot load {config.model_id!r}: {e}") from None
    model.eval()
    model.to(config.device)
    torch.set_grad_enabled(False)
    _ENCODER_CACHE[key] = (tokenizer, model)
    return tokenizer, model


def _is_punctuation(piece: str) -> bool:
    stripped = piece[2:] if piece.startswith("##") else piece
    return bool(stripped) and all(
        unicodedata.category(ch).startswith("P") for ch in stripped
    )


def _pick_layer(hidden_states, choice) -> int:
    n_layers = len(hidden_states) - 1  # index 0 is the embedding layer
    if choice == "final":
        return n_layers
    idx = int(choice)
    if not 0 <= idx <= n_layers:
        raise ValueError(f"hidden layer {idx} out of 0..{n_layers}")
    return idx


def _window_starts(n_content: int, width: int, stride: int) -> list[int]:
    starts = [0]
    while starts[-1] + width < n_content:
        starts.append(starts[-1] + stride)
    return starts


def embed_text(raw: str, config: BridgeConfig = BridgeConfig()) -> bytes:
    """Embed one text and return canonical embedding-file bytes."""
    import torch

    text = " ".join(raw.split())
    if not text:
        raise EmptyText("text is empty after whitespace normalization")
    tokenizer, model = load_encoder(config)
    stopwords = load_stopwords(config.stopword_list)

    enc = tokenizer(text, add_special_tokens=False)
    ids = list(enc["input_ids"])
    word_ids = enc.word_ids()
    pieces = tokenizer.convert_ids_to_tokens(ids)
    if not ids:
        raise EmptyText("text produced no tokens")

    model_max = getattr(model.config, "max_position_embeddings", config.max_sequence)
    max_seq = min(config.max_sequence, model_max)
    width = max_seq - 2
    stride = max(1, min(max_seq // 2, width))
    layer = None

    n = len(ids)
    dim = model.config.hidden_size
    sums = np.zeros((n, dim), dtype=np.float64)
    counts = np.zeros(n, dtype=np.int64)
    cls_vec = sep_vec = None
    for start in _window_starts(n, width, stride):
        chunk = ids[start : start + width]
        input_ids = torch.tensor(
            [[tokenizer.cls_token_id, *chunk, tokenizer.sep_token_id]],
            device=config.device,
        )
        attention = torch.ones_like(input_ids)
        with torch.inference_mode():
            out = model(
                input_ids=input_ids,
                attention_mask=attention,
                output_hidden_states=True,
            )
        if layer is None:
            layer = _pick_layer(out.hidden_states, config.hidden_layer)
        hidden = out.hidden_states[layer][0].detach().cpu().numpy().astype(np.float64)
        sums[start : start + len(chunk)] += hidden[1 : len(chunk) + 1]
        counts[start : start + len(chunk)] += 1
        if cls_vec is None:
            cls_vec = hidden[0]
        sep_vec = hidden[len(chunk) + 1]

    rows = np.empty((n + 2, dim), dtype=np.float64)
    rows[0] = cls_vec
    rows[1:-1] = sums / counts[:, None]
    rows[-1] = sep_vec

    # word_index 0 is the leading delimiter; words count from 1
    words: dict[int, list[int]] = {}
    for i, w in enumerate(word_ids):
        words.setdefault(w, []).append(i)
    word_text = {
        w: "".join(
            pieces[i][2:] if pieces[i].startswith("##") else pieces[i] for i in idx
        ).lower()
        for w, idx in words.items()
    }

    tokens = [TokenInfo(tokenizer.cls_token, 0, FLAG_SPECIAL)]
    for i, piece in enumerate(pieces):
        flags = 0
        if i > 0 and word_ids[i] == word_ids[i - 1]:
            flags |= FLAG_CONTINUATION
        if _is_punctuation(piece):
            flags |= FLAG_PUNCTUATION
        if word_text[word_ids[i]] in stopwords:
            flags |= FLAG_STOPWORD
        tokens.append(TokenInfo(piece, word_ids[i] + 1, flags))
    tokens.append(TokenInfo(tokenizer.sep_token, word_ids[-1] + 1, FLAG_SPECIAL))

    return write_embedded_text(config.model_id, tokens, rows.astype(np.float32))


@dataclass(frozen=True)
class BatchItem:
    source: Path
    output: Path | None
    error: str | None


def embed_batch(manifest: Path, config: BridgeConfig, out_dir: Path) -> list[BatchItem]:
    """Embed every text listed in the manifest; failures are recorded,
    not raised, so one bad input does not stop the batch."""
    manifest = Path(manifest)
    base = manifest.parent
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for line in manifest.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        src = base / line
        try:
            blob = embed_text(src.read_text(encoding="utf-8"), config)
        except (OSError, BridgeError) as e:
            results.append(BatchItem(src, None, f"{type(e).__name__}: {e}"))
            continue
        dest = out_dir / (src.stem + ".lids")
        dest.write_bytes(blob)
        results.append(BatchItem(src, dest, None))
    return results
