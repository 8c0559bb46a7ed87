"""Build a tiny deterministic encoder for offline use.

The bridge's own tests (and anyone without network access to a real
pretrained checkpoint) need a loadable model directory. This builds a
two-layer 32-dim encoder with a small WordPiece vocabulary, seeded so
the weights are identical on every machine.
"""

from __future__ import annotations

from pathlib import Path

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]

WORDS = [
    "the", "a", "an", "of", "and", "to", "in", "is", "was", "on", "for",
    "it", "with", "at", "by", "from", "this", "that", "as", "are",
    "cat", "dog", "house", "home", "mold", "family", "lawsuit", "court",
    "judge", "trial", "owner", "market", "water", "rover", "mars",
    "landing", "crater", "sample", "mission", "orbit", "data", "science",
    "team", "year", "story", "music", "garden", "river", "stone",
    "light", "wind", "paper", "glass", "road", "tree", "bird", "rain",
    "cloud", "fire", "earth", "night", "day", "man", "woman", "child",
    "city", "field", "door", "wall", "book", "word", "voice", "hand",
    "mort", "son",
]

PIECES = ["##gage", "##s", "##ing", "##ed", "##er", "##ly"]

PUNCT = [".", ",", "!", "?", ";", ":", "'", '"', "(", ")", "-"]

LETTERS = [c for c in "abcdefghijklmnopqrstuvwxyz"]
LETTER_PIECES = [f"##{c}" for c in "abcdefghijklmnopqrstuvwxyz"]

HIDDEN_SIZE = 32
SEED = 20240117


def build_vocab() -> list[str]:
    seen: dict[str, None] = {}
    for token in SPECIALS + WORDS + PIECES + PUNCT + LETTERS + LETTER_PIECES:
        seen.setdefault(token)
    return list(seen)


def build_tiny_model(out_dir: Path) -> Path:
    """Write a loadable model directory and return its path."""
    import torch
    from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocab = build_vocab()
    tk = Tokenizer(models.WordPiece({w: i for i, w in enumerate(vocab)}, unk_token="[UNK]"))
    tk.normalizer = normalizers.BertNormalizer(lowercase=True)
    tk.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    cls_id = vocab.index("[CLS]")
    sep_id = vocab.index("[SEP]")
    tk.post_processor = processors.TemplateProcessing(
        single="[CLS]:0 $A:0 [SEP]:0",
        pair="[CLS]:0 $A:0 [SEP]:0 $B:1 [SEP]:1",
        special_tokens=[("[CLS]", cls_id), ("[SEP]", sep_id)],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )

    torch.manual_seed(SEED)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=HIDDEN_SIZE,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    model = BertModel(config)
    model.eval()
    tokenizer.save_pretrained(str(out_dir))
    model.save_pretrained(str(out_dir))
    return out_dir
