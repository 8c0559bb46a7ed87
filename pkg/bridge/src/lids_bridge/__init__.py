"""Raw text to canonical token-embedding files via a pretrained encoder."""

from .bridge import (
    BatchItem,
    BridgeConfig,
    BridgeError,
    EmptyText,
    ModelUnavailable,
    embed_batch,
    embed_text,
    load_stopwords,
)
from .format import TokenInfo, write_embedded_text

__version__ = "0.1.0"
