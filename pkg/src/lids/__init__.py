"""Layered singular-direction similarity scoring and keyword inference.

Pipeline: embedding files (see `store`) are decomposed into SVD layers
(`svd`), compared through the max-absolute-cosine direction metric
(`metric`), and interpreted through per-layer keyword selection with FDR
control (`inference`). Benchmarks live in `baselines` and `refmetrics`;
evaluation statistics in `report`; the CLI in `cli`.
"""

from . import errors
from .baselines import WordSample, load_topic_corpus, naive_summary, split_words
from .inference import (
    LayerKeywordSet,
    LayerStats,
    bh_select,
    emit_cloud,
    estimate_noise_sigma,
    keyword_clouds,
    layer_zstats,
    recombine_words,
)
from .metric import (
    BatchFailure,
    CosineSimilarity,
    SimilarityResult,
    cosine_similarity,
    macs,
    score_batch,
)
from .refmetrics import PrfScore, bertscore, bleu, idf_weights_from_texts, rouge1, rougeL
from .report import (
    CorrelationEstimate,
    EvaluationReport,
    ScoreDistribution,
    build_report,
    distance_correlation,
    kendall_tau,
    measure_cost,
    pearson,
    rescale_unit_interval,
    sharpe_ratio,
)
from .store import (
    EmbeddedText,
    MaskPolicy,
    TokenRecord,
    apply_row_mask,
    load_embedded_text,
    save_embedded_text,
)
from .svd import DirectionVector, SvdStack, compute_svd, direction_profile, direction_vector, layer_sign

__version__ = "0.1.0"
