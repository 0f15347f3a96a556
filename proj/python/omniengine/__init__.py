"""Image-text interleaved corpus engine: streaming document format,
filtering, dedup, image fingerprints, quality metrics, and the
stage-ordering cost model."""

from ._core import (  # noqa: F401
    BloomFilter,
    DocumentMeta,
    Element,
    ElementTag,
    ImageRef,
    MinHashSignature,
    PixelImage,
    FilterRule,
    QualityMetrics,
    StreamDocument,
    __version__,
    apply_detailed_rules,
    builtin_english_rules,
    compute_metrics,
    decode_pgm,
    dedup_corpus,
    dhash,
    encode_pgm,
    estimate_jaccard,
    extract_document,
    filter_image,
    hamming_distance,
    load_ruleset,
    minhash_signature,
    optimal_plan,
    parse_document,
    phash,
    plan_table,
    preliminary_filter,
    resize_area_average,
    run_pipeline,
    serialize_document,
    to_image_text_pairs,
    to_text_corpus,
    token_overlap_similarity,
    validate_document,
)
