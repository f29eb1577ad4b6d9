"""Training-free triplet tuning for sketch-conditioned cross-attention.

Deterministic desk-scale implementation of prompt balance, characteristics
prominence and dense tuning, plus the scene pipeline and its diagnostics.
"""

from ._t3s2s import (
    EmbeddingMatrix,
    EmbeddingProvider,
    KeywordIndices,
    SceneSpec,
    SketchLabelMap,
    T3Error,
    TokenSequence,
    amplify_value_topk,
    attend,
    attention_logits,
    build_pyramid,
    characteristics_mask,
    cosine_profile,
    dense_tune,
    downsample_any,
    embed,
    embed_word,
    energy_profile,
    extract_keywords,
    instance_mask,
    load_label_map,
    load_scene,
    probe_scene,
    prominence,
    prompt_balance,
    run_scene,
    schedule_tau,
    softmax_rows,
    synth_query_features,
    tokenize,
    topk_value_indices,
)

__all__ = [
    "EmbeddingMatrix",
    "EmbeddingProvider",
    "KeywordIndices",
    "SceneSpec",
    "SketchLabelMap",
    "T3Error",
    "TokenSequence",
    "amplify_value_topk",
    "attend",
    "attention_logits",
    "build_pyramid",
    "characteristics_mask",
    "cosine_profile",
    "dense_tune",
    "downsample_any",
    "embed",
    "embed_word",
    "energy_profile",
    "extract_keywords",
    "instance_mask",
    "load_label_map",
    "load_scene",
    "probe_scene",
    "prominence",
    "prompt_balance",
    "run_scene",
    "schedule_tau",
    "softmax_rows",
    "synth_query_features",
    "tokenize",
    "topk_value_indices",
]
