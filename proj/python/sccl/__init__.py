"""Python bindings for the sccl sentiment classifier."""

from ._core import (
    NUM_CLASSES,
    ConfigError,
    Corpus,
    CorpusStats,
    DataError,
    DivergenceError,
    Lexicon,
    Model,
    ModelConfig,
    ShapeError,
    ablation_variants,
    bigru,
    dynamic_routing,
    emotion_name,
    expand_lexicon,
    gradcheck,
    metrics,
    run_cli,
    squash,
)

__all__ = [
    "NUM_CLASSES",
    "ConfigError",
    "Corpus",
    "CorpusStats",
    "DataError",
    "DivergenceError",
    "Lexicon",
    "Model",
    "ModelConfig",
    "ShapeError",
    "ablation_variants",
    "bigru",
    "dynamic_routing",
    "emotion_name",
    "expand_lexicon",
    "gradcheck",
    "metrics",
    "run_cli",
    "squash",
]
