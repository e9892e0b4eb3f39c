"""Few-shot time-complexity classification for code snippets.

A symbolic static analyzer, label-preserving code augmentation, and a
self-/co-training pseudo-labeling engine around a pluggable classifier.
"""

from .core import (
    ALL_CLASSES,
    CodeSnippet,
    ComplexityClass,
    Dataset,
    LabeledExample,
    Language,
    Metrics,
    compute_metrics,
    dominates,
    few_shot_split,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CLASSES",
    "CodeSnippet",
    "ComplexityClass",
    "Dataset",
    "LabeledExample",
    "Language",
    "Metrics",
    "compute_metrics",
    "dominates",
    "few_shot_split",
]
