"""Agglomerative topic grouping: h scores, trainers, merge tree, flat views."""
from .agglom import (
    Dendrogram,
    FlatView,
    MemoryBudgetError,
    MergeRecord,
    delta_h_series,
    flat_view,
    train_ehac,
    train_mehac,
)
from .hscore import (
    TopicState,
    delta_h,
    h_merged,
    h_pair,
    h_singleton,
    merge_states,
    singleton_state,
    xlogx,
)

__all__ = [
    "TopicState",
    "xlogx",
    "h_singleton",
    "h_pair",
    "h_merged",
    "delta_h",
    "singleton_state",
    "merge_states",
    "MergeRecord",
    "Dendrogram",
    "FlatView",
    "MemoryBudgetError",
    "train_ehac",
    "train_mehac",
    "flat_view",
    "delta_h_series",
]
