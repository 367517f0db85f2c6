"""EASE, popularity ranking and ablation configurations."""
from .ablation import (
    FLAGS,
    FULL,
    MULT_VAE,
    TABLE_ROWS,
    AblationConfig,
    configure_ablation,
    format_table,
    parse_table,
)
from .ease import MAX_DENSE_ITEMS, EaseModel, ease_fit
from .popularity import Popularity

__all__ = [
    "FLAGS", "FULL", "MULT_VAE", "TABLE_ROWS", "AblationConfig", "configure_ablation",
    "format_table", "parse_table", "MAX_DENSE_ITEMS", "EaseModel", "ease_fit", "Popularity",
]
