"""Rating ingestion, preprocessing, user splits and dataset bundles."""
from .bundle import read_bundle, read_manifest, write_bundle, write_manifest
from .interactions import InteractionMatrix, RawInteractions, csr_rows, load_ratings, preprocess
from .split import DatasetSplit, HeldOutUsers, fold_in_split, split_users
from .synthetic import planted_factor_data, write_ratings_csv

__all__ = [
    "read_bundle", "read_manifest", "write_bundle", "write_manifest", "InteractionMatrix",
    "RawInteractions", "csr_rows", "load_ratings", "preprocess", "DatasetSplit",
    "HeldOutUsers", "fold_in_split", "split_users", "planted_factor_data", "write_ratings_csv",
]
