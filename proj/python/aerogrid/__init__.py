"""Constrained air-purification booth placement pipeline."""

from ._core import (
    booth_effect,
    compare,
    config_hash,
    default_config,
    evaluate,
    haversine_km,
    ingest,
    place,
    spatial_entropy,
    synth,
    train,
)

__all__ = [
    "booth_effect",
    "compare",
    "config_hash",
    "default_config",
    "evaluate",
    "haversine_km",
    "ingest",
    "place",
    "spatial_entropy",
    "synth",
    "train",
]
