"""Datasets."""

from tnprob.data.bars_and_stripes import (
    BinaryImage,
    SequenceDataset,
    bars_and_stripes,
    build_dataset,
    raster_flatten,
    segment,
    split,
    split_indices,
)

__all__ = [
    "BinaryImage",
    "SequenceDataset",
    "bars_and_stripes",
    "build_dataset",
    "raster_flatten",
    "segment",
    "split",
    "split_indices",
]
