"""Bars-and-Stripes images, raster sequences and deterministic splits."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tnprob.errors import EmptyDatasetError, ShapeMismatchError


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """A rows×cols image of 0/1 pixels."""

    pixels: NDArray[np.int8]

    def __post_init__(self) -> None:
        pixels = np.array(self.pixels, dtype=np.int8)
        if pixels.ndim != 2 or min(pixels.shape) < 1:
            raise ShapeMismatchError(f"image must be a non-empty matrix, got shape {pixels.shape}")
        if np.any((pixels != 0) & (pixels != 1)):
            raise ValueError("pixels must be 0 or 1")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def rows(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def cols(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def is_bar(self) -> bool:
        """Every row constant (horizontal bars)."""
        return bool(np.all(self.pixels == self.pixels[:, :1]))

    @property
    def is_stripe(self) -> bool:
        """Every column constant (vertical stripes)."""
        return bool(np.all(self.pixels == self.pixels[:1, :]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryImage) and np.array_equal(self.pixels, other.pixels)

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class SequenceDataset:
    """Equal-length symbol sequences (symbols 1..d_obs) with their provenance."""

    sequences: NDArray[np.int64]
    d_obs: int = 2
    rows: int = 0
    cols: int = 0
    segment_len: int = 0
    dedup: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        sequences = np.array(self.sequences, dtype=np.int64)
        if sequences.ndim != 2:
            raise ShapeMismatchError(f"sequences must form an (M, T) array, got shape {sequences.shape}")
        if sequences.size and (sequences.min() < 1 or sequences.max() > self.d_obs):
            raise ValueError(f"symbols must lie in 1..{self.d_obs}")
        sequences.setflags(write=False)
        object.__setattr__(self, "sequences", sequences)

    @property
    def size(self) -> int:
        return int(self.sequences.shape[0])

    @property
    def t_len(self) -> int:
        return int(self.sequences.shape[1])

    def as_indices(self) -> NDArray[np.int64]:
        """Zero-based symbols, the form the likelihood engine consumes."""
        return self.sequences - 1

    def subset(self, indices: ArrayLike) -> SequenceDataset:
        return SequenceDataset(
            self.sequences[np.asarray(indices, dtype=np.int64)],
            self.d_obs,
            self.rows,
            self.cols,
            self.segment_len,
            self.dedup,
            self.seed,
        )


def bars_and_stripes(rows: int, cols: int, dedup: bool = True) -> list[BinaryImage]:
    """
    All 2^rows bar images, then all 2^cols stripe images.

    Bit r of the bar index sets row r; bit c of the stripe index sets column c. With dedup
    the two constant stripe images, already present as bars, are dropped.
    """
    if rows < 1 or cols < 1:
        raise ShapeMismatchError(f"rows and cols must be >= 1, got {rows}x{cols}")
    images = []
    for mask in range(2**rows):
        bits = (mask >> np.arange(rows)) & 1
        images.append(BinaryImage(np.repeat(bits[:, None], cols, axis=1)))
    for mask in range(2**cols):
        if dedup and mask in (0, 2**cols - 1):
            continue
        bits = (mask >> np.arange(cols)) & 1
        images.append(BinaryImage(np.repeat(bits[None, :], rows, axis=0)))
    return images


def raster_flatten(img: BinaryImage) -> tuple[int, ...]:
    """Row-major scan from the upper left, symbols pixel + 1."""
    return tuple(int(p) + 1 for p in img.pixels.reshape(-1))


def segment(sequence: Sequence[int], segment_len: int | None) -> list[tuple[int, ...]]:
    """Cut a sequence into consecutive pieces of `segment_len` (whole if None or longer)."""
    sequence = tuple(sequence)
    if not segment_len or segment_len >= len(sequence):
        return [sequence]
    if len(sequence) % segment_len:
        raise ShapeMismatchError(f"segment length {segment_len} does not divide sequence length {len(sequence)}")
    return [sequence[i : i + segment_len] for i in range(0, len(sequence), segment_len)]


def build_dataset(
    rows: int, cols: int, segment_len: int | None = 16, dedup: bool = True, seed: int = 0
) -> SequenceDataset:
    """Flatten every Bars-and-Stripes image and segment the rasters."""
    sequences = [
        piece
        for img in bars_and_stripes(rows, cols, dedup)
        for piece in segment(raster_flatten(img), segment_len)
    ]
    effective = len(sequences[0])
    return SequenceDataset(np.asarray(sequences), 2, rows, cols, effective, dedup, seed)


def split_indices(size: int, fraction: float = 0.7, seed: int = 0) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Permute 0..size-1 by seed; the first ceil(fraction * size) go to train."""
    if size < 1:
        raise EmptyDatasetError("cannot split an empty dataset")
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"split fraction must lie strictly between 0 and 1, got {fraction}")
    permutation = np.random.default_rng(seed).permutation(size)
    cut = math.ceil(round(fraction * size, 9))
    return permutation[:cut], permutation[cut:]


def split(ds: SequenceDataset, fraction: float = 0.7, seed: int = 0) -> tuple[SequenceDataset, SequenceDataset]:
    """Deterministic train/test partition of a dataset."""
    train_idx, test_idx = split_indices(ds.size, fraction, seed)
    return ds.subset(train_idx), ds.subset(test_idx)
