"""Dense complex tensors and the primitive operations of the tensor-network calculus.

Modes and outcomes are zero-based throughout the library. A tensor of order n holds
complex128 elements in a contiguous row-major buffer; the 0-tensor holds one scalar.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tnprob.config import settings
from tnprob.errors import (
    ContractionBudgetError,
    DimensionMismatchError,
    DuplicateModeError,
    ModeIndexError,
    ShapeMismatchError,
    UnknownEdgeError,
)

ComplexArray = NDArray[np.complex128]
ModeRef = tuple[int, int]


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Immutable n-mode array of complex scalars."""

    data: ComplexArray

    def __post_init__(self) -> None:
        source = self.data.data if isinstance(self.data, DenseTensor) else self.data
        array = np.array(source, dtype=np.complex128, copy=True)
        if any(dim < 1 for dim in array.shape):
            raise ShapeMismatchError(f"mode dimensions must be positive, got {array.shape}")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def numpy(self) -> ComplexArray:
        """Read-only view of the element buffer."""
        return self.data

    def item(self) -> complex:
        """The single element of a 0-tensor (or any one-element tensor)."""
        return complex(self.data.reshape(-1)[0])

    def allclose(self, other: DenseTensor | ArrayLike, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        other_data = as_tensor(other).data
        return self.shape == other_data.shape and bool(np.allclose(self.data, other_data, rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self.shape})"


def as_tensor(value: DenseTensor | ArrayLike) -> DenseTensor:
    """Wrap array-like input as a DenseTensor (no copy if already one)."""
    if isinstance(value, DenseTensor):
        return value
    return DenseTensor(np.asarray(value))


# =============================================================================
# Primitive operations
# =============================================================================


def contract(a: DenseTensor | ArrayLike, k: int, b: DenseTensor | ArrayLike, k2: int) -> DenseTensor:
    """
    Contract mode k of a with mode k2 of b.

    The result holds a's modes without k followed by b's modes without k2.
    """
    a, b = as_tensor(a), as_tensor(b)
    if not 0 <= k < a.order:
        raise ModeIndexError(f"mode {k} out of range for tensor of order {a.order}")
    if not 0 <= k2 < b.order:
        raise ModeIndexError(f"mode {k2} out of range for tensor of order {b.order}")
    if a.shape[k] != b.shape[k2]:
        raise DimensionMismatchError(
            f"cannot contract mode {k} (dim {a.shape[k]}) with mode {k2} (dim {b.shape[k2]})"
        )
    return DenseTensor(np.tensordot(a.data, b.data, axes=([k], [k2])))


def contract_many(
    tensors: Sequence[DenseTensor | ArrayLike],
    pairings: Iterable[tuple[ModeRef, ModeRef]],
    *,
    budget: int | None = None,
) -> DenseTensor:
    """
    Perform every pairing among the given tensors and return the unique result.

    Each pairing is ((tensor index, mode), (tensor index, mode)). Unpaired modes form the
    output, ordered by (tensor index, mode index). Disconnected pieces combine by tensor
    product. The result does not depend on the order pairings are listed in.
    """
    arrays = [as_tensor(t).data for t in tensors]
    labels = [[f"{i}:{k}" for k in range(arr.ndim)] for i, arr in enumerate(arrays)]
    paired: set[ModeRef] = set()

    for left, right in pairings:
        for t, m in (left, right):
            if not 0 <= t < len(arrays):
                raise ModeIndexError(f"tensor index {t} out of range ({len(arrays)} tensors)")
            if not 0 <= m < arrays[t].ndim:
                raise ModeIndexError(f"mode {m} out of range for tensor {t} of order {arrays[t].ndim}")
            if (t, m) in paired:
                raise DuplicateModeError(f"mode {m} of tensor {t} appears in more than one pairing")
            paired.add((t, m))
        (ti, mi), (tj, mj) = left, right
        if arrays[ti].shape[mi] != arrays[tj].shape[mj]:
            raise DimensionMismatchError(
                f"pairing ({ti},{mi})-({tj},{mj}) joins dims {arrays[ti].shape[mi]} and {arrays[tj].shape[mj]}"
            )
        labels[tj][mj] = labels[ti][mi]

    output = [
        labels[i][k] for i, arr in enumerate(arrays) for k in range(arr.ndim) if (i, k) not in paired
    ]
    result, _ = contract_network(arrays, labels, output, budget=budget)
    return DenseTensor(result)


def tensor_product(a: DenseTensor | ArrayLike, b: DenseTensor | ArrayLike) -> DenseTensor:
    """(a ⊗ b)[x, x'] = a[x] * b[x']."""
    return DenseTensor(np.multiply.outer(as_tensor(a).data, as_tensor(b).data))


def copy_tensor(n: int, d: int) -> DenseTensor:
    """The order-n copy tensor Δ_n over dimension d: 1 where all indices agree, else 0."""
    if n < 1:
        raise ModeIndexError(f"copy tensor order must be >= 1, got {n}")
    if d < 1:
        raise DimensionMismatchError(f"copy tensor dimension must be >= 1, got {d}")
    data = np.zeros((d,) * n, dtype=np.complex128)
    diagonal = np.arange(d)
    data[(diagonal,) * n] = 1.0
    return DenseTensor(data)


def basis_vector(x: int, d: int) -> DenseTensor:
    """The standard basis vector e_x of length d."""
    if not 0 <= x < d:
        raise ModeIndexError(f"basis index {x} out of range for dimension {d}")
    data = np.zeros(d, dtype=np.complex128)
    data[x] = 1.0
    return DenseTensor(data)


def elementwise_product(a: DenseTensor | ArrayLike, b: DenseTensor | ArrayLike) -> DenseTensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"element-wise product needs equal shapes, got {a.shape} and {b.shape}")
    return DenseTensor(a.data * b.data)


def conjugate(a: DenseTensor | ArrayLike) -> DenseTensor:
    return DenseTensor(np.conj(as_tensor(a).data))


def norm2(a: DenseTensor | ArrayLike) -> float:
    """sqrt(sum |a_x|^2)."""
    return float(np.linalg.norm(as_tensor(a).data.reshape(-1)))


def inner_product(u: DenseTensor | ArrayLike, v: DenseTensor | ArrayLike) -> complex:
    """u†v for tensors of equal shape."""
    u, v = as_tensor(u), as_tensor(v)
    if u.shape != v.shape:
        raise ShapeMismatchError(f"inner product needs equal shapes, got {u.shape} and {v.shape}")
    return complex(np.vdot(u.data.reshape(-1), v.data.reshape(-1)))


def diag_embed(v: DenseTensor | ArrayLike) -> DenseTensor:
    """Diagonal matrix from a vector, i.e. Δ₃ contracted with v on one mode."""
    v = as_tensor(v)
    if v.order != 1:
        raise ShapeMismatchError(f"diag_embed expects a vector, got order {v.order}")
    return contract(copy_tensor(3, v.shape[0]), 0, v, 0)


def is_copy_tensor(a: DenseTensor | ArrayLike) -> bool:
    """True if a equals Δ_n for its order n and common mode dimension."""
    data = as_tensor(a).data
    if data.ndim == 0 or len(set(data.shape)) != 1:
        return False
    d = data.shape[0]
    diagonal = np.arange(d)
    return bool(np.count_nonzero(data) == d and np.all(data[(diagonal,) * data.ndim] == 1.0))


# =============================================================================
# Labelled contraction engine
# =============================================================================


def contract_network(
    cores: Sequence[ComplexArray],
    modes: Sequence[Sequence[str]],
    output: Sequence[str],
    *,
    budget: int | None = None,
    rescale: bool = False,
) -> tuple[ComplexArray, float]:
    """
    Contract labelled cores down to the output labels.

    A label shared by two modes is summed over; a label listed in `output` stays free.
    Large copy tensors (order >= 3, at least `copy_rewrite_min_elements` entries) are never
    materialized in an intermediate: their modes are merged into one index instead.

    Pairs are contracted greedily, smallest intermediate first, ties broken by the smallest
    shared label. With `rescale`, every intermediate is divided by its largest modulus and
    the logs accumulate in the returned scale, so the true value is result * exp(scale).
    """
    budget = settings.budget if budget is None else budget
    dims: dict[str, int] = {}
    for core, labels in zip(cores, modes, strict=True):
        if core.ndim != len(labels):
            raise ModeIndexError(f"core of order {core.ndim} given {len(labels)} mode labels")
        for label, dim in zip(labels, core.shape):
            if dims.setdefault(label, dim) != dim:
                raise DimensionMismatchError(f"label {label!r} joins dims {dims[label]} and {dim}")
    for label in output:
        if label not in dims:
            raise UnknownEdgeError(f"output label {label!r} is not a mode of any core")

    parent = {label: label for label in dims}

    def find(label: str) -> str:
        while parent[label] != label:
            parent[label] = parent[parent[label]]
            label = parent[label]
        return label

    operands: list[tuple[ComplexArray, tuple[str, ...]]] = []
    for core, labels in zip(cores, modes):
        if _rewrite_as_index_merge(core):
            roots = sorted({find(label) for label in labels})
            for root in roots[1:]:
                parent[root] = roots[0]
        else:
            operands.append((core, tuple(labels)))

    operands = [(core, tuple(find(label) for label in labels)) for core, labels in operands]
    merged_output = [find(label) for label in output]
    used = {label for _, labels in operands for label in labels} | set(merged_output)
    # copy-tensor groups touching nothing else contribute sum_x 1 = d
    factor = math.prod(dims[root] for root in {find(label) for label in dims} if root not in used)

    result, log_scale = _greedy_contract(operands, merged_output, dims, budget, rescale)
    if factor != 1:
        result = result * factor
    return result, log_scale


def _rewrite_as_index_merge(core: ComplexArray) -> bool:
    return core.ndim >= 3 and core.size >= settings.copy_rewrite_min_elements and is_copy_tensor(core)


def _einsum(pairs: Sequence[tuple[ComplexArray, Sequence[str]]], out: Sequence[str]) -> ComplexArray:
    symbols: dict[str, int] = {}
    args: list[Any] = []
    for array, labels in pairs:
        args.append(array)
        args.append([symbols.setdefault(label, len(symbols)) for label in labels])
    args.append([symbols[label] for label in out])
    return np.asarray(np.einsum(*args), dtype=np.complex128)


def _greedy_contract(
    operands: list[tuple[ComplexArray, tuple[str, ...]]],
    output: Sequence[str],
    dims: dict[str, int],
    budget: int,
    rescale: bool,
) -> tuple[ComplexArray, float]:
    counts: Counter[str] = Counter()
    for _, labels in operands:
        counts.update(set(labels))
    counts.update(set(output))

    ops: list[tuple[ComplexArray, tuple[str, ...]]] = []
    for array, labels in operands:
        keep = tuple(dict.fromkeys(label for label in labels if counts[label] > 1))
        if keep != labels:
            array = _einsum([(array, labels)], keep)
        ops.append((array, keep))

    log_scale = 0.0
    step = 0
    while len(ops) > 1:
        best: tuple[tuple[Any, ...], int, int, tuple[str, ...]] | None = None
        any_shared = any(
            set(ops[i][1]) & set(ops[j][1]) for i in range(len(ops)) for j in range(i + 1, len(ops))
        )
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                li, lj = ops[i][1], ops[j][1]
                shared = set(li) & set(lj)
                if any_shared and not shared:
                    continue
                keep = tuple(
                    label
                    for label in dict.fromkeys(li + lj)
                    if counts[label] - (label in li) - (label in lj) > 0
                )
                size = math.prod(dims[label] for label in keep)
                key = (size, min(shared) if shared else "", i, j)
                if best is None or key < best[0]:
                    best = (key, i, j, keep)

        assert best is not None
        (size, *_), i, j, keep = best
        (a, li), (b, lj) = ops[i], ops[j]
        if size > budget:
            raise ContractionBudgetError(
                f"contraction step {step}: merging modes {list(li)} with {list(lj)} "
                f"would create {size} elements (budget {budget})",
                step=step,
                size=size,
            )
        merged = _einsum([(a, li), (b, lj)], keep)
        for label in set(li) | set(lj):
            counts[label] -= (label in li) + (label in lj)
        counts.update(keep)
        if rescale and merged.size:
            peak = float(np.max(np.abs(merged)))
            if peak > 0.0 and math.isfinite(peak):
                merged = merged / peak
                log_scale += math.log(peak)
        ops = [op for k, op in enumerate(ops) if k not in (i, j)] + [(merged, keep)]
        step += 1

    array, labels = ops[0] if ops else (np.ones((), dtype=np.complex128), ())
    unique_out = tuple(dict.fromkeys(output))
    present = [label for label in unique_out if label in labels]
    array = _einsum([(array, labels)], present)
    for label in unique_out:
        if label not in present:
            array = np.multiply.outer(array, np.ones(dims[label], dtype=np.complex128))
            present.append(label)
    array = array.transpose([present.index(label) for label in unique_out])

    if len(unique_out) < len(output):
        # free modes of one merged copy group: embed on the diagonal
        full = np.zeros([dims[label] for label in output], dtype=np.complex128)
        grid = np.indices(array.shape)
        full[tuple(grid[unique_out.index(label)] for label in output)] = array
        array = full
    return array, log_scale
