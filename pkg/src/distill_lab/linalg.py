"""Dense complex linear algebra over composite index spaces.

Composite index convention used everywhere in this package: the leftmost
subsystem is the most significant digit of the flattened index (base-d
positional encoding).  A matrix entry ``m[i, j]`` with ``row_dims = (2, 3)``
therefore refers to row multi-index ``(i // 3, i % 3)``.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionLimitError, ShapeError, SymmetryError

# Per-side cap on composite dimensions; guards against accidental blowup of
# repeated tensor powers.
DEFAULT_DIM_CAP = 1 << 16

HERMITICITY_TOL = 1e-10
NORMALIZATION_TOL = 1e-12


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if any(d <= 0 for d in out):
        raise ShapeError(f"subsystem dimensions must be positive, got {out}")
    return out


@dataclass(frozen=True)
class ComplexMatrix:
    """Dense complex matrix with explicit composite dimension metadata.

    ``row_dims`` and ``col_dims`` record how the flat row/column indices
    factor into subsystem indices; their products must equal the matrix
    shape.  Instances are immutable: the backing array is marked read-only.
    """

    data: np.ndarray
    row_dims: tuple[int, ...]
    col_dims: tuple[int, ...]

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got ndim={arr.ndim}")
        row_dims = _as_dims(self.row_dims)
        col_dims = _as_dims(self.col_dims)
        if math.prod(row_dims) != arr.shape[0]:
            raise ShapeError(
                f"row_dims {row_dims} do not multiply to {arr.shape[0]} rows"
            )
        if math.prod(col_dims) != arr.shape[1]:
            raise ShapeError(
                f"col_dims {col_dims} do not multiply to {arr.shape[1]} columns"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "row_dims", row_dims)
        object.__setattr__(self, "col_dims", col_dims)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def is_square_composite(self) -> bool:
        return self.row_dims == self.col_dims

    def as_tensor(self) -> np.ndarray:
        """Read-only view shaped ``row_dims + col_dims``."""
        return self.data.reshape(self.row_dims + self.col_dims)

    @staticmethod
    def from_array(arr, row_dims=None, col_dims=None) -> "ComplexMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got ndim={a.ndim}")
        if row_dims is None:
            row_dims = (a.shape[0],)
        if col_dims is None:
            col_dims = (a.shape[1],)
        return ComplexMatrix(a, tuple(row_dims), tuple(col_dims))

    @staticmethod
    def identity(dims: Iterable[int]) -> "ComplexMatrix":
        dims = _as_dims(dims)
        n = math.prod(dims)
        return ComplexMatrix(np.eye(n, dtype=np.complex128), dims, dims)


@dataclass(frozen=True)
class MultipartiteState:
    """Normalized pure state vector with an ordered list of subsystem dims."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        vec = np.array(self.amplitudes, dtype=np.complex128, copy=True).reshape(-1)
        dims = _as_dims(self.dims)
        if math.prod(dims) != vec.size:
            raise ShapeError(
                f"dims {dims} do not multiply to vector length {vec.size}"
            )
        nrm = float(np.linalg.norm(vec))
        if abs(nrm - 1.0) > NORMALIZATION_TOL:
            raise ShapeError(
                f"state must be normalized within {NORMALIZATION_TOL}, norm={nrm!r}"
            )
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)
        object.__setattr__(self, "dims", dims)

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class SubsystemPermutation:
    """Relabeling of subsystem slots: source slot ``i`` moves to ``perm[i]``."""

    perm: tuple[int, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        dims = _as_dims(self.dims)
        if len(perm) != len(dims):
            raise ShapeError("perm and dims must have equal length")
        if sorted(perm) != list(range(len(dims))):
            raise ShapeError(f"perm must be a bijection on 0..{len(dims) - 1}, got {perm}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "dims", dims)

    def inverse(self) -> "SubsystemPermutation":
        inv = np.argsort(self.perm)
        new_dims = tuple(self.dims[a] for a in inv)
        return SubsystemPermutation(tuple(int(i) for i in inv), new_dims)

    def target_dims(self) -> tuple[int, ...]:
        inv = np.argsort(self.perm)
        return tuple(self.dims[a] for a in inv)


def kron(a: ComplexMatrix, b: ComplexMatrix, dim_cap: int = DEFAULT_DIM_CAP) -> ComplexMatrix:
    """Kronecker product; dim lists concatenate (left operand most significant)."""
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    if rows > dim_cap or cols > dim_cap:
        raise DimensionLimitError(
            f"kron result {rows}x{cols} exceeds per-side cap {dim_cap}"
        )
    return ComplexMatrix(
        np.kron(a.data, b.data), a.row_dims + b.row_dims, a.col_dims + b.col_dims
    )


def partial_trace(m: ComplexMatrix, subsystems: Iterable[int]) -> ComplexMatrix:
    """Trace out the listed subsystem slots of a square-composite matrix.

    The full trace is preserved: ``trace(out) == trace(m)``.  Tracing every
    slot yields a 1x1 matrix holding the scalar trace.
    """
    if not m.is_square_composite():
        raise ShapeError(
            f"partial_trace requires row_dims == col_dims, got {m.row_dims} vs {m.col_dims}"
        )
    n = len(m.row_dims)
    slots = sorted({int(s) for s in subsystems})
    for s in slots:
        if not 0 <= s < n:
            raise ShapeError(f"subsystem index {s} out of range for {n} slots")
    if not slots:
        return m
    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise ShapeError(f"too many subsystems for einsum labels: {n}")
    row_labels = list(letters[:n])
    col_labels = list(letters[n : 2 * n])
    for s in slots:
        col_labels[s] = row_labels[s]
    kept = [i for i in range(n) if i not in slots]
    spec = "".join(row_labels) + "".join(col_labels)
    out = "".join(row_labels[i] for i in kept) + "".join(col_labels[i] for i in kept)
    traced = np.einsum(f"{spec}->{out}", m.as_tensor())
    kept_dims = tuple(m.row_dims[i] for i in kept)
    size = math.prod(kept_dims)
    return ComplexMatrix(traced.reshape(size, size), kept_dims, kept_dims)


def partial_transpose(m: ComplexMatrix, subsystem: int) -> ComplexMatrix:
    """Transpose the indices of one subsystem only.  Involution: applying
    twice returns the input exactly."""
    if not m.is_square_composite():
        raise ShapeError(
            f"partial_transpose requires row_dims == col_dims, got {m.row_dims} vs {m.col_dims}"
        )
    n = len(m.row_dims)
    s = int(subsystem)
    if not 0 <= s < n:
        raise ShapeError(f"subsystem index {s} out of range for {n} slots")
    t = np.swapaxes(m.as_tensor(), s, n + s)
    return ComplexMatrix(t.reshape(m.rows, m.cols), m.row_dims, m.col_dims)


def permute_subsystems(obj, p: SubsystemPermutation):
    """Relabel composite indices of a state or matrix by ``p``.

    Pure index bookkeeping: preserves the Euclidean/Frobenius norm exactly
    and equals conjugation by ``permutation_matrix(p)`` on small instances.
    Column-vector matrices (``col_dims == (1,)``) are permuted on rows only.
    """
    axes = tuple(int(a) for a in np.argsort(p.perm))
    new_dims = p.target_dims()
    if isinstance(obj, MultipartiteState):
        if obj.dims != p.dims:
            raise ShapeError(f"state dims {obj.dims} do not match permutation dims {p.dims}")
        out = np.transpose(obj.as_tensor(), axes).reshape(-1)
        return MultipartiteState(out, new_dims)
    if isinstance(obj, ComplexMatrix):
        if obj.col_dims == (1,) and obj.row_dims == p.dims:
            t = obj.data.reshape(p.dims)
            out = np.transpose(t, axes).reshape(-1, 1)
            return ComplexMatrix(out, new_dims, (1,))
        if obj.row_dims != p.dims or obj.col_dims != p.dims:
            raise ShapeError(
                f"matrix dims {obj.row_dims}/{obj.col_dims} do not match permutation dims {p.dims}"
            )
        n = len(p.dims)
        full_axes = axes + tuple(a + n for a in axes)
        t = np.transpose(obj.as_tensor(), full_axes)
        size = math.prod(new_dims)
        return ComplexMatrix(t.reshape(size, size), new_dims, new_dims)
    raise TypeError(f"cannot permute object of type {type(obj).__name__}")


def permutation_matrix(p: SubsystemPermutation) -> ComplexMatrix:
    """Explicit 0/1 matrix realizing ``p``: ``permute(v) == P @ v``.

    Materializes the full operator; meant for small oracle checks only.
    """
    new_dims = p.target_dims()
    size = math.prod(p.dims)
    mat = np.zeros((size, size), dtype=np.complex128)
    strides_new = np.ones(len(new_dims), dtype=np.int64)
    for i in range(len(new_dims) - 2, -1, -1):
        strides_new[i] = strides_new[i + 1] * new_dims[i + 1]
    for src, idx in enumerate(np.ndindex(*p.dims)):
        dest = sum(int(strides_new[p.perm[k]]) * idx[k] for k in range(len(idx)))
        mat[dest, src] = 1.0
    return ComplexMatrix(mat, new_dims, p.dims)


def svd(m: ComplexMatrix):
    """Singular value decomposition.

    Returns ``(s, left, right)`` with ``s`` descending and
    ``m.data == left @ diag(s) @ right.conj().T``.
    """
    u, s, vh = np.linalg.svd(m.data, full_matrices=False)
    return s, u, vh.conj().T


def min_eigenvalue_hermitian(m: ComplexMatrix, tol: float = HERMITICITY_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix; rejects non-Hermitian input."""
    dev = float(np.max(np.abs(m.data - m.data.conj().T))) if m.rows else 0.0
    scale = max(1.0, float(np.max(np.abs(m.data))) if m.data.size else 0.0)
    if m.rows != m.cols or dev > tol * scale:
        raise SymmetryError(
            f"matrix is not Hermitian within {tol} (max deviation {dev:.3e})"
        )
    return float(np.linalg.eigvalsh(m.data)[0])
