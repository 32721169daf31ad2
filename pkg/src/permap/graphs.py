"""Weighted-graph matrix algebra: Laplacians, random walks, normalizations.

All matrices are kept as plain float64 numpy arrays wrapped in thin typed
containers. The large assembled multilayer systems may instead carry a
scipy.sparse matrix; the operations here accept both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import IsolatedNodeError
from .fileio import atomic_write

SYMMETRY_RTOL = 1e-10

SYMMETRIC = "symmetric"
DIRECTED = "directed"


def _is_sparse(values):
    return sparse.issparse(values)


def _max_abs(values) -> float:
    if _is_sparse(values):
        return float(abs(values).max()) if values.nnz else 0.0
    return float(np.abs(values).max()) if values.size else 0.0


def _min_entry(values) -> float:
    if _is_sparse(values):
        return float(values.min()) if values.nnz else 0.0
    return float(values.min()) if values.size else 0.0


def asymmetry(values) -> float:
    """Largest absolute difference between a matrix and its transpose."""
    diff = values - values.T
    return _max_abs(diff)


@dataclass(frozen=True)
class WeightMatrix:
    """n x n nonnegative edge weights, flagged symmetric or directed."""

    values: object  # numpy ndarray or scipy sparse matrix
    kind: str

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, DIRECTED):
            raise ValueError(f"unknown weight-matrix kind {self.kind!r}")
        if not _is_sparse(self.values):
            object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {v.shape}")
        if _min_entry(v) < 0:
            raise ValueError("weight matrix entries must be nonnegative")
        if self.kind == SYMMETRIC:
            scale = _max_abs(v)
            if asymmetry(v) > SYMMETRY_RTOL * max(scale, 1.0):
                raise ValueError("matrix flagged symmetric is not symmetric")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return self.kind == SYMMETRIC


@dataclass(frozen=True)
class LaplacianMatrix:
    """Combinatorial Laplacian: total incident weight on the diagonal, minus weights off it."""

    values: object

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class WalkMatrix:
    """Row-normalized transition probabilities; lazy walks keep 0.5 on the diagonal."""

    values: np.ndarray
    lazy: bool

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _row_sums(values) -> np.ndarray:
    if _is_sparse(values):
        return np.asarray(values.sum(axis=1)).ravel()
    return values.sum(axis=1)


def laplacian(w: WeightMatrix) -> LaplacianMatrix:
    """Build the combinatorial Laplacian of a symmetric weight matrix.

    The input must be flagged symmetric; directed matrices have to be
    symmetrized (or replicated into out/in copies) first.
    """
    if not w.is_symmetric:
        raise ValueError("laplacian requires a symmetric weight matrix; symmetrize first")
    degrees = _row_sums(w.values)
    if _is_sparse(w.values):
        lap = sparse.diags(degrees) - w.values
        return LaplacianMatrix(lap.tocsr())
    return LaplacianMatrix(np.diag(degrees) - w.values)


def _check_positive_rows(values, layer: str | None = None):
    sums = _row_sums(values)
    bad = np.flatnonzero(sums <= 0)
    if bad.size:
        where = f" in layer {layer!r}" if layer else ""
        raise IsolatedNodeError(f"node {bad[0]}{where} has zero total edge weight")
    return sums


def random_walk(w: WeightMatrix) -> WalkMatrix:
    """Divide each row by its sum, giving transition probabilities."""
    sums = _check_positive_rows(w.values)
    return WalkMatrix(w.values / sums[:, None], lazy=False)


def lazy_random_walk(w: WeightMatrix) -> WalkMatrix:
    """Halve each row's probabilities and put the spare 0.5 on the diagonal."""
    sums = _check_positive_rows(w.values)
    p = w.values / (2.0 * sums[:, None])
    np.fill_diagonal(p, 0.5)
    return WalkMatrix(p, lazy=True)


def symmetrize(m) -> WeightMatrix:
    """Average a square matrix with its transpose."""
    values = m.values if isinstance(m, WeightMatrix) else m
    if not _is_sparse(values):
        values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("symmetrize requires a square matrix")
    sym = (values + values.T) / 2.0
    if _is_sparse(sym):
        sym = sym.tocsr()
    return WeightMatrix(sym, SYMMETRIC)


def mean_nonzero_normalize(w: WeightMatrix) -> WeightMatrix:
    """Divide every entry by the mean of the strictly nonzero entries.

    Brings edge-weight magnitudes of differently scaled layers onto a
    common footing: the nonzero entries of the result average to 1.
    """
    values = w.values
    nz = values.data[values.data != 0] if _is_sparse(values) else values[values != 0]
    if nz.size == 0:
        raise ValueError("cannot normalize an all-zero matrix")
    return WeightMatrix(values / nz.mean(), w.kind)


def dump_coordinate_list(values, path) -> None:
    """Write nonzero entries as `i j value` triples (0-based, row-major)."""
    if _is_sparse(values):
        coo = values.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with atomic_write(path) as fh:
            for t in order:
                v = coo.data[t]
                if v != 0:
                    fh.write(f"{coo.row[t]} {coo.col[t]} {float(v)!r}\n")
        return
    with atomic_write(path) as fh:
        for i, j in zip(*np.nonzero(values)):
            fh.write(f"{i} {j} {float(values[i, j])!r}\n")


def load_coordinate_list(path, n: int) -> np.ndarray:
    """Read an `i j value` triple file back into a dense n x n array."""
    out = np.zeros((n, n))
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            i, j, v = line.split()
            out[int(i), int(j)] = float(v)
    return out
