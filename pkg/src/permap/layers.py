"""Multilayer network assembly and displacement diagnostics.

Two-layer systems couple a geodesic-closeness layer with a border
permeability layer through fixed-weight inter-layer edges, following a
lazy-walk budget: half of each node's transition mass stays in its layer
and half crosses to its twin. Three-layer systems add a directed attack
sequence layer and replicate every node into outgoing/incoming copies so
the direction survives symmetric eigensolving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .errors import IsolatedNodeError
from .fileio import atomic_write
from .geo import (
    border_permeability_matrix,
    crossings_matrix,
    distance_matrix,
    invert_distances,
)
from .graphs import (
    DIRECTED,
    SYMMETRIC,
    WeightMatrix,
    _is_sparse,
    mean_nonzero_normalize,
    symmetrize,
)
from .spectral import COORD_NAMES, DENSE_CUTOFF, Embedding, PointRef, embed

TWO_LAYER_TAGS = ("distance", "border")
THREE_LAYER_TAGS = ("border", "distance", "sequence")
OUT = "out"
IN = "in"
NO_COPY = "-"

DEFAULT_BORDER_P = 0.95
DEFAULT_LINEAR_COST_KM = 100.0


@dataclass(frozen=True)
class MultiLayerSystem:
    """An assembled multilayer weight matrix plus row bookkeeping."""

    n: int
    layer_tags: tuple
    copies_per_layer: int
    assembled: WeightMatrix
    provenance: tuple

    def __post_init__(self):
        object.__setattr__(self, "layer_tags", tuple(self.layer_tags))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        size = self.n * len(self.layer_tags) * self.copies_per_layer
        if self.assembled.n != size:
            raise ValueError(
                f"assembled matrix is {self.assembled.n}x{self.assembled.n}, expected {size}"
            )
        if len(self.provenance) != size or len(set(self.provenance)) != size:
            raise ValueError("provenance must map rows one-to-one")

    @property
    def size(self) -> int:
        return self.assembled.n


def _layer_values(w: WeightMatrix, tag: str):
    values = np.array(w.values, dtype=float)
    np.fill_diagonal(values, 0.0)
    sums = values.sum(axis=1)
    bad = np.flatnonzero(sums <= 0)
    if bad.size:
        raise IsolatedNodeError(f"node {bad[0]} in layer {tag!r} has zero total edge weight")
    return values, sums


def two_layer_walk_matrix(w_a: WeightMatrix, w_b: WeightMatrix, layer_tags=TWO_LAYER_TAGS):
    """Pre-symmetrization 2n x 2n lazy-walk matrix of the two-layer system.

    Within-layer rows are scaled to sum 0.5; the remaining probability
    rides the diagonal inter-layer blocks, so every row sums to 1. The
    main diagonal stays zero.
    """
    if not (isinstance(w_a, WeightMatrix) and isinstance(w_b, WeightMatrix)):
        raise ValueError("two-layer assembly expects WeightMatrix layers")
    if not (w_a.is_symmetric and w_b.is_symmetric):
        raise ValueError("both layers must be symmetric")
    n = w_a.n
    if w_b.n != n:
        raise ValueError(f"layer sizes differ: {n} vs {w_b.n}")
    if n < 2:
        raise ValueError("a layer needs at least 2 locations to carry edges")
    va, sa = _layer_values(w_a, layer_tags[0])
    vb, sb = _layer_values(w_b, layer_tags[1])
    walk = np.zeros((2 * n, 2 * n))
    walk[:n, :n] = va / (2.0 * sa[:, None])
    walk[n:, n:] = vb / (2.0 * sb[:, None])
    cross = np.arange(n)
    walk[cross, n + cross] = 0.5
    walk[n + cross, cross] = 0.5
    return walk


def build_two_layer(
    w_a: WeightMatrix, w_b: WeightMatrix, layer_tags=TWO_LAYER_TAGS
) -> MultiLayerSystem:
    """Couple two undirected layers over the same nodes into one system."""
    walk = two_layer_walk_matrix(w_a, w_b, layer_tags)
    n = w_a.n
    provenance = [
        PointRef(i, tag, NO_COPY) for tag in tuple(layer_tags) for i in range(n)
    ]
    return MultiLayerSystem(
        n=n,
        layer_tags=tuple(layer_tags),
        copies_per_layer=1,
        assembled=symmetrize(walk),
        provenance=tuple(provenance),
    )


def embed_two_layer(locations, cg, p: float = DEFAULT_BORDER_P, k: int = 2):
    """Distance layer + border permeability layer, embedded together.

    Returns (Embedding, DisplacementReport); the report measures how far
    each location's two copies land apart.
    """
    locations = list(locations)
    w_dist = invert_distances(distance_matrix(locations))
    crossings = crossings_matrix(locations, cg)
    w_border = border_permeability_matrix(crossings, p)
    system = build_two_layer(w_dist, w_border, TWO_LAYER_TAGS)
    emb = embed(system.assembled, k, provenance=system.provenance)
    return emb, displacement(emb, TWO_LAYER_TAGS)


def replicate_directed(a) -> WeightMatrix:
    """Split nodes into out/in copies, turning directed edges undirected.

    A directed edge i -> j of weight w becomes the undirected edge between
    out-copy i (rows 0..n-1) and in-copy j (rows n..2n-1) of weight w.
    """
    values = a.values if isinstance(a, WeightMatrix) else a
    if _is_sparse(values):
        doubled = sparse.bmat(
            [[None, values], [values.T, None]], format="csr", dtype=float
        )
        return WeightMatrix(doubled, SYMMETRIC)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("replicate_directed requires a square matrix")
    n = values.shape[0]
    doubled = np.zeros((2 * n, 2 * n))
    doubled[:n, n:] = values
    doubled[n:, :n] = values.T
    return WeightMatrix(doubled, SYMMETRIC)


def normalize_sequence_layer(a) -> WeightMatrix:
    """Normalize the sequence layer and pad rows to a constant sum.

    After dividing by the mean nonzero weight, every row gets a self-loop
    sized to lift its sum to the maximum row sum S; nodes with no sequence
    edges end up with a self-loop of weight S.
    """
    w = a if isinstance(a, WeightMatrix) else WeightMatrix(a, DIRECTED)
    try:
        scaled = mean_nonzero_normalize(w)
    except ValueError:
        raise ValueError("sequence layer has no edges; nothing to normalize") from None
    values = np.array(scaled.values, dtype=float)
    sums = values.sum(axis=1)
    top = float(sums.max())
    np.fill_diagonal(values, values.diagonal() + (top - sums))
    return WeightMatrix(values, DIRECTED)


def three_layer_budget_assembly(normalized) -> np.ndarray:
    """Directed 3n x 3n node-layer assembly under the 0.5/0.25/0.25 split.

    Within-layer blocks carry half of each node's normalized edge weight;
    the node's copy in each other layer receives a quarter of its budget
    on the corresponding cross-block diagonal.
    """
    normalized = [np.asarray(m, dtype=float) for m in normalized]
    n = normalized[0].shape[0]
    m = len(normalized)
    budgets = [layer.sum(axis=1) for layer in normalized]
    out = np.zeros((m * n, m * n))
    for li, layer in enumerate(normalized):
        rows = slice(li * n, (li + 1) * n)
        out[rows, rows] = layer / 2.0
        for lj in range(m):
            if lj != li:
                cols = slice(lj * n, (lj + 1) * n)
                out[rows, cols] = np.diag(budgets[li] / 4.0)
    return out


def build_three_layer(
    w_border: WeightMatrix,
    w_dist: WeightMatrix,
    a_seq: WeightMatrix,
    layer_tags=THREE_LAYER_TAGS,
    sparse_output: bool | None = None,
) -> MultiLayerSystem:
    """Assemble border, distance, and sequence layers into a 6n x 6n system.

    Every layer is normalized to unit mean nonzero weight (the sequence
    layer additionally padded to constant row sums), budget-split half
    within-layer and a quarter toward each other layer, and replicated
    into out/in copies. Out/in copies of one node in one layer are joined
    by an edge worth half the node's incident weight there. The result is
    symmetrized.
    """
    if not (isinstance(w_border, WeightMatrix) and isinstance(w_dist, WeightMatrix)):
        raise ValueError("three-layer assembly expects WeightMatrix layers")
    if not (w_border.is_symmetric and w_dist.is_symmetric):
        raise ValueError("border and distance layers must be symmetric")
    if not isinstance(a_seq, WeightMatrix) or a_seq.is_symmetric:
        raise ValueError("sequence layer must be a directed WeightMatrix")
    n = w_border.n
    if w_dist.n != n or a_seq.n != n:
        raise ValueError(
            f"layer sizes differ: {n}, {w_dist.n}, {a_seq.n}"
        )

    normalized = [
        np.array(mean_nonzero_normalize(w_border).values, dtype=float),
        np.array(mean_nonzero_normalize(w_dist).values, dtype=float),
        np.array(normalize_sequence_layer(a_seq).values, dtype=float),
    ]
    tags = tuple(layer_tags)
    for tag, layer in zip(tags, normalized):
        sums = layer.sum(axis=1)
        bad = np.flatnonzero(sums <= 0)
        if bad.size:
            raise IsolatedNodeError(
                f"node {bad[0]} in layer {tag!r} has zero total edge weight"
            )

    size = 6 * n
    if sparse_output is None:
        sparse_output = size > DENSE_CUTOFF
    budgets = [layer.sum(axis=1) for layer in normalized]
    links = [(layer.sum(axis=1) + layer.sum(axis=0)) / 4.0 for layer in normalized]

    # Row block 2*l holds layer l's out-copies, row block 2*l+1 its
    # in-copies; pre-symmetrization weight flows out-rows -> in-columns.
    if sparse_output:
        grid = [[None] * 6 for _ in range(6)]
        for li in range(3):
            for lj in range(3):
                if li == lj:
                    block = sparse.csr_matrix(normalized[li] / 2.0 + np.diag(links[li]))
                else:
                    block = sparse.diags(budgets[li] / 4.0, format="csr")
                grid[2 * li][2 * lj + 1] = block
            # bmat cannot size fully-empty block rows/columns; the in-copy
            # rows and out-copy columns carry no pre-symmetrization weight.
            grid[2 * li + 1][2 * li] = sparse.csr_matrix((n, n))
        raw = sparse.bmat(grid, format="csr")
    else:
        raw = np.zeros((size, size))
        for li in range(3):
            rows = slice(2 * li * n, (2 * li + 1) * n)
            for lj in range(3):
                cols = slice((2 * lj + 1) * n, (2 * lj + 2) * n)
                if li == lj:
                    raw[rows, cols] = normalized[li] / 2.0 + np.diag(links[li])
                else:
                    raw[rows, cols] = np.diag(budgets[li] / 4.0)

    provenance = [
        PointRef(i, tag, copy)
        for tag in tags
        for copy in (OUT, IN)
        for i in range(n)
    ]
    return MultiLayerSystem(
        n=n,
        layer_tags=tags,
        copies_per_layer=2,
        assembled=symmetrize(raw),
        provenance=tuple(provenance),
    )


def embed_three_layer(
    locations,
    cg,
    seq: WeightMatrix,
    p: float = DEFAULT_BORDER_P,
    k: int = 2,
):
    """Embed the full border/distance/sequence system for given locations.

    Returns (Embedding, DisplacementReport); the report compares each
    location's distance-layer and border-layer centroids.
    """
    locations = list(locations)
    crossings = crossings_matrix(locations, cg)
    w_border = border_permeability_matrix(crossings, p)
    w_dist = invert_distances(distance_matrix(locations))
    system = build_three_layer(w_border, w_dist, seq)
    emb = embed(system.assembled, k, provenance=system.provenance)
    return emb, displacement(emb, ("distance", "border"))


class DisplacementRow(NamedTuple):
    location_id: int
    vector: tuple
    length: float


@dataclass(frozen=True)
class DisplacementReport:
    """Per-location separation between two layer copies, longest first."""

    layer_a: str
    layer_b: str
    k: int
    rows: tuple


def _selector(emb: Embedding, spec: str):
    layer, _, copy = spec.partition(":")
    positions: dict[int, list] = {}
    for idx, ref in enumerate(emb.provenance):
        if ref.layer == layer and (not copy or ref.copy == copy):
            positions.setdefault(ref.location_id, []).append(idx)
    if not positions:
        raise RuntimeError(f"no embedded points match layer selector {spec!r}")
    return positions


def displacement(emb: Embedding, layer_pair) -> DisplacementReport:
    """Vector and length from each location's first-layer point to its second.

    Selectors are layer tags, optionally narrowed to one copy as
    "layer:copy"; a selector matching both copies of a location uses their
    centroid. Every location must appear under both selectors.
    """
    sel_a, sel_b = layer_pair
    pos_a = _selector(emb, sel_a)
    pos_b = _selector(emb, sel_b)
    rows = []
    for lid in sorted(set(pos_a) | set(pos_b)):
        if lid not in pos_a or lid not in pos_b:
            raise RuntimeError(
                f"location {lid} is missing a copy for pair ({sel_a!r}, {sel_b!r})"
            )
        a = emb.coordinates[pos_a[lid]].mean(axis=0)
        b = emb.coordinates[pos_b[lid]].mean(axis=0)
        vec = b - a
        rows.append(DisplacementRow(lid, tuple(float(v) for v in vec), float(np.linalg.norm(vec))))
    rows.sort(key=lambda r: (-r.length, r.location_id))
    return DisplacementReport(layer_a=sel_a, layer_b=sel_b, k=emb.k, rows=tuple(rows))


def write_displacement_csv(report: DisplacementReport, path, countries=None) -> None:
    """Export displacement rows with the layer pair spelled out per row."""
    delta_cols = [f"d{name}" for name in COORD_NAMES[: report.k]]
    header = ["location_id", "layer_a", "layer_b"] + delta_cols + ["length", "country"]
    with atomic_write(path) as fh:
        fh.write(",".join(header) + "\n")
        for row in report.rows:
            country = "" if countries is None else str(countries[row.location_id])
            cells = [str(row.location_id), report.layer_a, report.layer_b]
            cells += [repr(float(v)) for v in row.vector]
            cells += [repr(row.length), country]
            fh.write(",".join(cells) + "\n")


def country_separation_ratio(emb: Embedding, countries) -> float:
    """Mean inter-country embedded distance over mean intra-country distance.

    Pairs of points backed by the same location are excluded, so the fixed
    inter-layer geometry of a location's own copies does not dilute the
    between-country signal.
    """
    coords = emb.coordinates
    n = coords.shape[0]
    loc_ids = np.array([ref.location_id for ref in emb.provenance])
    tags = np.array([str(countries[ref.location_id]) for ref in emb.provenance])

    inter_sum = intra_sum = 0.0
    inter_count = intra_count = 0
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = coords[start:stop, None, :] - coords[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(n)[None, :]
        upper = cols > rows
        distinct = loc_ids[start:stop][:, None] != loc_ids[None, :]
        same_country = tags[start:stop][:, None] == tags[None, :]
        intra = upper & distinct & same_country
        inter = upper & distinct & ~same_country
        intra_sum += float(dist[intra].sum())
        intra_count += int(intra.sum())
        inter_sum += float(dist[inter].sum())
        inter_count += int(inter.sum())
    if not inter_count:
        raise ValueError("no inter-country point pairs; ratio undefined")
    if not intra_count:
        raise ValueError("no intra-country point pairs; ratio undefined")
    if intra_sum == 0.0:
        raise ValueError("intra-country distances are all zero; ratio undefined")
    return (inter_sum / inter_count) / (intra_sum / intra_count)
