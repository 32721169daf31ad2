"""Geodesic distances and the two border-cost models.

Distances are great-circle kilometers on a sphere of radius
EARTH_RADIUS_KM. Border effects come in a linear flavor (a fixed extra
distance per crossing, added before distance inversion) and a non-linear
flavor (a per-border success probability raised to the number of
crossings, used directly as an edge weight).
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DisconnectedGraphError
from .graphs import SYMMETRIC, WeightMatrix

EARTH_RADIUS_KM = 6371.0

_REFERENCE_BORDERS = "country_borders_west_africa.csv"


def _latlon(point):
    lat = getattr(point, "latitude", None)
    if lat is not None:
        return float(lat), float(point.longitude)
    lat, lon = point
    return float(lat), float(lon)


def _check_bounds(lat: float, lon: float):
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude {lat} out of range [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude {lon} out of range [-180, 180]")


def haversine(a, b) -> float:
    """Great-circle distance in km between two (lat, lon) points in degrees."""
    lat1, lon1 = _latlon(a)
    lat2, lon2 = _latlon(b)
    _check_bounds(lat1, lon1)
    _check_bounds(lat2, lon2)
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dp = np.radians(lat2 - lat1)
    dl = np.radians(lon2 - lon1)
    h = np.sin(dp / 2.0) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dl / 2.0) ** 2
    return float(2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(min(h, 1.0))))


def distance_matrix(locations) -> WeightMatrix:
    """All-pairs haversine distances for >= 2 locations (zero diagonal)."""
    pts = [_latlon(p) for p in locations]
    if len(pts) < 2:
        raise ValueError("distance_matrix needs at least 2 locations")
    for lat, lon in pts:
        _check_bounds(lat, lon)
    lat = np.radians([p[0] for p in pts])
    lon = np.radians([p[1] for p in pts])
    dp = lat[:, None] - lat[None, :]
    dl = lon[:, None] - lon[None, :]
    h = np.sin(dp / 2.0) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dl / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    np.fill_diagonal(d, 0.0)
    return WeightMatrix(d, SYMMETRIC)


def invert_distances(d: WeightMatrix, multiplier: float = 1.1) -> WeightMatrix:
    """Turn distances into similarities: multiplier * max(d) minus each entry.

    With multiplier > 1 every off-diagonal weight stays strictly positive,
    so near locations get large weights and far ones small. The diagonal is
    forced back to zero.
    """
    if not d.is_symmetric:
        raise ValueError("invert_distances expects a symmetric distance matrix")
    if multiplier <= 1.0:
        raise ValueError(f"multiplier must be > 1 to keep weights positive, got {multiplier}")
    top = float(d.values.max())
    if top <= 0.0:
        raise ValueError("all distances are zero; nothing to invert")
    w = multiplier * top - d.values
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(w, SYMMETRIC)


@dataclass(frozen=True)
class CountryBorderGraph:
    """Country-level land-border adjacency (symmetric, no self-borders)."""

    countries: tuple
    adjacency: np.ndarray
    _index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        object.__setattr__(self, "adjacency", adj)
        if adj.shape != (len(self.countries), len(self.countries)):
            raise ValueError("adjacency shape does not match country count")
        if not np.array_equal(adj, adj.T):
            raise ValueError("border adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValueError("a country cannot border itself")
        index = {c.strip().casefold(): i for i, c in enumerate(self.countries)}
        if len(index) != len(self.countries):
            raise ValueError("duplicate country names in border graph")
        object.__setattr__(self, "_index", index)

    def index(self, country: str) -> int:
        try:
            return self._index[country.strip().casefold()]
        except KeyError:
            raise ValueError(f"unknown country {country!r} in border graph") from None

    @classmethod
    def from_pairs(cls, pairs) -> "CountryBorderGraph":
        names: list[str] = []
        seen: dict[str, int] = {}

        def idx(name: str) -> int:
            key = name.strip().casefold()
            if not key:
                raise ConfigError("empty country name in border pair")
            if key not in seen:
                seen[key] = len(names)
                names.append(name.strip())
            return seen[key]

        edges = [(idx(a), idx(b)) for a, b in pairs]
        adj = np.zeros((len(names), len(names)), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ConfigError(f"self-border for country {names[i]!r}")
            adj[i, j] = adj[j, i] = True
        return cls(tuple(names), adj)

    @classmethod
    def load_csv(cls, path) -> "CountryBorderGraph":
        pairs = []
        with open(path, encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                if not row or not any(cell.strip() for cell in row):
                    continue
                if len(row) != 2:
                    raise ConfigError(f"border file row must be `countryA,countryB`, got {row!r}")
                pairs.append((row[0], row[1]))
        return cls.from_pairs(pairs)


def load_reference_borders() -> CountryBorderGraph:
    """Land-border adjacency for the 21 North and West African countries shipped with the package."""
    from importlib import resources

    ref = resources.files("permap.data").joinpath(_REFERENCE_BORDERS)
    with resources.as_file(ref) as path:
        return CountryBorderGraph.load_csv(path)


def _bfs_hops(cg: CountryBorderGraph, start: int) -> np.ndarray:
    dist = np.full(len(cg.countries), -1, dtype=int)
    dist[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(cg.adjacency[u]):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def min_border_crossings(cg: CountryBorderGraph, c1: str, c2: str) -> int:
    """Fewest national borders on any country-level path between c1 and c2."""
    i, j = cg.index(c1), cg.index(c2)
    if i == j:
        return 0
    hops = _bfs_hops(cg, i)
    if hops[j] < 0:
        raise DisconnectedGraphError(f"no border path between {c1!r} and {c2!r}")
    return int(hops[j])


def crossings_matrix(locations, cg: CountryBorderGraph) -> np.ndarray:
    """Minimal border-crossing counts between every pair of locations."""
    countries = [loc if isinstance(loc, str) else loc.country for loc in locations]
    cidx = np.array([cg.index(c) for c in countries], dtype=int)
    hops = np.stack([_bfs_hops(cg, i) for i in range(len(cg.countries))])
    b = hops[cidx[:, None], cidx[None, :]]
    if (b < 0).any():
        i, j = np.argwhere(b < 0)[0]
        raise DisconnectedGraphError(
            f"no border path between {countries[i]!r} and {countries[j]!r}"
        )
    return b


def linear_border_distances(d: WeightMatrix, b: np.ndarray, cost_km: float) -> WeightMatrix:
    """Add a fixed cost per border crossing to every pairwise distance."""
    if cost_km < 0:
        raise ValueError(f"border cost must be nonnegative, got {cost_km}")
    if d.values.shape != np.asarray(b).shape:
        raise ValueError("distance and crossing matrices must have the same shape")
    return WeightMatrix(d.values + cost_km * np.asarray(b, dtype=float), SYMMETRIC)


def border_permeability_matrix(b: np.ndarray, p: float) -> WeightMatrix:
    """Edge weights p**crossings: 1 within a country, shrinking per border.

    p is the modeled per-border success probability in (0, 1]; the diagonal
    is zeroed so the matrix can be used directly as a graph.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"border success probability must be in (0, 1], got {p}")
    w = np.power(float(p), np.asarray(b, dtype=float))
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(w, SYMMETRIC)
