"""Directed attack-sequence adjacency built from per-group chronology.

Each selected group's events are ordered by date (ties fall back to input
file order) and every consecutive pair at distinct locations adds one unit
of directed weight from the earlier location to the later one. Optional
split rules partition a group into virtual sub-groups by a coordinate
half-plane before sequencing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .graphs import DIRECTED, WeightMatrix

SequenceAdjacency = WeightMatrix

_BOUNDS = {"latitude": (-90.0, 90.0), "longitude": (-180.0, 180.0)}
_COMPARATORS = ("<", ">=")


@dataclass(frozen=True)
class GroupSplitRule:
    """Rewrites a group id when an event falls in a coordinate half-plane."""

    group_id: str
    attribute: str
    comparator: str
    threshold: float
    virtual_suffix: str

    def __post_init__(self):
        if self.attribute not in _BOUNDS:
            raise ConfigError(
                f"split rule attribute must be one of {sorted(_BOUNDS)}, got {self.attribute!r}"
            )
        if self.comparator not in _COMPARATORS:
            raise ConfigError(
                f"split rule comparator must be one of {_COMPARATORS}, got {self.comparator!r}"
            )
        lo, hi = _BOUNDS[self.attribute]
        if not lo <= float(self.threshold) <= hi:
            raise ConfigError(
                f"split rule threshold {self.threshold} outside [{lo}, {hi}] for {self.attribute}"
            )
        if not self.virtual_suffix:
            raise ConfigError("split rule virtual_suffix must be non-empty")

    def matches(self, event) -> bool:
        value = getattr(event, self.attribute)
        if self.comparator == "<":
            return value < self.threshold
        return value >= self.threshold


def split_groups(events, rules) -> list:
    """Apply split rules, returning events with rewritten group ids.

    Event order is preserved. The first rule whose group and predicate both
    match wins. Rules naming groups absent from the data only warn.
    """
    rules = list(rules)
    known = {e.group_id for e in events}
    for rule in rules:
        if rule.group_id not in known:
            warnings.warn(f"split rule references unknown group {rule.group_id!r}", stacklevel=2)
    out = []
    for event in events:
        for rule in rules:
            if event.group_id == rule.group_id and rule.matches(event):
                event = replace(event, group_id=event.group_id + rule.virtual_suffix)
                break
        out.append(event)
    return out


def order_events(events, group: str) -> list:
    """A group's events in ascending date order, ties kept in file order."""
    mine = [e for e in events if e.group_id == group]
    mine.sort(key=lambda e: (e.event_date, e.source_row))
    return mine


def sequence_adjacency(events, location_of, groups, n_locations: int) -> WeightMatrix:
    """Count consecutive same-group attacks between ordered location pairs.

    `location_of` maps an event to its location id, either as a callable or
    as a dict keyed by the event's source_row. Consecutive attacks at the
    same location contribute nothing. Counts accumulate over all selected
    groups into one directed n x n integer-valued matrix.
    """
    groups = list(groups)
    if not groups:
        raise ValueError("sequence_adjacency needs at least one selected group")
    if n_locations < 1:
        raise ValueError(f"n_locations must be positive, got {n_locations}")

    if callable(location_of):
        lookup = location_of
    else:
        mapping = location_of

        def lookup(e):
            try:
                return mapping[e.source_row]
            except KeyError:
                raise ValueError(f"event at line {e.source_row} has no location") from None

    present = {e.group_id for e in events}
    counts = np.zeros((n_locations, n_locations))
    for group in groups:
        if group not in present:
            warnings.warn(f"selected group {group!r} has no events", stacklevel=2)
            continue
        ordered = order_events(events, group)
        locs = [lookup(e) for e in ordered]
        for a, b in zip(locs, locs[1:]):
            if a != b:
                counts[a, b] += 1.0
    return WeightMatrix(counts, DIRECTED)
