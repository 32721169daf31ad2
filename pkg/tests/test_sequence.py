from datetime import date

import numpy as np
import pytest

from conftest import make_event
from oracles import brute_force_sequence
from permap.errors import ConfigError
from permap.graphs import DIRECTED
from permap.sequence import GroupSplitRule, order_events, sequence_adjacency, split_groups


def rule(group="G", attribute="latitude", comparator="<", threshold=27.9, suffix="-south"):
    return GroupSplitRule(group, attribute, comparator, threshold, suffix)


class TestGroupSplitRule:
    def test_valid_rule_matches_half_plane(self):
        r = rule()
        assert r.matches(make_event(1, lat=10.0))
        assert not r.matches(make_event(2, lat=27.9))
        assert not r.matches(make_event(3, lat=30.0))

    def test_ge_comparator(self):
        r = rule(comparator=">=")
        assert r.matches(make_event(1, lat=27.9))
        assert not r.matches(make_event(2, lat=27.89))

    def test_longitude_attribute(self):
        r = rule(attribute="longitude", threshold=5.0)
        assert r.matches(make_event(1, lon=4.0))
        assert not r.matches(make_event(2, lon=5.0))

    def test_invalid_fields_rejected(self):
        with pytest.raises(ConfigError, match="attribute"):
            rule(attribute="altitude")
        with pytest.raises(ConfigError, match="comparator"):
            rule(comparator="<=")
        with pytest.raises(ConfigError, match="threshold"):
            rule(threshold=95.0)
        with pytest.raises(ConfigError, match="threshold"):
            rule(attribute="longitude", threshold=-181.0)
        with pytest.raises(ConfigError, match="suffix"):
            rule(suffix="")


class TestSplitGroups:
    def test_rewrites_matching_events_only(self):
        events = [
            make_event(1, group="G", lat=10.0),
            make_event(2, group="G", lat=30.0),
            make_event(3, group="H", lat=10.0),
        ]
        out = split_groups(events, [rule()])
        assert [e.group_id for e in out] == ["G-south", "G", "H"]

    def test_order_and_other_fields_preserved(self):
        events = [make_event(i, group="G", lat=float(i)) for i in range(1, 6)]
        out = split_groups(events, [rule(threshold=3.0)])
        assert [e.source_row for e in out] == [1, 2, 3, 4, 5]
        assert out[0].latitude == 1.0 and out[0].event_date == events[0].event_date

    def test_first_matching_rule_wins(self):
        events = [make_event(1, group="G", lat=5.0)]
        out = split_groups(events, [rule(suffix="-a"), rule(suffix="-b")])
        assert out[0].group_id == "G-a"

    def test_unknown_group_warns(self):
        events = [make_event(1, group="G")]
        with pytest.warns(UserWarning, match="unknown group 'Z'"):
            out = split_groups(events, [rule(group="Z")])
        assert out[0].group_id == "G"

    def test_no_rules_is_identity(self):
        events = [make_event(1), make_event(2)]
        assert split_groups(events, []) == events


class TestOrderEvents:
    def test_sorts_by_date(self):
        events = [
            make_event(1, when=date(2024, 3, 1)),
            make_event(2, when=date(2024, 1, 5)),
            make_event(3, when=date(2024, 2, 10)),
        ]
        assert [e.source_row for e in order_events(events, "G")] == [2, 3, 1]

    def test_date_ties_keep_file_order(self):
        events = [
            make_event(9, when=date(2024, 1, 1)),
            make_event(2, when=date(2024, 1, 1)),
            make_event(5, when=date(2024, 1, 1)),
        ]
        assert [e.source_row for e in order_events(events, "G")] == [2, 5, 9]

    def test_filters_to_named_group(self):
        events = [make_event(1, group="G"), make_event(2, group="H")]
        assert [e.source_row for e in order_events(events, "H")] == [2]

    def test_matches_independent_sort(self):
        rng = np.random.default_rng(13)
        events = []
        for row in range(1, 41):
            events.append(
                make_event(
                    row,
                    group=f"G{rng.integers(0, 3)}",
                    when=date(2024, 1, int(rng.integers(1, 28))),
                )
            )
        shuffled = list(events)
        rng.shuffle(shuffled)
        for g in ("G0", "G1", "G2"):
            got = [e.source_row for e in order_events(events, g)]
            want = sorted(
                ((e.event_date, e.source_row) for e in shuffled if e.group_id == g),
            )
            assert got == [row for _, row in want]


class TestSequenceAdjacency:
    def test_back_and_forth_pair(self):
        events = [
            make_event(1, when=date(2024, 1, 1)),
            make_event(2, when=date(2024, 1, 2)),
            make_event(3, when=date(2024, 1, 3)),
        ]
        loc = {1: 0, 2: 1, 3: 0}
        a = sequence_adjacency(events, loc, ["G"], 2)
        assert a.kind == DIRECTED
        assert np.array_equal(a.values, [[0.0, 1.0], [1.0, 0.0]])

    def test_repeated_pair_accumulates(self):
        base = date(2024, 1, 1).toordinal()
        events = [
            make_event(row, when=date.fromordinal(base + row - 1)) for row in range(1, 33)
        ]
        loc = {row: (row + 1) % 2 for row in range(1, 33)}
        a = sequence_adjacency(events, loc, ["G"], 2).values
        assert a[0, 1] == 16.0 and a[1, 0] == 15.0

    def test_same_location_pairs_skipped(self):
        events = [make_event(i, when=date(2024, 1, i)) for i in range(1, 4)]
        a = sequence_adjacency(events, {1: 0, 2: 0, 3: 0}, ["G"], 1)
        assert np.array_equal(a.values, np.zeros((1, 1)))

    def test_two_group_fixture_matches_oracle(self):
        events = [
            make_event(1, group="G", when=date(2024, 1, 1)),
            make_event(2, group="H", when=date(2024, 1, 1)),
            make_event(3, group="G", when=date(2024, 1, 2)),
            make_event(4, group="H", when=date(2024, 1, 3)),
            make_event(5, group="G", when=date(2024, 1, 3)),
            make_event(6, group="H", when=date(2024, 1, 4)),
            make_event(7, group="G", when=date(2024, 1, 5)),
            make_event(8, group="H", when=date(2024, 1, 5)),
            make_event(9, group="G", when=date(2024, 1, 6)),
        ]
        loc = {1: 0, 2: 2, 3: 1, 4: 0, 5: 2, 6: 1, 7: 0, 8: 2, 9: 1}
        got = sequence_adjacency(events, loc, ["G", "H"], 3).values
        want = brute_force_sequence(events, loc, ["G", "H"], 3)
        assert np.array_equal(got, want)
        # G walks 0 -> 1 -> 2 -> 0 -> 1, H walks 2 -> 0 -> 1 -> 2
        assert got[0, 1] == 3.0 and got[1, 2] == 2.0 and got[2, 0] == 2.0

    def test_random_logs_match_oracle_with_weight_identity(self):
        rng = np.random.default_rng(101)
        for _ in range(30):
            n_events = int(rng.integers(2, 50))
            n_groups = int(rng.integers(1, 6))
            n_locs = int(rng.integers(2, 8))
            events, loc = [], {}
            for row in range(1, n_events + 1):
                events.append(
                    make_event(
                        row,
                        group=f"G{rng.integers(0, n_groups)}",
                        when=date(2024, 1 + int(rng.integers(0, 12)), 1 + int(rng.integers(0, 28))),
                    )
                )
                loc[row] = int(rng.integers(0, n_locs))
            groups = [f"G{i}" for i in range(n_groups)]
            present = {e.group_id for e in events}
            groups = [g for g in groups if g in present]
            got = sequence_adjacency(events, loc, groups, n_locs).values
            want = np.array(brute_force_sequence(events, loc, groups, n_locs), dtype=float)
            assert np.array_equal(got, want)
            moves = 0
            for g in groups:
                ordered = order_events(events, g)
                moves += sum(
                    1
                    for a, b in zip(ordered, ordered[1:])
                    if loc[a.source_row] != loc[b.source_row]
                )
            assert got.sum() == moves

    def test_input_order_does_not_matter(self):
        rng = np.random.default_rng(7)
        events = [
            make_event(row, when=date(2024, 1, 1 + int(rng.integers(0, 20))))
            for row in range(1, 21)
        ]
        loc = {row: int(rng.integers(0, 4)) for row in range(1, 21)}
        a = sequence_adjacency(events, loc, ["G"], 4).values
        shuffled = list(events)
        rng.shuffle(shuffled)
        b = sequence_adjacency(shuffled, loc, ["G"], 4).values
        assert np.array_equal(a, b)

    def test_callable_lookup(self):
        events = [make_event(i, when=date(2024, 1, i)) for i in range(1, 4)]
        a = sequence_adjacency(events, lambda e: e.source_row % 2, ["G"], 2).values
        assert a[1, 0] == 1.0 and a[0, 1] == 1.0

    def test_missing_location_named_by_line(self):
        events = [make_event(1, when=date(2024, 1, 1)), make_event(7, when=date(2024, 1, 2))]
        with pytest.raises(ValueError, match="line 7"):
            sequence_adjacency(events, {1: 0}, ["G"], 2)

    def test_empty_group_selection_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            sequence_adjacency([make_event(1)], {1: 0}, [], 1)

    def test_group_without_events_warns(self):
        events = [make_event(1), make_event(2, when=date(2024, 1, 2))]
        with pytest.warns(UserWarning, match="'Z' has no events"):
            a = sequence_adjacency(events, {1: 0, 2: 1}, ["G", "Z"], 2)
        assert a.values[0, 1] == 1.0
