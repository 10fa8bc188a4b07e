"""Key-candidate filter, name affinity, scoring, and selection."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from joininfer.catalog import TypeTag
from joininfer.pk import (
    KeyCandidate,
    ScoreWeights,
    find_key_candidates,
    has_suffix,
    key_score,
    make_candidate,
    name_distance,
    passes_filter,
    select_primary_key,
)
from joininfer.profiler import ColumnStats


def stats(count, distinct, table="t", column="c", exact=True):
    return ColumnStats(
        table=table, column=column, count=count, distinct=distinct,
        is_exact=exact, type_tag=TypeTag.INTEGER_SIGNED,
    )


class TestFilter:
    def test_perfectly_unique_passes(self):
        assert passes_filter(stats(100, 100), max_distinct=100, x=0.95)

    def test_below_count_band_excluded(self):
        # distinct 90 < 0.95 * 100
        assert not passes_filter(stats(100, 90), max_distinct=100, x=0.95)

    def test_sketch_overshoot_tolerated(self):
        # distinct 104 <= (2 - 0.95) * 100 = 105
        assert passes_filter(stats(100, 104, exact=False), max_distinct=104, x=0.95)

    def test_overshoot_beyond_band_excluded(self):
        assert not passes_filter(stats(100, 106, exact=False), max_distinct=106, x=0.95)

    def test_below_max_distinct_band_excluded(self):
        # distinct == count but another column has far more distincts
        assert not passes_filter(stats(50, 50), max_distinct=100, x=0.95)

    def test_empty_column_excluded(self):
        assert not passes_filter(stats(0, 0), max_distinct=0, x=0.95)

    def test_find_candidates_empty_stats_raises(self):
        with pytest.raises(ValueError):
            find_key_candidates([])

    @given(
        st.integers(min_value=0, max_value=10_000),
        st.integers(min_value=0, max_value=11_000),
        st.integers(min_value=0, max_value=11_000),
    )
    def test_membership_recheckable_verbatim(self, count, distinct, max_d):
        x = 0.95
        expected = (
            count > 0
            and distinct >= x * count
            and distinct <= (2 - x) * count
            and distinct >= x * max_d
            and distinct <= (2 - x) * max_d
        )
        assert passes_filter(stats(count, distinct), max_d, x) == expected


class TestNameDistance:
    def test_containment_is_one(self):
        # "id" is a substring of normalized "saleid"... table side holds it
        assert name_distance("customers", "customer") == 1.0

    def test_part_partkey_frozen(self):
        # LCS("part", "ppartkey") = "part" (4) / len("part") = 1.0
        assert name_distance("part", "p_partkey") == 1.0

    def test_asymmetry(self):
        # denominator is the table-name length, so the score is directional
        assert name_distance("orders", "order_date") == pytest.approx(5 / 6)
        assert name_distance("order_date", "orders") == pytest.approx(5 / 9)

    def test_no_overlap_zero(self):
        assert name_distance("orders", "xyz") == 0.0

    def test_normalization(self):
        assert name_distance("Order-Items", "ORDER_ITEMS_ID") == 1.0

    @given(st.text(max_size=20), st.text(max_size=20))
    def test_bounded(self, a, b):
        assert 0.0 <= name_distance(a, b) <= 1.0


class TestKeyScore:
    def test_frozen_arithmetic_key_suffix(self):
        # nd=1, ratio=1, ends "key" -> 1 + 1 + 0 + 0.5 = 2.5
        assert key_score(1.0, 1.0, False, True) == pytest.approx(2.5)

    def test_frozen_arithmetic_id_suffix(self):
        # nd=0.5, ratio=0.97, ends "id" -> 2.47
        assert key_score(0.5, 0.97, True, False) == pytest.approx(2.47)

    def test_zero_case(self):
        assert key_score(0.0, 0.0, False, False) == 0.0

    def test_suffix_split(self):
        assert has_suffix("order_id", ("id",))
        assert has_suffix("o_orderkey", ("key", "nr"))
        assert has_suffix("kundennr", ("key", "nr"))
        assert not has_suffix("order_id", ("key", "nr"))

    def test_monotone_in_distinct_ratio(self):
        assert key_score(0.3, 0.9, True, False) > key_score(0.3, 0.5, True, False)

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
        st.booleans(),
        st.booleans(),
        st.floats(min_value=0.01, max_value=100),
    )
    def test_weight_scaling_preserves_ranking(self, nd, ratio, sid, skey, scale):
        w = ScoreWeights()
        scaled = ScoreWeights(
            name_distance=w.name_distance * scale,
            distinct_ratio=w.distinct_ratio * scale,
            suffix_id=w.suffix_id * scale,
            suffix_key=w.suffix_key * scale,
        )
        a = key_score(nd, ratio, sid, skey, w)
        b = key_score(nd, ratio, sid, skey, scaled)
        assert b == pytest.approx(a * scale, rel=1e-9)


def cand(column, score, table="t"):
    return KeyCandidate(
        table=table, column=column, stats=stats(10, 10, table, column),
        name_distance=0, distinct_ratio=0, suffix_id=False, suffix_key=False,
        key_score=score,
    )


class TestSelect:
    def test_clear_winner(self):
        d = select_primary_key([cand("a", 2.5), cand("b", 1.0)])
        assert d.clear_winner and d.selected == "a"
        assert d.pool_columns() == ["a"]

    def test_near_tie_pool(self):
        d = select_primary_key([cand("a", 2.5), cand("b", 2.4), cand("c", 2.3)])
        assert not d.clear_winner and d.selected is None
        assert d.pool_columns() == ["a", "b", "c"]

    def test_empty_no_key(self):
        d = select_primary_key([], table="t")
        assert d.selected is None and d.pool == []

    def test_pool_capped_at_three(self):
        d = select_primary_key([cand(c, 2.0) for c in "abcd"])
        assert len(d.pool) == 3

    def test_tie_break_shorter_then_lexicographic(self):
        d = select_primary_key([cand("bb", 2.0), cand("a", 2.0), cand("c", 2.0)])
        assert d.pool_columns() == ["a", "c", "bb"]

    def test_boundary_exactly_at_ratio_joins_pool(self):
        d = select_primary_key([cand("a", 1.0), cand("b", 0.9)])
        assert not d.clear_winner and len(d.pool) == 2

    @given(st.lists(st.floats(min_value=0, max_value=5), max_size=6))
    def test_pool_sorted_descending(self, scores):
        d = select_primary_key([cand(f"c{i}", s) for i, s in enumerate(scores)])
        pool_scores = [c.key_score for c in d.pool]
        assert pool_scores == sorted(pool_scores, reverse=True)
        if d.clear_winner:
            assert d.selected == d.pool[0].column


class TestMakeCandidate:
    def test_distinct_ratio_clipped(self):
        c = make_candidate(stats(100, 104, exact=False))
        assert c.distinct_ratio == 1.0

    def test_benchmark_pk_filter(self, tpch_result):
        # every declared key column of the benchmark passes the filter
        for table, column in [
            ("region", "r_regionkey"), ("nation", "n_nationkey"),
            ("supplier", "s_suppkey"), ("part", "p_partkey"),
            ("customer", "c_custkey"), ("orders", "o_orderkey"),
        ]:
            table_stats = [
                s for (t, _), s in tpch_result.stats.items() if t == table
            ]
            max_d = max(s.distinct for s in table_stats)
            col_stats = tpch_result.stats[(table, column)]
            assert passes_filter(col_stats, max_d, 0.95), (table, column)
