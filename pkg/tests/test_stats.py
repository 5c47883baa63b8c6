"""Tests for rank statistics, analysis bins, and the stratified tables."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from transfluency.stats import (
    SIGNIFICANCE_LEVEL,
    STRATA_ORDER,
    AnalysisBins,
    AnalysisRow,
    CorrelationResult,
    headline_correlations,
    partial_spearman,
    pool_human_rows,
    rankdata,
    spearman,
    stratified_analysis,
)


def rank_oracle(a):
    """Fractional rank of a_i = 1 + #smaller + half the count of equal others."""
    a = np.asarray(a, dtype=np.float64)
    out = np.empty(len(a))
    for i, v in enumerate(a):
        smaller = int((a < v).sum())
        equal_others = int((a == v).sum()) - 1
        out[i] = 1.0 + smaller + equal_others / 2.0
    return out


class TestRankdata:
    def test_distinct_values(self):
        np.testing.assert_array_equal(rankdata([3.0, 1.0, 2.0]), [3.0, 1.0, 2.0])

    def test_tie_group_averages(self):
        np.testing.assert_array_equal(
            rankdata([1.0, 2.0, 2.0, 3.0]), [1.0, 2.5, 2.5, 4.0]
        )

    def test_all_equal(self):
        np.testing.assert_array_equal(rankdata([5.0, 5.0, 5.0]), [2.0, 2.0, 2.0])

    def test_matches_counting_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 50))
            a = rng.integers(0, 10, size=n).astype(np.float64)
            np.testing.assert_allclose(rankdata(a), rank_oracle(a), atol=1e-12)

    def test_matches_scipy(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            a = rng.integers(0, 6, size=int(rng.integers(2, 40))).astype(float)
            np.testing.assert_allclose(
                rankdata(a), scipy.stats.rankdata(a, method="average"), atol=0
            )

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            rankdata([1.0, np.nan])
        with pytest.raises(ValueError, match="finite"):
            rankdata([1.0, np.inf])

    def test_two_dimensional_rejected(self):
        with pytest.raises(ValueError, match="1-D"):
            rankdata(np.zeros((2, 2)))

    @given(
        st.lists(
            st.integers(min_value=-5, max_value=5), min_size=1, max_size=30
        )
    )
    @settings(max_examples=80, deadline=None)
    def test_rank_sum_invariant(self, values):
        # fractional ranks always sum to n(n+1)/2
        n = len(values)
        assert rankdata([float(v) for v in values]).sum() == pytest.approx(
            n * (n + 1) / 2
        )


class TestSpearman:
    def test_monotone_transform_invariance(self):
        x = np.linspace(0.0, 3.0, 25)
        res = spearman(x, np.exp(x))
        assert res.rho == pytest.approx(1.0)
        assert res.p_value == pytest.approx(0.0, abs=1e-12)

    def test_reversal(self):
        x = np.arange(10.0)
        assert spearman(x, -x).rho == pytest.approx(-1.0)

    def test_matches_scipy_with_ties(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(3, 60))
            x = rng.integers(0, 8, size=n).astype(float)
            y = rng.integers(0, 8, size=n).astype(float)
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            ours = spearman(x, y)
            want_rho, want_p = scipy.stats.spearmanr(x, y)
            assert ours.rho == pytest.approx(want_rho, abs=1e-12)
            assert ours.p_value == pytest.approx(want_p, abs=1e-9)

    def test_zero_variance_noted_not_raised(self):
        res = spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        assert np.isnan(res.rho)
        assert res.note == "zero variance in ranks"
        assert not res.defined
        assert not res.significant

    def test_too_few_observations_rejected(self):
        with pytest.raises(ValueError, match="at least 3"):
            spearman([1.0, 2.0], [1.0, 2.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="equal length"):
            spearman([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_names_recorded(self):
        res = spearman([1.0, 2.0, 3.0], [1.0, 3.0, 2.0], "len", "score")
        assert res.variables == ("len", "score")
        assert res.controlled_for is None

    def test_permutation_p_deterministic_and_bounded(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=12)
        y = rng.normal(size=12)
        a = spearman(x, y, p_method="permutation", n_permutations=500, seed=7)
        b = spearman(x, y, p_method="permutation", n_permutations=500, seed=7)
        assert a.p_value == b.p_value
        assert 1 / 501 <= a.p_value <= 1.0

    def test_permutation_p_small_for_strong_effect(self):
        x = np.arange(20.0)
        res = spearman(x, x + 0.01, p_method="permutation", n_permutations=400, seed=0)
        assert res.p_value == pytest.approx(1 / 401)


def partial_rank_residual_oracle(x, y, z):
    """Residualize ranks of x and y on ranks of z, then Pearson-correlate."""
    rx, ry, rz = rankdata(x), rankdata(y), rankdata(z)
    zc = np.column_stack([np.ones(len(rz)), rz])
    ex = rx - zc @ np.linalg.lstsq(zc, rx, rcond=None)[0]
    ey = ry - zc @ np.linalg.lstsq(zc, ry, rcond=None)[0]
    return float(np.dot(ex, ey) / np.sqrt(np.dot(ex, ex) * np.dot(ey, ey)))


class TestPartialSpearman:
    def test_matches_residualization_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(80):
            n = int(rng.integers(4, 80))
            z = rng.normal(size=n)
            x = 0.5 * z + rng.normal(size=n)
            y = -0.3 * z + rng.normal(size=n)
            res = partial_spearman(x, y, z)
            assert res.rho == pytest.approx(
                partial_rank_residual_oracle(x, y, z), abs=1e-10
            )

    def test_oracle_agreement_with_ties(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            n = int(rng.integers(6, 40))
            x = rng.integers(0, 5, size=n).astype(float)
            y = rng.integers(0, 5, size=n).astype(float)
            z = rng.integers(0, 5, size=n).astype(float)
            if min(len(set(x)), len(set(y)), len(set(z))) < 2:
                continue
            res = partial_spearman(x, y, z)
            if not res.defined:
                continue
            assert res.rho == pytest.approx(
                partial_rank_residual_oracle(x, y, z), abs=1e-10
            )

    def test_identical_variables_correlate_fully(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=20)
        z = rng.normal(size=20)
        assert partial_spearman(x, x, z).rho == pytest.approx(1.0)

    def test_symmetric_in_x_and_y(self):
        rng = np.random.default_rng(7)
        x, y, z = rng.normal(size=(3, 30))
        assert partial_spearman(x, y, z).rho == pytest.approx(
            partial_spearman(y, x, z).rho, abs=1e-14
        )

    def test_confound_removed(self):
        # y follows z only; controlling z must collapse the marginal correlation
        rng = np.random.default_rng(8)
        z = rng.normal(size=300)
        x = z + 0.3 * rng.normal(size=300)
        y = z + 0.3 * rng.normal(size=300)
        marginal = spearman(x, y).rho
        partial = partial_spearman(x, y, z).rho
        assert marginal > 0.7
        assert abs(partial) < 0.2

    def test_degenerate_control_noted(self):
        x = np.arange(10.0)
        y = np.array([3.0, 1, 4, 1, 5, 9, 2, 6, 5, 3])
        res = partial_spearman(x, y, x)
        assert res.note == "degenerate control variable"
        assert not res.defined

    def test_constant_control_noted(self):
        x = np.arange(10.0)
        y = x[::-1].copy()
        res = partial_spearman(x, y, np.ones(10))
        assert res.note == "zero variance in ranks"

    def test_too_few_observations_rejected(self):
        with pytest.raises(ValueError, match="at least 4"):
            partial_spearman([1.0, 2, 3], [1.0, 2, 3], [1.0, 2, 3])

    def test_t_p_value_uses_n_minus_3(self):
        rng = np.random.default_rng(9)
        x, y, z = rng.normal(size=(3, 25))
        res = partial_spearman(x, y, z)
        t = abs(res.rho) * np.sqrt((25 - 3) / (1 - res.rho**2))
        want = 2 * scipy.stats.t.sf(t, df=25 - 3)
        assert res.p_value == pytest.approx(want, abs=1e-12)

    def test_permutation_p_deterministic(self):
        rng = np.random.default_rng(10)
        x, y, z = rng.normal(size=(3, 15))
        a = partial_spearman(x, y, z, p_method="permutation", n_permutations=300, seed=1)
        b = partial_spearman(x, y, z, p_method="permutation", n_permutations=300, seed=1)
        assert a.p_value == b.p_value
        assert 1 / 301 <= a.p_value <= 1.0


class TestCorrelationResult:
    def test_significance_threshold(self):
        base = dict(n=10, variables=("a", "b"))
        assert CorrelationResult(rho=0.5, p_value=0.049, **base).significant
        assert not CorrelationResult(rho=0.5, p_value=0.05, **base).significant
        assert SIGNIFICANCE_LEVEL == 0.05

    def test_noted_result_never_significant(self):
        res = CorrelationResult(
            rho=float("nan"), p_value=float("nan"), n=5,
            variables=("a", "b"), note="zero variance in ranks",
        )
        assert not res.significant


class TestAnalysisBins:
    def test_default_labels(self):
        assert AnalysisBins().labels() == ["20-30", "31-60", "61-100", "101+"]

    @pytest.mark.parametrize(
        "wc,want",
        [
            (19, None),
            (19.999, None),
            (20, 0),
            (30, 0),
            (30.5, 0),
            (31, 1),
            (60, 1),
            (60.2, 1),
            (61, 2),
            (100, 2),
            (100.9, 2),
            (101, 3),
            (100000, 3),
        ],
    )
    def test_bin_of(self, wc, want):
        assert AnalysisBins().bin_of(wc) == want

    def test_from_spec_round_trip(self):
        bins = AnalysisBins.from_spec("20-30,31-60,61-100,101+")
        assert bins == AnalysisBins()

    def test_from_spec_custom(self):
        bins = AnalysisBins.from_spec("1-9,10+")
        assert bins.labels() == ["1-9", "10+"]
        assert bins.bin_of(9.5) == 0

    def test_gap_rejected(self):
        with pytest.raises(ValueError, match="contiguous"):
            AnalysisBins(intervals=((20, 30), (32, None)))

    def test_bounded_last_interval_rejected(self):
        with pytest.raises(ValueError, match="unbounded"):
            AnalysisBins(intervals=((20, 30),))

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError, match="empty interval"):
            AnalysisBins(intervals=((30, 20), (21, None)))


def row(record_id, source_type="llm", wc=50.0, fluency=0.5, comet=0.7,
        group_key="", align=None):
    return AnalysisRow(
        record_id=record_id,
        source_type=source_type,
        word_count=wc,
        fluency=fluency,
        comet_kiwi=comet,
        group_key=group_key,
        align_sim=align,
    )


class TestPoolHumanRows:
    def test_means_per_group(self):
        rows = [
            row("a", "human", wc=40, fluency=0.2, comet=0.6, group_key="g1"),
            row("b", "human", wc=60, fluency=0.4, comet=0.8, group_key="g1"),
            row("c", "human", wc=30, fluency=0.9, comet=0.5, group_key="g2"),
        ]
        pooled = pool_human_rows(rows)
        assert [p.record_id for p in pooled] == ["pooled:g1", "pooled:g2"]
        g1 = pooled[0]
        assert g1.source_type == "pooled-human"
        assert g1.word_count == pytest.approx(50.0)
        assert g1.fluency == pytest.approx(0.3)
        assert g1.comet_kiwi == pytest.approx(0.7)

    def test_non_human_rows_ignored(self):
        rows = [row("a", "google", group_key="g1"), row("b", "llm", group_key="g1")]
        assert pool_human_rows(rows) == []

    def test_missing_group_key_falls_back_to_record_id(self):
        rows = [row("a", "human"), row("b", "human")]
        pooled = pool_human_rows(rows)
        assert [p.record_id for p in pooled] == ["pooled:a", "pooled:b"]


def planted_rows(n_per_source=120, seed=11):
    """Human rows with positive and llm rows with negative fluency-adequacy links."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_per_source):
        wc = float(rng.integers(20, 180))
        f = float(rng.uniform(0, 1))
        rows.append(
            row(f"h{i}", "human", wc=wc, fluency=f,
                comet=0.5 + 0.4 * f + float(rng.normal(0, 0.02)),
                group_key=f"k{i}")
        )
        wc = float(rng.integers(20, 180))
        f = float(rng.uniform(0, 1))
        rows.append(
            row(f"l{i}", "llm", wc=wc, fluency=f,
                comet=0.9 - 0.4 * f + float(rng.normal(0, 0.02)))
        )
    return rows


class TestStratifiedAnalysis:
    def test_planted_signs_recovered(self):
        results, _ = stratified_analysis(planted_rows())
        by_stratum = {r.stratum: r for r in results}
        human = by_stratum[("human", "all")]
        llm = by_stratum[("llm", "all")]
        assert human.rho > 0.8 and human.significant
        assert llm.rho < -0.8 and llm.significant

    def test_every_stratum_accounted_for(self):
        bins = AnalysisBins()
        results, skipped = stratified_analysis(planted_rows(), bins)
        n_cells = len(STRATA_ORDER) * (len(bins.labels()) + 1)
        assert len(results) + len(skipped) == n_cells

    def test_small_strata_skipped_with_reason(self):
        rows = [row(f"g{i}", "google", wc=25.0, fluency=i / 10, comet=0.5 + i / 100)
                for i in range(3)]
        results, skipped = stratified_analysis(rows)
        assert ("google", "all", 3, "n < 4") in skipped
        assert all(r.stratum[0] != "google" for r in results)

    def test_bin_membership_respected(self):
        rows = planted_rows()
        bins = AnalysisBins()
        results, _ = stratified_analysis(rows, bins)
        for r in results:
            source, label = r.stratum
            if label == "all" or source != "all":
                continue
            idx = bins.labels().index(label)
            want_n = sum(1 for x in rows if bins.bin_of(x.word_count) == idx)
            assert r.n == want_n

    def test_pooled_human_uses_averaged_rows(self):
        # two variants per key: pooling halves the observation count
        rows = []
        rng = np.random.default_rng(12)
        for i in range(40):
            f = float(rng.uniform(0, 1))
            for v in ("a", "b"):
                rows.append(
                    row(f"h{i}{v}", "human", wc=float(rng.integers(20, 60)),
                        fluency=f + float(rng.normal(0, 0.01)),
                        comet=0.5 + 0.3 * f, group_key=f"k{i}")
                )
        results, _ = stratified_analysis(rows)
        by_stratum = {r.stratum: r for r in results}
        assert by_stratum[("human", "all")].n == 80
        assert by_stratum[("pooled-human", "all")].n == 40


class TestHeadlineCorrelations:
    def test_expected_summary_set_present(self):
        rng = np.random.default_rng(13)
        rows = planted_rows()
        rows = [
            AnalysisRow(
                record_id=r.record_id, source_type=r.source_type,
                word_count=r.word_count, fluency=r.fluency,
                comet_kiwi=r.comet_kiwi, group_key=r.group_key,
                align_sim=float(rng.uniform(0.5, 1.0)),
            )
            for r in rows
        ]
        out = headline_correlations(rows)
        keys = {(r.variables, r.controlled_for, r.stratum) for r in out}
        assert (("fluency", "comet_kiwi"), None, ("all", "all")) in keys
        assert (("fluency", "comet_kiwi"), None, ("all", "<100")) in keys
        assert (("fluency", "comet_kiwi"), None, ("all", ">=100")) in keys
        assert (("word_count", "comet_kiwi"), None, ("all", "all")) in keys
        assert (("word_count", "fluency"), None, ("all", "all")) in keys
        assert (("word_count", "align_sim"), None, ("all", "all")) in keys
        assert (("fluency", "comet_kiwi"), "word_count", ("all", "all")) in keys
        assert (("fluency", "comet_kiwi"), "word_count", ("human", "all")) in keys
        assert (("fluency", "comet_kiwi"), "word_count", ("pooled-human", "all")) in keys
        assert (("fluency", "comet_kiwi"), "word_count", ("llm", "all")) in keys

    def test_sparse_sources_omitted(self):
        rows = planted_rows(n_per_source=5)
        out = headline_correlations(rows)
        strata = {r.stratum for r in out}
        assert ("google", "all") not in strata

    def test_no_align_sim_no_alignment_row(self):
        out = headline_correlations(planted_rows())
        assert all(r.variables != ("word_count", "align_sim") for r in out)
