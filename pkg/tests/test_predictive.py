import numpy as np
import pytest
from scipy import stats

from rankcop.data import Dataset
from rankcop.errors import DataError, EmptyCellError
from rankcop.numeric import make_rng
from rankcop.posterior import PosteriorSamples
from rankcop.predictive import conditional_table, sample_predictive


def _fixed(c, names, count=20):
    return PosteriorSamples(np.repeat(np.asarray(c, float)[None], count, axis=0), names)


def test_univariate_reproduces_empirical_marginal():
    data = Dataset.from_array(np.array([[1.0], [1.0], [2.0], [5.0], [5.0], [5.0], [np.nan]]))
    post = _fixed([[1.0]], data.names)
    synth = sample_predictive(post, data, make_rng(0), 10_000)
    y = synth.values[:, 0]
    levels, counts = np.unique(y, return_counts=True)
    np.testing.assert_array_equal(levels, [1.0, 2.0, 5.0])
    expected = np.array([2, 1, 3]) / 6 * y.size
    assert stats.chisquare(counts, expected).pvalue > 0.001


def test_identity_correlation_gives_independence():
    rng = np.random.default_rng(1)
    data = Dataset.from_array(np.column_stack([rng.integers(1, 4, 200), rng.integers(0, 2, 200)]).astype(float))
    synth = sample_predictive(_fixed(np.eye(2), data.names), data, make_rng(2), 20_000)
    table = np.zeros((3, 2))
    for a, b in synth.values:
        table[int(a) - 1, int(b)] += 1
    assert stats.chi2_contingency(table).pvalue > 0.001


def test_values_are_observed_levels_and_names_kept():
    data = Dataset.from_array(np.array([[0.5, 10.0], [1.5, 20.0], [2.5, np.nan], [3.5, 40.0]]), ("a", "b"))
    post = _fixed([[1.0, 0.8], [0.8, 1.0]], ("a", "b"))
    synth = sample_predictive(post, data, make_rng(3), 5000)
    assert synth.names == ("a", "b")
    assert set(np.unique(synth.values[:, 0])) <= {0.5, 1.5, 2.5, 3.5}
    assert set(np.unique(synth.values[:, 1])) <= {10.0, 20.0, 40.0}
    assert not np.isnan(synth.values).any()
    assert stats.spearmanr(synth.values[:, 0], synth.values[:, 1]).statistic > 0.5


def test_draws_mix_over_saved_matrices():
    data = Dataset.from_array(np.random.default_rng(4).standard_normal((100, 2)))
    corr = np.array([np.eye(2), [[1.0, 0.99], [0.99, 1.0]]])
    synth = sample_predictive(PosteriorSamples(corr, data.names), data, make_rng(5), 20_000)
    r = stats.spearmanr(synth.values[:, 0], synth.values[:, 1]).statistic
    assert 0.35 < r < 0.6


def test_predictive_reproducible_and_checked():
    data = Dataset.from_array(np.arange(10.0)[:, None])
    post = _fixed([[1.0]], data.names)
    a = sample_predictive(post, data, make_rng(6), 100).values
    b = sample_predictive(post, data, make_rng(6), 100).values
    np.testing.assert_array_equal(a, b)
    with pytest.raises(DataError):
        sample_predictive(_fixed([[1.0]], ("other",)), data, make_rng(6), 10)
    with pytest.raises(ValueError):
        sample_predictive(post, data, make_rng(6), 0)


def _synthetic():
    values = np.array([[1, 1], [1, 2], [1, 2], [2, 3], [2, 3], [2, 1], [3, 3]], dtype=float)
    return Dataset.from_array(values, ("deg", "inc"), labels={"deg": ("None", "HS", "Grad")})


def test_conditional_table_probabilities():
    table = conditional_table(_synthetic(), "inc", [("deg", 1)])
    assert table.count == 3
    assert table.levels == (1.0, 2.0)
    np.testing.assert_allclose(table.probabilities, [1 / 3, 2 / 3])
    assert sum(table.probabilities) == pytest.approx(1.0)
    assert table.quantiles[0.5] == 2.0
    assert table.mean == pytest.approx(5 / 3)


def test_conditional_table_accepts_labels():
    by_label = conditional_table(_synthetic(), "inc", [("deg", "HS")])
    by_code = conditional_table(_synthetic(), "inc", [("deg", 2)])
    assert (by_label.count, by_label.probabilities, by_label.mean) == (by_code.count, by_code.probabilities, by_code.mean)
    out = conditional_table(_synthetic(), "deg").to_dict(("None", "HS", "Grad"))
    assert out["levels"] == ["None", "HS", "Grad"]


def test_conditional_quantiles_are_levels():
    table = conditional_table(_synthetic(), "inc")
    assert set(table.quantiles.values()) <= {1.0, 2.0, 3.0}
    assert list(table.quantiles.values()) == sorted(table.quantiles.values())


def test_empty_cell():
    with pytest.raises(EmptyCellError) as info:
        conditional_table(_synthetic(), "inc", [("deg", "Grad"), ("inc", 1)])
    assert info.value.count == 0
    assert "matching rows: 0" in str(info.value)


def test_unknown_label_or_column():
    with pytest.raises(DataError):
        conditional_table(_synthetic(), "inc", [("deg", "PhD")])
    with pytest.raises(DataError):
        conditional_table(_synthetic(), "nope")


def test_bin_midpoint_mean():
    bins = {"1": [0, 10], "2": [10, 30], "3": [30, 50]}
    table = conditional_table(_synthetic(), "inc", [("deg", 2)], bins=bins)
    # inc levels among deg=2: {3, 3, 1}
    assert table.mean == pytest.approx((40 + 40 + 5) / 3)
    with pytest.raises(DataError):
        conditional_table(_synthetic(), "inc", bins={"1": [0, 10]})
