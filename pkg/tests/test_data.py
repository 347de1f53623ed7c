import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankcop.data import (
    MISSING_CODE,
    Dataset,
    EmpiricalMarginal,
    ObservedColumn,
    empirical_quantile,
    load_csv,
    normal_scores,
    write_csv,
)
from rankcop.errors import DataError, ParseError
from rankcop.numeric import normal_quantile


@pytest.fixture
def write(tmp_path):
    def _write(text, name="d.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


def test_load_levels_and_codes(write):
    ds = load_csv(write("x\n3.2\n1.1\n3.2\n"))
    col = ds.column("x")
    np.testing.assert_array_equal(col.levels, [1.1, 3.2])
    np.testing.assert_array_equal(col.codes, [2, 1, 2])
    assert (ds.n, ds.p) == (3, 1)


def test_load_missing_token(write):
    ds = load_csv(write("a,b\n1,NA\n2,5\nNA,4\n"))
    a, b = ds.columns
    assert np.isnan(a.values[2]) and np.isnan(b.values[0])
    np.testing.assert_array_equal(a.levels, [1, 2])
    np.testing.assert_array_equal(b.codes, [MISSING_CODE, 2, 1])


def test_custom_missing_token(write):
    ds = load_csv(write("a\n1\n.\n3\n"), missing=".")
    assert np.isnan(ds.column("a").values[1])


def test_round_trip_is_cell_identical(write, tmp_path):
    text = "a,b,c\n1,0.25,NA\n-3,1e-07,2\n17,2.5,4\n"
    src = write(text)
    out = tmp_path / "out.csv"
    write_csv(load_csv(src), out)
    assert out.read_text() == "a,b,c\n1,0.25,NA\n-3,1e-07,2\n17,2.5,4\n"
    again = load_csv(out)
    np.testing.assert_array_equal(again.values, load_csv(src).values)


def test_parse_error_location(write):
    with pytest.raises(ParseError) as info:
        load_csv(write("a,b\n1,2\n3,oops\n"))
    assert info.value.row == 3 and info.value.column == "b"
    assert "oops" in str(info.value)


def test_ragged_row(write):
    with pytest.raises(ParseError, match="row 2"):
        load_csv(write("a,b\n1\n"))


def test_all_missing_column(write):
    with pytest.raises(DataError, match="b"):
        load_csv(write("a,b\n1,NA\n2,NA\n"))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="nope.csv"):
        load_csv(tmp_path / "nope.csv")


def test_text_column_needs_level_order(write, tmp_path):
    path = write("deg,inc\nHS,10\nNone,5\nGrad,40\nHS,NA\n")
    with pytest.raises(ParseError, match="level order"):
        load_csv(path)
    sidecar = tmp_path / "levels.json"
    sidecar.write_text(json.dumps({"deg": ["None", "HS", "Bach", "Grad"]}))
    ds = load_csv(path, level_orders=sidecar)
    deg = ds.column("deg")
    np.testing.assert_array_equal(deg.values, [2, 1, 4, 2])
    np.testing.assert_array_equal(deg.codes, [2, 1, 3, 2])
    out = tmp_path / "o.csv"
    write_csv(ds, out)
    assert out.read_text().splitlines()[1:4] == ["HS,10", "None,5", "Grad,40"]


def test_unknown_label_rejected(write):
    with pytest.raises(ParseError, match="PhD"):
        load_csv(write("deg\nHS\nPhD\n"), level_orders={"deg": ["HS", "Grad"]})


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset.from_array(np.array([[1.0, np.nan], [2.0, np.nan]]))
    with pytest.raises(DataError):
        Dataset((ObservedColumn.from_values("a", [1, 2]), ObservedColumn.from_values("b", [1])))
    empty = Dataset.from_array(np.empty((0, 3)))
    assert (empty.n, empty.p) == (0, 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.none(), st.integers(-5, 5).map(float), st.floats(-1e6, 1e6)), min_size=1, max_size=60))
def test_codes_are_order_isomorphic(raw):
    values = np.array([np.nan if v is None else v for v in raw])
    col = ObservedColumn.from_values("x", values)
    obs = np.flatnonzero(~np.isnan(values))
    assert np.all(np.diff(col.levels) > 0)
    for i in obs:
        for k in obs:
            assert (values[i] < values[k]) == (col.codes[i] < col.codes[k])
            assert (values[i] == values[k]) == (col.codes[i] == col.codes[k])


def test_level_groups_partition_rows():
    col = ObservedColumn.from_values("x", [3, np.nan, 1, 3, 2, np.nan, 1])
    order, starts, missing = col.level_groups
    np.testing.assert_array_equal(starts, [0, 2, 3, 5])
    assert [set(order[starts[r]:starts[r + 1]]) for r in range(3)] == [{2, 6}, {4}, {0, 3}]
    np.testing.assert_array_equal(missing, [1, 5])


def test_empirical_quantile_examples():
    m = EmpiricalMarginal.from_values([1, 2, 3, 4])
    assert empirical_quantile(m, 0.5) == 2
    assert empirical_quantile(EmpiricalMarginal.from_values([0, 0, 0, 1]), 0.9) == 1
    assert empirical_quantile(m, 1e-12) == 1
    assert empirical_quantile(m, 1 - 1e-12) == 4
    with pytest.raises(ValueError):
        empirical_quantile(m, 0.0)
    with pytest.raises(ValueError):
        empirical_quantile(m, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=1, max_size=40), st.floats(1e-6, 1 - 1e-6))
def test_empirical_quantile_is_pseudo_inverse(values, u):
    m = EmpiricalMarginal.from_values(values)
    y = m.quantile(u)
    assert m.cdf(y) >= u
    smaller = m.levels[m.levels < y]
    assert np.all(m.cdf(smaller) < u)


def test_empirical_cdf_step_function():
    m = EmpiricalMarginal.from_values([2, 2, 5, 9])
    x = np.linspace(0, 10, 101)
    f = m.cdf(x)
    assert np.all(np.diff(f) >= 0) and f[0] == 0 and f[-1] == 1
    assert m.cdf(2) == 0.5 and m.cdf(4.9) == 0.5 and m.cdf(5) == 0.75


def test_normal_scores_examples():
    np.testing.assert_array_equal(normal_scores(np.array([7.0])), [0.0])
    np.testing.assert_allclose(
        normal_scores(np.array([5.0, 1.0, 3.0])),
        [normal_quantile(0.75), normal_quantile(0.25), normal_quantile(0.5)],
    )


def test_normal_scores_binary_two_values():
    n = 1000
    y = np.r_[np.zeros(n // 2), np.ones(n // 2)]
    scores = normal_scores(y)
    np.testing.assert_allclose(np.unique(scores), [normal_quantile(n / (2 * (n + 1))), normal_quantile(n / (n + 1))])


def test_normal_scores_rejects_missing():
    with pytest.raises(DataError):
        normal_scores(ObservedColumn.from_values("x", [1.0, np.nan]))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-500, 500).map(lambda k: k / 100), min_size=1, max_size=50))
def test_normal_scores_rank_invariance(values):
    x = np.array(values)
    s = normal_scores(x)
    assert np.all(np.isfinite(s))
    np.testing.assert_array_equal(normal_scores(np.exp(x)), s)
    order = np.argsort(x, kind="stable")
    assert np.all(np.diff(s[order]) >= 0)
