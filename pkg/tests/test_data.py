import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rffnet.data import (Dataset, gen_se1, gen_se2, load_csv, se1_response, se2_response, split_threeway,
                         standardize_apply, standardize_fit, write_csv)
from rffnet.errors import ArgumentError, DataError


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_target_by_name_and_index(self, tmp_path):
        path = write(tmp_path, "a,y,b\n1,2,3\n4,5,6\n")
        for target in ("y", 1, "1", -2):
            ds = load_csv(path, target)
            np.testing.assert_array_equal(ds.X, [[1, 3], [4, 6]])
            np.testing.assert_array_equal(ds.y, [2, 5])
            assert ds.feature_names == ["a", "b"]

    def test_missing_file_names_path(self, tmp_path):
        with pytest.raises(DataError, match="absent.csv"):
            load_csv(tmp_path / "absent.csv")

    def test_unknown_target(self, tmp_path):
        with pytest.raises(DataError, match="'z'"):
            load_csv(write(tmp_path, "a,y\n1,2\n"), "z")
        with pytest.raises(DataError, match="out of range"):
            load_csv(write(tmp_path, "a,y\n1,2\n"), 5)

    def test_non_numeric_location(self, tmp_path):
        with pytest.raises(DataError, match=r"row 2, column 'b'"):
            load_csv(write(tmp_path, "a,b,y\n1,2,3\n4,x,6\n"))

    def test_non_finite(self, tmp_path):
        with pytest.raises(DataError, match="row 1"):
            load_csv(write(tmp_path, "a,y\nnan,1\n"))

    def test_ragged(self, tmp_path):
        with pytest.raises(DataError, match="row 1 has 3 fields"):
            load_csv(write(tmp_path, "a,y\n1,2,3\n"))

    def test_empty(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(write(tmp_path, ""))
        with pytest.raises(DataError, match="no data rows"):
            load_csv(write(tmp_path, "a,y\n"))

    def test_classification_labels(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\n2,1\n3,2\n")
        with pytest.raises(DataError, match="row 2"):
            load_csv(path, task="classification")
        assert load_csv(path).task == "regression"

    def test_round_trip(self, tmp_path, rng):
        ds = Dataset(rng.normal(size=(10, 3)) * 1e5, rng.normal(size=10), ["u", "v", "w"])
        write_csv(ds, tmp_path / "x.csv")
        back = load_csv(tmp_path / "x.csv")
        np.testing.assert_array_equal(back.X, ds.X)
        np.testing.assert_array_equal(back.y, ds.y)
        assert back.feature_names == ds.feature_names


class TestStandardize:
    def test_sample_std(self):
        st_ = standardize_fit([[1.0, 5.0], [3.0, 5.0]])
        np.testing.assert_array_equal(st_.mean, [2.0, 5.0])
        np.testing.assert_allclose(st_.std, [np.sqrt(2.0), 1.0])

    def test_needs_two_rows(self):
        with pytest.raises(DataError):
            standardize_fit([[1.0, 2.0]])

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (20, 3), elements=st.floats(-1e4, 1e4)))
    def test_moments(self, X):
        Z = standardize_apply(X, standardize_fit(X))
        assert np.all(np.abs(Z.mean(axis=0)) < 1e-8)
        sd = Z.std(axis=0, ddof=1)
        assert np.all((np.abs(sd - 1) < 1e-8) | (sd < 1e-6))

    def test_column_mismatch(self):
        with pytest.raises(ArgumentError):
            standardize_apply(np.zeros((2, 3)), standardize_fit(np.eye(2)))


class TestGenerators:
    def test_se1_shape_and_response(self):
        ds = gen_se1(500, 0, sigma=0.0)
        assert ds.X.shape == (500, 18)
        X = ds.X
        ref = np.sin((X[:, 0] + X[:, 2]) ** 2) * np.sin(X[:, 5] * X[:, 6] * X[:, 7])
        np.testing.assert_array_equal(ds.y, ref)

    def test_se2_shape_and_response(self):
        ds = gen_se2(300, 0, sigma=0.0)
        assert ds.X.shape == (300, 100)
        np.testing.assert_allclose(ds.y, np.log(np.sum(ds.X[:, 10:15], axis=1) ** 2))

    def test_noise_level(self):
        ds = gen_se1(20000, 1, sigma=0.1)
        resid = ds.y - se1_response(ds.X)
        assert abs(resid.std() - 0.1) < 0.005

    def test_deterministic(self):
        a, b = gen_se2(50, 7), gen_se2(50, 7)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.array_equal(gen_se2(50, 8).X, a.X)

    def test_covariates_standard_normal(self):
        X = gen_se1(50000, 2).X
        assert np.all(np.abs(X.mean(axis=0)) < 0.03)
        assert np.all(np.abs(X.std(axis=0) - 1) < 0.03)

    def test_invalid(self):
        with pytest.raises(ArgumentError):
            gen_se1(0, 0)
        with pytest.raises(ArgumentError):
            gen_se2(5, 0, sigma=-1)

    def test_se2_finite(self):
        assert np.all(np.isfinite(se2_response(gen_se2(2000, 3).X)))


def test_split_threeway(rng):
    ds = Dataset(np.arange(40.0).reshape(20, 2), np.arange(20.0))
    a, b, c = split_threeway(ds, (10, 5, 5), 0)
    rows = np.concatenate([a.y, b.y, c.y])
    assert (a.n, b.n, c.n) == (10, 5, 5)
    np.testing.assert_array_equal(np.sort(rows), np.arange(20.0))
    np.testing.assert_array_equal(a.X[:, 0] / 2, a.y)
    with pytest.raises(ArgumentError):
        split_threeway(ds, (10, 10, 1), 0)
