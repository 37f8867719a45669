import numpy as np
import pytest

from gpq import DataError, RweConfig, projection_init, rwe_generate, rwe_param_counts


def test_rows_are_unit_norm():
    e = rwe_generate(RweConfig(200, 16, seed=1))
    norms = np.linalg.norm(e.values.astype(np.float64), axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-6)


def test_deterministic():
    a = rwe_generate(RweConfig(50, 8, seed=123))
    b = rwe_generate(RweConfig(50, 8, seed=123))
    assert a.values.tobytes() == b.values.tobytes()
    c = rwe_generate(RweConfig(50, 8, seed=124))
    assert a.values.tobytes() != c.values.tobytes()


def test_projection_dim_does_not_change_matrix():
    a = rwe_generate(RweConfig(20, 4, seed=5))
    b = rwe_generate(RweConfig(20, 4, seed=5, projection_dim=64))
    assert np.array_equal(a.values, b.values)


def test_statistics_large():
    e = rwe_generate(RweConfig(10000, 64, seed=0))
    vals = e.values.astype(np.float64)
    assert abs(vals.mean()) <= 0.005
    assert (1 / 64) * 0.9 <= vals.var() <= (1 / 64) * 1.1


def test_projection_bounds_and_mean():
    w = projection_init(512, 512, seed=3)
    bound = np.sqrt(6 / 1024)
    assert w.shape == (512, 512)
    assert np.all(np.abs(w) <= bound)
    assert abs(float(w.mean())) <= 0.002


def test_projection_minimal():
    w = projection_init(1, 1, seed=0)
    assert abs(w[0, 0]) <= np.sqrt(3)


def test_projection_deterministic():
    assert np.array_equal(projection_init(8, 4, seed=9), projection_init(8, 4, seed=9))


def test_param_counts():
    assert rwe_param_counts(RweConfig(32000, 512, seed=0))["float_params"] == 2
    counts = rwe_param_counts(RweConfig(32000, 512, seed=0, projection_dim=512))
    assert counts["float_params"] == 2 + 512 * 512
    assert counts["int_params"] == 0


@pytest.mark.parametrize("rows,cols,pdim", [(0, 4, None), (4, 0, None), (4, 4, 0)])
def test_config_validation(rows, cols, pdim):
    with pytest.raises(DataError):
        RweConfig(rows, cols, seed=0, projection_dim=pdim)
