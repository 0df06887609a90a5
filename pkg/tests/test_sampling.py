import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opbo.errors import GridTooLarge, InvalidSideLength, InvalidSize
from opbo.sampling import (
    grid_sampling,
    latin_hypercube,
    random_sampling,
    sample,
    trust_region_candidates,
)


def stratum_counts(points):
    n = points.shape[0]
    strata = np.floor(points * n).astype(int)
    return np.stack([np.bincount(col, minlength=n) for col in strata.T])


def test_random_bounds_large():
    pts = random_sampling(1000, 10_000, 0).points
    assert pts.shape == (10_000, 1000)
    assert pts.min() >= 0.0 and pts.max() <= 1.0


def test_random_mean():
    pts = random_sampling(2, 100_000, 1).points
    assert np.all((pts.mean(axis=0) > 0.49) & (pts.mean(axis=0) < 0.51))


@pytest.mark.parametrize("fn", [random_sampling, latin_hypercube])
def test_invalid_size(fn):
    with pytest.raises(InvalidSize):
        fn(2, 0, 0)


def test_lhs_one_dimension():
    pts = latin_hypercube(1, 4, 3).points[:, 0]
    assert sorted(np.floor(pts * 4).astype(int)) == [0, 1, 2, 3]


def test_lhs_high_dimension():
    counts = stratum_counts(latin_hypercube(600, 10, 5).points)
    assert np.all(counts == 1)


def test_lhs_single_point():
    pts = latin_hypercube(2, 1, 0).points
    assert pts.shape == (1, 2) and np.all((pts >= 0) & (pts < 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 200), st.integers(0, 2**32 - 1))
def test_lhs_stratification_property(d, n, seed):
    assert np.all(stratum_counts(latin_hypercube(d, n, seed).points) == 1)


def test_grid_examples():
    np.testing.assert_array_equal(grid_sampling(1, 3).points[:, 0], [0.0, 0.5, 1.0])
    corners = grid_sampling(2, 2).points
    assert {tuple(p) for p in corners} == {(0, 0), (0, 1), (1, 0), (1, 1)}
    with pytest.raises(GridTooLarge):
        grid_sampling(20, 3)


def test_tr_box_containment():
    pts = trust_region_candidates(np.array([0.5, 0.5]), 0.4, 2, 500, 0).points
    assert np.all(pts >= 0.3 - 1e-12) and np.all(pts <= 0.7 + 1e-12)


def test_tr_perturbed_coordinates():
    center = np.full(1000, 0.5)
    pts = trust_region_candidates(center, 0.8, 1000, 1000, 7).points
    moved = (pts != center).sum(axis=1)
    # Binomial(1000, 0.02): mean 20, std of the mean over 1000 rows ~0.14
    assert abs(moved.mean() - 20) <= 3
    assert moved.min() >= 1


def test_tr_invalid_side():
    with pytest.raises(InvalidSideLength):
        trust_region_candidates(np.array([0.5, 0.5]), 0.0, 2, 5, 0)
    with pytest.raises(InvalidSideLength):
        trust_region_candidates(np.array([0.5, 0.5]), 1.7, 2, 5, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50), st.floats(1e-3, 1.6), st.integers(0, 1000), st.data())
def test_tr_never_leaves_cube(d, side, seed, data):
    center = np.array(data.draw(st.lists(st.floats(0, 1), min_size=d, max_size=d)))
    pts = trust_region_candidates(center, side, d, 50, seed).points
    assert np.all(pts >= 0) and np.all(pts <= 1)


@pytest.mark.parametrize("strategy", ["rs", "lhs"])
def test_same_seed_same_points(strategy):
    a = sample(strategy, 7, 30, 11).points
    b = sample(strategy, 7, 30, 11).points
    assert a.tobytes() == b.tobytes()
    t1 = trust_region_candidates(np.full(7, 0.3), 0.5, 7, 30, 11).points
    t2 = trust_region_candidates(np.full(7, 0.3), 0.5, 7, 30, 11).points
    assert t1.tobytes() == t2.tobytes()
