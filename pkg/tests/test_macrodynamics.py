import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mzopinion.abm import DEFAULT_ALPHA, AdaptionMatrix
from mzopinion.macrodynamics import (complete_trajectory, expected_step_complete,
                                     expected_step_two_cluster, linear_two_cluster_ar2,
                                     reduce_m3, two_cluster_trajectory)

probs = st.floats(0, 1, allow_nan=False)


def random_alpha(rng, m=3):
    return AdaptionMatrix(rng.random((m, m)))


def test_symmetric_alpha_is_identity():
    a = AdaptionMatrix(np.array([[0, .2, .3], [.2, 0, .4], [.3, .4, 0]]))
    x = np.array([0.2, 0.5, 0.3])
    assert np.allclose(expected_step_complete(x, a), x, atol=1e-15)


@pytest.mark.parametrize("k", range(3))
def test_vertex_is_fixed(k):
    e = np.eye(3)[k]
    assert np.array_equal(expected_step_complete(e, DEFAULT_ALPHA), e)


def test_hand_evaluated_case1_step():
    y = expected_step_complete([0.45, 0.1, 0.45], DEFAULT_ALPHA)
    assert y[0] == pytest.approx(0.4712625, abs=1e-15)
    assert y[1] == pytest.approx(0.1, abs=1e-15)


def test_off_simplex_rejected():
    with pytest.raises(ValueError):
        expected_step_complete([0.5, 0.5, 0.5], DEFAULT_ALPHA)


def test_reduced_coefficients_default_alpha():
    r = reduce_m3(DEFAULT_ALPHA)
    assert np.allclose(r.row1, (1.135, -0.135, -0.27), atol=1e-15)
    assert np.allclose(r.row2, (0.865, 0.135, 0.27), atol=1e-15)


def test_zero_alpha_reduces_to_identity():
    r = reduce_m3(AdaptionMatrix(np.zeros((3, 3))))
    assert r.row1 == (1.0, 0.0, 0.0) and r.row2 == (1.0, 0.0, 0.0)


def test_reduce_requires_three_opinions():
    with pytest.raises(NotImplementedError):
        reduce_m3(AdaptionMatrix(np.zeros((2, 2))))


def test_reduction_matches_full_map_at_random_points():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        alpha = random_alpha(rng)
        x = rng.dirichlet(np.ones(3))
        full = expected_step_complete(x, alpha)
        y1, y2 = reduce_m3(alpha)(x[0], x[1])
        assert abs(y1 - full[0]) <= 1e-14 and abs(y2 - full[1]) <= 1e-14


@settings(max_examples=200, deadline=None)
@given(st.lists(probs, min_size=9, max_size=9), st.lists(st.floats(0.01, 1), min_size=3,
                                                          max_size=3))
def test_expected_map_preserves_simplex(a, w):
    alpha = AdaptionMatrix(np.reshape(a, (3, 3)))
    x = np.array(w) / np.sum(w)
    y = expected_step_complete(x, alpha)
    assert abs(y.sum() - 1.0) <= 1e-14
    assert np.all(y >= -1e-15)


def test_opinion_matrix_layout():
    m = reduce_m3(DEFAULT_ALPHA).opinion_matrix()
    assert m.shape == (2, 5)
    assert np.allclose(m[0], [1.135, 0, -0.135, 0, -0.27])
    assert np.allclose(m[1], [0, 0.865, 0, 0.135, 0.27])


def test_equal_clusters_follow_complete_network():
    x0 = np.array([0.45, 0.1, 0.45])
    _, _, mean = two_cluster_trajectory(x0, x0, DEFAULT_ALPHA, 50)
    full = complete_trajectory(x0, DEFAULT_ALPHA, 50)
    assert np.allclose(mean, full[:, :2], atol=1e-14)


def test_vertex_cluster_stays_put():
    a, b, mean = expected_step_two_cluster([1.0, 0.0, 0.0], [0.3, 0.3, 0.4], DEFAULT_ALPHA)
    assert np.array_equal(a, [1.0, 0.0, 0.0])
    assert np.allclose(mean, 0.5 * (a + b))


def test_two_cluster_accepts_reduced_coordinates():
    a, b, _ = expected_step_two_cluster([0.8, 0.1], [0.1, 0.8], DEFAULT_ALPHA)
    full_a, full_b, _ = expected_step_two_cluster([0.8, 0.1, 0.1], [0.1, 0.8, 0.1],
                                                  DEFAULT_ALPHA)
    assert np.allclose(a, full_a[:2]) and np.allclose(b, full_b[:2])


def _check_recurrence(l1, l2, A=1.0, B=2.0, T=50):
    t = np.arange(T + 1)
    x = 0.5 * (A * l1 ** t + B * l2 ** t)
    c1, c2 = linear_two_cluster_ar2(l1, l2)
    return np.max(np.abs(x[2:] - c1 * x[1:-1] - c2 * x[:-2]))


def test_ar2_example():
    assert linear_two_cluster_ar2(0.9, 0.5) == pytest.approx((1.4, -0.45), abs=1e-15)
    assert _check_recurrence(0.9, 0.5) <= 1e-12


def test_ar2_repeated_root_and_ar1():
    assert linear_two_cluster_ar2(0.7, 0.7) == pytest.approx((1.4, -0.49))
    assert linear_two_cluster_ar2(0.6, 0.0) == (0.6, -0.0)


def test_halved_coefficients_do_not_satisfy_the_recurrence():
    t = np.arange(51)
    x = 0.5 * (0.9 ** t + 2 * 0.5 ** t)
    resid = x[2:] - 0.7 * x[1:-1] + 0.225 * x[:-2]
    assert np.max(np.abs(resid)) > 1e-3


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.999, 0.999), st.floats(-0.999, 0.999))
def test_ar2_recurrence_is_exact(l1, l2):
    assert _check_recurrence(l1, l2) <= 1e-12
