import numpy as np
import pytest

from conftest import soft_threshold
from jpcem.classify import (classify_multiview, multiview_src_baseline,
                            src_single_baseline)
from jpcem.dictionary import build_dictionary
from jpcem.exceptions import DimensionError, InvalidParameterError
from jpcem.solver import WeightedLassoProblem, augment, brute_force_lasso


@pytest.fixture
def eye4():
    e = np.eye(4)
    return build_dictionary([(1, 1, e[0]), (1, 1, e[1]), (2, 1, e[2]), (2, 1, e[3])])


def test_single_class():
    D = build_dictionary([("only", 1, [1.0, 0.0]), ("only", 1, [0.0, 1.0])])
    res = classify_multiview(D, [0.3, 0.1], np.array([0.0, 0.0]))
    assert res.predicted_class == "only"


def test_perfect_reconstruction(eye4):
    x = np.array([[0.5, 0.2], [-1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    Y = eye4.data @ x
    res = classify_multiview(eye4, Y, x)
    assert res.predicted_class == 1
    assert res.residuals[0] == 0.0 and res.residuals[1] > 0


def test_hand_computed_residuals(eye4):
    y = np.array([1.0, 0.0, 0.0, 0.1])
    res = classify_multiview(eye4, y, y)
    np.testing.assert_allclose(res.residuals, [0.1, 1.0], atol=1e-15)
    assert res.predicted_class == 1 and not res.tie


def test_two_views_disagree(eye4):
    y1 = np.array([1.0, 0.0, 0.2, 0.0])
    y2 = np.array([0.3, 0.0, 1.0, 0.0])
    Y = np.column_stack([y1, y2])
    res = classify_multiview(eye4, Y, Y)
    # view 1 favours class 1 (0.2 vs 1.0), view 2 class 2 (1.0 vs 0.3)
    np.testing.assert_allclose(res.per_view_residuals, [[0.2, 1.0], [1.0, 0.3]])
    np.testing.assert_allclose(res.residuals, [1.2, 1.3])
    assert res.predicted_class == 1


def test_unsquared_norms_matter(eye4):
    # per-view residuals: class 1 (0, 1.0), class 2 (0.6, 0.6); summing
    # squares instead would pick class 2 (1.0 > 0.72)
    Y = np.column_stack([[0.6, 0.0, 0.0, 0.0], [0.6, 0.0, 1.0, 0.0]])
    res = classify_multiview(eye4, Y, Y)
    np.testing.assert_allclose(res.residuals, [1.0, 1.2])
    assert res.predicted_class == 1


def test_tie_goes_to_first_class(eye4):
    res = classify_multiview(eye4, [1.0, 0.0, 1.0, 0.0], np.zeros(4))
    assert res.tie and res.predicted_class == 1


def test_argmin_invariant_to_scaling(eye4):
    rng = np.random.default_rng(0)
    for _ in range(20):
        Y = rng.standard_normal((4, 3))
        X = rng.standard_normal((4, 3))
        a = classify_multiview(eye4, Y, X)
        b = classify_multiview(eye4, 3.5 * Y, 3.5 * X)
        assert a.predicted_class == b.predicted_class
        assert a.residuals[eye4.class_index(a.predicted_class)] == a.residuals.min()


def test_duplicate_view_keeps_decision(eye4):
    # duplicating the only view (or any view of an all-identical stack)
    # scales every class sum by the same factor
    rng = np.random.default_rng(1)
    for _ in range(20):
        y = rng.standard_normal(4)
        x = rng.standard_normal(4)
        for m in (1, 3):
            Y, X = np.tile(y[:, None], m), np.tile(x[:, None], m)
            a = classify_multiview(eye4, Y, X)
            b = classify_multiview(eye4, np.column_stack([Y, y]),
                                   np.column_stack([X, x]))
            assert a.predicted_class == b.predicted_class
            np.testing.assert_allclose(b.residuals, a.residuals * (m + 1) / m)


def test_dimension_errors(eye4):
    with pytest.raises(DimensionError):
        classify_multiview(eye4, np.ones(3), np.ones(4))
    with pytest.raises(DimensionError):
        classify_multiview(eye4, np.ones((4, 2)), np.ones((4, 3)))


def test_src_single_soft_threshold():
    D = build_dictionary([(1, 1, [1.0, 0.0]), (2, 1, [0.0, 1.0])])
    res = src_single_baseline(D, np.array([1.0, 0.0]), weight=0.1)
    np.testing.assert_allclose(res.coefficients.x[:, 0], [0.95, 0.0], atol=1e-10)
    assert res.predicted_class == 1


def test_src_single_zero_solution_ties(eye4):
    y = np.array([0.3, 0.0, 0.3, 0.0])
    res = src_single_baseline(eye4, y, weight=2 * 0.3)
    np.testing.assert_array_equal(res.coefficients.x, 0.0)
    assert res.tie and res.predicted_class == 1


def test_src_single_atom_matches_brute_force():
    rng = np.random.default_rng(7)
    samples = [(c, 1, np.abs(rng.standard_normal(6))) for c in (1, 2) for _ in range(4)]
    D = build_dictionary(samples)
    y = D.data[:, 1].copy()
    res = src_single_baseline(D, y, weight=0.01)
    oracle = brute_force_lasso(WeightedLassoProblem(augment(D, y, 0.0),
                                                    np.full(8, 0.01)))
    np.testing.assert_allclose(res.coefficients.x[:, 0], oracle, atol=1e-7)
    assert res.predicted_class == 1


def test_multiview_baseline_reductions(eye4):
    y = np.array([1.0, 0.2, 0.4, 0.0])
    single = src_single_baseline(eye4, y, 0.1)
    multi = multiview_src_baseline(eye4, y[:, None], 0.1)
    np.testing.assert_array_equal(single.residuals, multi.residuals)
    assert single.predicted_class == multi.predicted_class
    triple = multiview_src_baseline(eye4, np.column_stack([y, y, y]), 0.1)
    np.testing.assert_allclose(triple.residuals, 3 * single.residuals, rtol=1e-14)
    assert triple.predicted_class == single.predicted_class


def test_multiview_baseline_hand_computed(eye4):
    y1 = np.array([1.0, 0.0, 0.2, 0.0])
    y2 = np.array([0.3, 0.0, 1.0, 0.0])
    res = multiview_src_baseline(eye4, np.column_stack([y1, y2]), 0.1)
    r = []
    for y in (y1, y2):
        x = soft_threshold(y, 0.05)
        r.append([np.linalg.norm(y - np.r_[x[:2], 0, 0]),
                  np.linalg.norm(y - np.r_[0, 0, x[2:]])])
    expected = np.sum(r, axis=0)
    np.testing.assert_allclose(res.residuals, expected, atol=1e-9)
    np.testing.assert_allclose(expected, [1.20741, 1.30539], atol=1e-5)
    assert res.predicted_class == 1


def test_baseline_rejects_nonpositive_weight(eye4):
    with pytest.raises(InvalidParameterError):
        src_single_baseline(eye4, np.ones(4), weight=0.0)
