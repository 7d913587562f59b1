import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import direct_depth_metrics
from topofield import depth_metrics, miou_binary
from topofield.errors import DomainError, EmptyMaskError, ShapeMismatchError


def test_identical_fields():
    y = np.random.default_rng(1).uniform(1, 5, size=(4, 4))
    m = depth_metrics(y, y)
    assert m.mae == m.rmse == m.abs_rel == m.mae_log10 == m.rmse_log10 == 0.0
    assert m.delta1 == m.delta2 == m.delta3 == 1.0


def test_delta_strictness_boundary():
    y = np.arange(1, 13, dtype=float).reshape(3, 4)  # 1.25*y exact for integers
    m = depth_metrics(y, 1.25 * y)
    assert m.delta1 == 0.0
    assert m.delta2 == 1.0
    assert m.delta3 == 1.0


def test_hand_example_1x2():
    m = depth_metrics(np.array([[1.0, 2.0]]), np.array([[2.0, 2.0]]))
    assert m.mae == 0.5
    assert m.rmse == pytest.approx(np.sqrt(0.5), rel=1e-15)
    assert m.abs_rel == 0.25


def test_matches_direct_formulas():
    rng = np.random.default_rng(2)
    for _ in range(20):
        y = rng.uniform(0.5, 10, size=(5, 6))
        yhat = rng.uniform(0.5, 10, size=(5, 6))
        got = depth_metrics(y, yhat).as_dict()
        want = direct_depth_metrics(y, yhat)
        for name in want:
            assert got[name] == pytest.approx(want[name], rel=1e-12, abs=1e-12), name


def test_mask_restricts_pixels():
    y = np.array([[1.0, 100.0], [1.0, 1.0]])
    yhat = np.ones((2, 2))
    mask = np.array([[True, False], [True, True]])
    m = depth_metrics(y, yhat, mask)
    assert m.mae == 0.0 and m.delta1 == 1.0


def test_mask_shape_checked():
    with pytest.raises(ShapeMismatchError):
        depth_metrics(np.ones((2, 2)), np.ones((2, 2)), np.ones((3, 3), dtype=bool))


def test_empty_mask_rejected():
    with pytest.raises(EmptyMaskError):
        depth_metrics(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2), dtype=bool))


def test_nonpositive_rejected():
    with pytest.raises(DomainError):
        depth_metrics(np.array([[1.0, 0.0]]), np.ones((1, 2)))
    # masked-out nonpositive values are fine
    mask = np.array([[True, False]])
    m = depth_metrics(np.array([[1.0, -5.0]]), np.ones((1, 2)), mask)
    assert m.mae == 0.0


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 5))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    y = rng.uniform(1, 4, size=(3, 4))
    yhat = rng.uniform(1, 4, size=(3, 4))
    perm = rng.permutation(12)
    yp = y.ravel()[perm].reshape(3, 4)
    yhatp = yhat.ravel()[perm].reshape(3, 4)
    a, b = depth_metrics(y, yhat).as_dict(), depth_metrics(yp, yhatp).as_dict()
    for name in a:
        assert a[name] == pytest.approx(b[name], rel=1e-12)


def test_scale_invariance_structure():
    rng = np.random.default_rng(3)
    y = rng.uniform(1, 4, size=(4, 4))
    yhat = rng.uniform(1, 4, size=(4, 4))
    a = depth_metrics(y, yhat)
    b = depth_metrics(3.0 * y, 3.0 * yhat)
    assert b.abs_rel == pytest.approx(a.abs_rel, rel=1e-12)
    assert (b.delta1, b.delta2, b.delta3) == (a.delta1, a.delta2, a.delta3)
    assert b.mae == pytest.approx(3.0 * a.mae, rel=1e-12)
    assert b.rmse == pytest.approx(3.0 * a.rmse, rel=1e-12)
    assert b.mae_log10 == pytest.approx(a.mae_log10, rel=1e-9, abs=1e-12)


def test_delta_monotone():
    rng = np.random.default_rng(4)
    y = rng.uniform(1, 10, size=(5, 5))
    yhat = rng.uniform(1, 10, size=(5, 5))
    m = depth_metrics(y, yhat)
    assert m.delta1 <= m.delta2 <= m.delta3


def test_miou_perfect_and_disjoint():
    gt = np.array([[1.0, 0.0], [1.0, 0.0]])
    assert miou_binary(gt, gt) == 1.0
    assert miou_binary(np.ones((2, 2)), np.zeros((2, 2))) == 0.0


def test_miou_hand_example():
    gt = np.array([[1.0, 1.0, 0.0, 0.0]])
    pred = np.array([[1.0, 0.0, 0.0, 0.0]])
    assert miou_binary(gt, pred, 0.5) == pytest.approx(7.0 / 12.0, rel=1e-15)


def test_miou_label_swap_symmetry():
    rng = np.random.default_rng(5)
    gt = (rng.uniform(size=(6, 6)) > 0.5).astype(float)
    pred = (rng.uniform(size=(6, 6)) > 0.5).astype(float)
    assert miou_binary(gt, pred) == pytest.approx(miou_binary(1 - gt, 1 - pred), rel=1e-15)


def test_miou_empty_union_convention():
    assert miou_binary(np.zeros((2, 2)), np.zeros((2, 2))) == 1.0


def test_miou_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        miou_binary(np.zeros((2, 2)), np.zeros((2, 3)))
