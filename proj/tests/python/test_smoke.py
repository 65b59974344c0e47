"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import rgbtrack as rt


def test_iou_fixture():
    a = rt.BoundingBox(0, 0, 10, 10)
    b = rt.BoundingBox(5, 0, 10, 10)
    assert rt.iou(a, b) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert rt.iou(a, a) == 1.0


def test_groundtruth_round_trip():
    boxes = rt.parse_groundtruth("10,20,30,40\n1,2,3,4")
    assert len(boxes) == 2
    assert boxes[0].x == 10
    assert rt.format_results(boxes) == "10,20,30,40\n1,2,3,4\n"


def test_simplex_and_prox():
    p = rt.project_simplex(np.array([2.0, 0.0]))
    assert p == pytest.approx([1.0, 0.0], abs=1e-12)
    out = rt.prox_l21(np.array([[3.0], [4.0]]), 1.0)
    assert out[:, 0] == pytest.approx([2.4, 3.2], abs=1e-12)
    assert rt.sigmoid_map(np.array([0.0]), 37.0)[0] == pytest.approx(0.5)


def test_solve_joint_constraints():
    rng = np.random.default_rng(3)
    X = [rng.random((6, 8)), rng.random((5, 8))]
    q = np.zeros(8)
    q[:4] = 1.0
    state = rt.solve_joint(X, q)
    assert state.A.shape == (8, 8)
    assert np.allclose(state.A.sum(axis=0), 1.0, atol=1e-8)
    assert state.A.min() >= -1e-12
    assert 0.0 < state.s_hat.min() <= state.s_hat.max() < 1.0
    assert 0.0 < state.r.min() <= state.r.max() <= 1.0
    trace = state.objective_trace
    assert all(b <= a + 1e-6 for a, b in zip(trace, trace[1:]))


def test_synthetic_determinism():
    cfg = rt.SyntheticConfig()
    cfg.frame_count = 3
    cfg.image_width = 80
    cfg.image_height = 60
    cfg.target_width = 20
    cfg.target_height = 20
    cfg.start_x = 10
    cfg.start_y = 10
    cfg.velocity_x = 2.0
    frames_a, gt_a = rt.generate_synthetic(cfg)
    frames_b, gt_b = rt.generate_synthetic(cfg)
    assert len(frames_a) == 3 and len(gt_a) == 3
    for fa, fb in zip(frames_a, frames_b):
        for ia, ib in zip(fa, fb):
            assert np.array_equal(ia, ib)
    assert gt_a[1].x - gt_a[0].x == pytest.approx(2.0)


def test_tracker_end_to_end():
    cfg = rt.SyntheticConfig()
    cfg.frame_count = 8
    cfg.image_width = 160
    cfg.image_height = 120
    cfg.target_width = 36
    cfg.target_height = 36
    cfg.start_x = 60
    cfg.start_y = 40
    cfg.velocity_x = 2.0
    cfg.noise_sigma = 4.0
    frames, gt = rt.generate_synthetic(cfg)

    tracker = rt.Tracker(frames[0], gt[0])
    boxes = [gt[0]]
    for t in range(1, cfg.frame_count):
        boxes.append(tracker.track(frames[t]))
    dual_gt = [gt, gt]
    assert rt.mpr(boxes, dual_gt) == 1.0
    assert rt.msr(boxes, dual_gt) >= 0.5
    value, curve = rt.eao([rt.overlap_curve(boxes, dual_gt)])
    assert 0.0 < value <= 1.0
