import numpy as np
import pytest

import robustfit as rf


def test_required_iterations():
    assert rf.required_iterations(0.95, 0.5, 7) == 382
    assert rf.required_iterations(0.95, 0.5, 4) == 47
    assert rf.required_iterations(0.95, 0.0, 4, t_max=100) == 100
    with pytest.raises(ValueError):
        rf.required_iterations(1.0, 0.5, 4)


def test_score_and_cubic():
    assert rf.truncated_quadratic_score([0.0, 1.0, 4.0], 2.0) == pytest.approx(1.75)
    roots = sorted(rf.solve_cubic_real(1, -6, 11, -6))
    assert roots == pytest.approx([1, 2, 3], abs=1e-10)


def test_eigen_helpers():
    s = np.diag([3.0, 1.0, 2.0])
    v = rf.least_eigvecs(s, 1)
    assert abs(v[1, 0]) == pytest.approx(1.0)
    vals, _ = rf.symmetric_eigen(s)
    assert list(vals) == pytest.approx([1, 2, 3])


def test_hartley():
    pts = np.random.default_rng(0).uniform(0, 640, size=(50, 2))
    t, out = rf.hartley_normalize(pts)
    assert np.allclose(out[:, :2].mean(axis=0), 0, atol=1e-12)
    assert np.linalg.norm(out[:, :2], axis=1).mean() == pytest.approx(np.sqrt(2))
    hom = np.c_[pts, np.ones(50)]
    assert np.allclose((t @ hom.T).T, out)


def test_dpcp_recovers_hyperplane():
    rng = np.random.default_rng(1)
    b = rng.normal(size=9)
    b /= np.linalg.norm(b)
    inl = rng.normal(size=(9, 300))
    inl -= np.outer(b, b @ inl)
    out = rng.normal(size=(9, 200))
    y = np.c_[inl, out]
    y /= np.linalg.norm(y, axis=0)
    r = rf.dpcp_irls(y)
    assert abs(r["basis"][:, 0] @ b) == pytest.approx(1.0, abs=1e-8)
    assert all(np.diff(r["objective"]) <= 1e-12)
    assert rf.dpcp_irls_basis(y, codim=1)["basis"].shape == (9, 1)
    assert rf.huber_irls(y, c=0.01)["basis"].shape == (9, 1)


def test_synth_and_estimate():
    d = rf.synth("homography", n_inliers=100, n_outliers=60, noise=0.5, seed=4)
    assert d["x1"].shape == (160, 2)
    assert sum(d["labels"]) == 100
    r = rf.estimate(d["x1"], d["x2"], "homography", epsilon=2.0, seed=1)
    truth = d["truth"].ravel()
    est = r["model"].ravel()
    assert abs(truth @ est) / np.linalg.norm(truth) / np.linalg.norm(est) > 0.99
    assert r["inlier_count"] == sum(r["inlier_mask"])
    assert r["score_history"] == sorted(r["score_history"])
    again = rf.estimate(d["x1"], d["x2"], "homography", epsilon=2.0, seed=1)
    assert np.array_equal(again["model"], r["model"])


def test_errors(tmp_path):
    with pytest.raises(ValueError):
        rf.synth("affine")
    x = np.zeros((10, 2))
    with pytest.raises(ValueError):
        rf.estimate(x, x, "homography")
    bad = tmp_path / "bad.txt"
    bad.write_text("# robustfit v1 homography 640 480\n1 2 3\n")
    with pytest.raises(rf.ParseError):
        rf.read_correspondences(str(bad))
    line = np.array([[i, i] for i in range(10)], dtype=float)
    with pytest.raises(rf.EstimationFailed):
        rf.estimate(line, 2 * line, "homography", epsilon=3.0, t_max=50)
