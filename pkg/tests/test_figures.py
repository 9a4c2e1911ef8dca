"""Tests for figure rendering: valid PNG output and byte determinism."""

import numpy as np

from kpclust.figures import save_asw_curve, save_fluence_duration, save_scatter

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def sample_points(seed=0, n=60):
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n, 2))
    labels = rng.integers(0, 3, size=n)
    return points, labels


def test_save_scatter_writes_png(tmp_path):
    points, labels = sample_points()
    path = tmp_path / "scatter.png"
    save_scatter(path, points, labels, title="scores", xlabel="KPC 1", ylabel="KPC 2")
    data = path.read_bytes()
    assert data.startswith(PNG_MAGIC)
    assert len(data) > 1000


def test_save_scatter_handles_single_cluster(tmp_path):
    points, _ = sample_points()
    path = tmp_path / "one.png"
    save_scatter(path, points, np.zeros(points.shape[0], dtype=int), title="t")
    assert path.read_bytes().startswith(PNG_MAGIC)


def test_save_asw_curve_writes_png(tmp_path):
    path = tmp_path / "asw.png"
    save_asw_curve(path, {2: 0.56, 3: 0.63, 4: 0.58, 5: 0.60}, chosen_k=3)
    assert path.read_bytes().startswith(PNG_MAGIC)


def test_save_fluence_duration_writes_png(tmp_path):
    rng = np.random.default_rng(1)
    log_t90 = rng.uniform(-1.5, 2.5, size=80)
    log_ft = rng.uniform(-7.5, -4.0, size=80)
    labels = rng.integers(0, 3, size=80)
    path = tmp_path / "fd.png"
    save_fluence_duration(path, log_t90, log_ft, labels)
    assert path.read_bytes().startswith(PNG_MAGIC)


def test_renders_are_byte_deterministic(tmp_path):
    points, labels = sample_points(seed=3)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    save_scatter(a, points, labels, title="repeat")
    save_scatter(b, points, labels, title="repeat")
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.png", tmp_path / "d.png"
    save_asw_curve(c, {2: 0.5, 3: 0.7}, chosen_k=3)
    save_asw_curve(d, {2: 0.5, 3: 0.7}, chosen_k=3)
    assert c.read_bytes() == d.read_bytes()
