"""Tests for the delimited report emitters."""

import csv
import json

import numpy as np

from kpclust.data import GrbCatalog, cluster_summary
from kpclust.kernels import (
    PolynomialKernel,
    PowerExponentialKernel,
    RbfKernel,
    SigmoidKernel,
    kernel_from_dict,
)
from kpclust.pipeline import Clusters, Failed, GridCell, NoClustering
from kpclust.report import (
    cell_to_dict,
    hyper_string,
    write_ari_csv,
    write_asw_csv,
    write_best_json,
    write_fluence_csv,
    write_grid_csv,
    write_knn_csv,
    write_points_csv,
    write_scores_csv,
    write_summary_csv,
)


def read_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def test_hyper_string_formats():
    assert hyper_string(PowerExponentialKernel(p=0.5, scales=(0.94, 0.94))) == "p=0.5; s=0.94"
    assert hyper_string(PowerExponentialKernel(p=0.5, scales=(0.07, 0.13))) == "p=0.5; s=(0.07, 0.13)"
    assert hyper_string(RbfKernel(sigma=1.01)) == "sigma=1.01"
    assert hyper_string(PolynomialKernel(c=0.0, d=2)) == "c=0.0; d=2"
    assert hyper_string(SigmoidKernel(a=1.0, b=0.0)) == "a=1.0; b=0.0"


def test_write_points_csv_round_trips(tmp_path):
    points = np.array([[0.125, -3.5], [1e-17, 2.0]])
    path = tmp_path / "points.csv"
    write_points_csv(path, points, [0, 1])
    rows = read_rows(path)
    assert rows[0] == ["x1", "x2", "label"]
    back = np.array([[float(v) for v in row[:2]] for row in rows[1:]])
    assert np.array_equal(back, points)
    assert [row[2] for row in rows[1:]] == ["0", "1"]


def test_write_scores_csv_with_extra_columns(tmp_path):
    scores = np.array([[0.1, -0.2], [0.3, 0.4], [-0.5, 0.6]])
    path = tmp_path / "scores.csv"
    write_scores_csv(path, scores, {"truth": [0, 1, 1], "kmeans": [1, 0, 0]})
    rows = read_rows(path)
    assert rows[0] == ["kpc1", "kpc2", "truth", "kmeans"]
    assert rows[2] == ["0.3", "0.4", "1", "0"]
    write_scores_csv(tmp_path / "bare.csv", scores)
    assert read_rows(tmp_path / "bare.csv")[0] == ["kpc1", "kpc2"]


def grid_cells():
    return [
        GridCell(
            spec=PowerExponentialKernel(p=0.5, scales=(0.94, 0.94)),
            kpc_count=2,
            outcome=Clusters(k=3, sizes=(941, 588, 443), dunn=0.018853),
        ),
        GridCell(spec=PolynomialKernel(c=0.0, d=1), kpc_count=1, outcome=NoClustering()),
        GridCell(spec=RbfKernel(sigma=0.94), kpc_count=1,
                 outcome=Failed(reason="NonFiniteError: overflow at pair (0, 1)")),
    ]


def test_write_grid_csv_rows(tmp_path):
    path = tmp_path / "grid.csv"
    write_grid_csv(path, grid_cells(), n_points=1972)
    rows = read_rows(path)
    assert rows[0] == ["kernel", "hyperparameters", "kpcs", "clusters", "sizes", "dunn", "note"]
    assert rows[1] == ["proposed", "p=0.5; s=0.94", "2", "3", "941 588 443", "0.018853", ""]
    assert rows[2] == ["polynomial", "c=0.0; d=1", "1", "1", "1972", "", "no clustering"]
    assert rows[3][0] == "rbf"
    assert rows[3][3:6] == ["", "", ""]
    assert "NonFinite" in rows[3][6]


def test_write_grid_csv_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_grid_csv(a, grid_cells(), n_points=1972)
    write_grid_csv(b, grid_cells(), n_points=1972)
    assert a.read_bytes() == b.read_bytes()


def test_best_json_round_trip(tmp_path):
    cell = grid_cells()[0]
    path = tmp_path / "best.json"
    write_best_json(path, cell, grid_index=3)
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["grid_index"] == 3
    assert payload["kpc_count"] == 2
    assert payload["outcome"] == {
        "kind": "clusters", "k": 3, "sizes": [941, 588, 443], "dunn": 0.018853,
    }
    assert kernel_from_dict(payload["spec"]) == cell.spec


def test_cell_to_dict_other_outcomes():
    cells = grid_cells()
    assert cell_to_dict(cells[1])["outcome"] == {"kind": "no_clustering"}
    failed = cell_to_dict(cells[2])["outcome"]
    assert failed["kind"] == "failed" and "NonFinite" in failed["reason"]


def test_write_asw_and_knn(tmp_path):
    asw_path = tmp_path / "asw.csv"
    write_asw_csv(asw_path, {3: 0.6358, 2: 0.5657, 4: 0.5861}, chosen_k=3)
    rows = read_rows(asw_path)
    assert rows[0] == ["k", "asw", "chosen"]
    assert rows[1] == ["2", "0.5657", "0"]
    assert rows[2] == ["3", "0.6358", "1"]
    assert rows[3] == ["4", "0.5861", "0"]
    knn_path = tmp_path / "knn.csv"
    write_knn_csv(knn_path, 11, 0.001521)
    assert read_rows(knn_path) == [["n_neighbors", "loocv_error"], ["11", "0.001521"]]


def test_write_summary_csv_layout(tmp_path):
    values = np.array(
        [
            [1e-6, 1e-6, 1e-6, 1e-6, 1.0, 2.0, 3.0, 1.0, 10.0],
            [2e-6, 2e-6, 2e-6, 2e-6, 2.0, 4.0, 6.0, 3.0, 30.0],
            [5e-6, 5e-6, 5e-6, 5e-6, 9.0, 9.0, 9.0, 9.0, 90.0],
        ]
    )
    catalog = GrbCatalog(values=values, ids=("a", "b", "c"))
    rows_data = cluster_summary(catalog, np.array([0, 0, 1]))
    path = tmp_path / "summary.csv"
    write_summary_csv(path, rows_data)
    rows = read_rows(path)
    assert rows[0][:4] == ["cluster", "size", "f_t_mean", "f_t_sem"]
    assert len(rows[0]) == 2 + 2 * 6
    assert rows[1][0] == "0" and rows[1][1] == "2"
    assert float(rows[1][4]) == 20.0  # t90 mean of cluster 0
    assert float(rows[1][5]) == 10.0  # its standard error
    assert rows[2][0] == "1" and rows[2][1] == "1"


def test_write_ari_csv(tmp_path):
    path = tmp_path / "ari.csv"
    write_ari_csv(path, [("kmeans_vs_truth", 0.9625), ("hier_vs_truth", 1.0)])
    assert read_rows(path) == [
        ["comparison", "adjusted_rand"],
        ["kmeans_vs_truth", "0.9625"],
        ["hier_vs_truth", "1.0"],
    ]


def test_write_fluence_csv(tmp_path):
    path = tmp_path / "fluence_duration.csv"
    write_fluence_csv(
        path,
        np.array([1.0, 1.5]),
        np.array([-5.25, -6.0]),
        np.array([0, 1]),
    )
    assert read_rows(path) == [
        ["log10_t90", "log10_ft", "cluster"],
        ["1.0", "-5.25", "0"],
        ["1.5", "-6.0", "1"],
    ]
