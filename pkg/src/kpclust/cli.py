"""Command line front end: simulate, grid, report, rerun.

Each command writes its outputs plus a manifest holding everything a rerun
needs: the command name, its parameters, the seed, input fingerprints, the
library version, and the original creation timestamp. ``rerun`` replays a
manifest into a fresh directory; because every computation is seeded and
every emitter is deterministic, the replayed files match the originals
byte for byte.

Exit codes: 0 success, 1 computational failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .clustering import kmeans
from .data import cluster_summary, derived, entangled_spirals, four_shapes, load_catalog
from .errors import KpclustError
from .kernels import PowerExponentialKernel, kernel_from_dict
from .kpca import fit_kpca
from .manifest import (
    MANIFEST_FORMAT,
    MANIFEST_VERSION,
    fingerprint_file,
    fingerprint_matrix,
    load_manifest,
    save_manifest,
)
from .pipeline import PipelineConfig, robustness_check, run_pipeline, standardize
from .report import (
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
from .rng import derive_seed
from .validation import adjusted_rand

#: Reference kernels for the two bundled simulations.
SIMULATION_KERNELS = {
    "spirals": PowerExponentialKernel(p=0.5, scales=(0.07, 0.13)),
    "shapes": PowerExponentialKernel(p=0.5, scales=(1.24, 1.89)),
}
SIMULATION_CLUSTERS = {"spirals": 2, "shapes": 4}

#: Pipeline-config keys accepted in a grid config file beside the run keys.
_RUN_KEYS = {"data", "data_kind", "column_map"}

REPORT_KMAX_DEFAULT = 5
REPORT_NEIGHBORS = 11


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _base_manifest(command: str, params: dict, fingerprints: dict, created=None) -> dict:
    return {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "command": command,
        "library_version": __version__,
        "created": created if created is not None else _now(),
        "params": params,
        "fingerprints": fingerprints,
    }


def _ensure_out(out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)


def _run_simulate(params: dict, out_dir: str, created=None) -> int:
    which = params["which"]
    n, noise_sd, seed = params["n"], params["noise_sd"], params["seed"]
    restarts = params["restarts"]
    kernel = SIMULATION_KERNELS[which]
    k = SIMULATION_CLUSTERS[which]
    try:
        if which == "spirals":
            sample = entangled_spirals(n, noise_sd, seed)
        else:
            sample = four_shapes(n, seed)
        model = fit_kpca(kernel, sample.points, max_components=2)
        scores = model.training_scores()
        one = kmeans(scores[:, :1], k, seed=derive_seed(seed, 300, 0), restarts=restarts)
        two = kmeans(scores[:, :2], k, seed=derive_seed(seed, 300, 1), restarts=restarts)
        ari_one = adjusted_rand(one.labels, sample.labels)
        ari_two = adjusted_rand(two.labels, sample.labels)
    except KpclustError as exc:
        return _fail(1, str(exc))

    _ensure_out(out_dir)
    write_points_csv(os.path.join(out_dir, "points.csv"), sample.points, sample.labels)
    write_scores_csv(
        os.path.join(out_dir, "scores.csv"),
        scores,
        {"truth": sample.labels, "kmeans_1kpc": one.labels, "kmeans_2kpc": two.labels},
    )
    write_ari_csv(
        os.path.join(out_dir, "ari.csv"),
        [("kmeans_1kpc_vs_truth", ari_one), ("kmeans_2kpc_vs_truth", ari_two)],
    )
    results = {
        "which": which,
        "kernel": kernel.to_dict(),
        "k": k,
        "adjusted_rand": {"1_kpc": ari_one, "2_kpc": ari_two},
        "eigenvalues": [float(v) for v in model.eigenvalues],
        "explained_variance_ratio": [float(v) for v in model.explained_variance_ratio()],
        "generator_params": {key: _jsonable(val) for key, val in sample.params.items()},
    }
    with open(os.path.join(out_dir, "results.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(results, indent=2, sort_keys=True) + "\n")
    manifest = _base_manifest(
        "simulate",
        params,
        {"points": fingerprint_matrix(sample.points)},
        created,
    )
    save_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    print(f"{which}: adjusted Rand 1 KPC = {ari_one:.4f}, 2 KPCs = {ari_two:.4f}")
    return 0


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    if isinstance(value, tuple):
        return list(value)
    return value


def cmd_simulate(args) -> int:
    params = {
        "which": args.which,
        "n": args.n,
        "noise_sd": args.noise,
        "seed": args.seed,
        "restarts": args.restarts,
    }
    return _run_simulate(params, args.out)


def _load_matrix(params: dict):
    """Read the run's data file, returning (matrix, catalog-or-None)."""
    path = params["data"]
    if not os.path.exists(path):
        raise FileNotFoundError(f"data file not found: {path}")
    if params.get("data_kind", "catalog") == "catalog":
        catalog = load_catalog(path, column_map=params.get("column_map"))
        return catalog.values, catalog
    matrix = np.loadtxt(path, delimiter=",", ndmin=2)
    return matrix, None


def _run_grid(params: dict, out_dir: str, created=None) -> int:
    try:
        matrix, _ = _load_matrix(params)
    except (OSError, ValueError, KpclustError) as exc:
        return _fail(2, str(exc))
    config = PipelineConfig.from_dict(params["config"])
    try:
        report = run_pipeline(matrix, config)
    except KpclustError as exc:
        return _fail(1, str(exc))

    best_index = -1
    for cell in report.cells:
        if cell.kpc_count == 1:
            best_index += 1
        if cell is report.best:
            break

    _ensure_out(out_dir)
    write_grid_csv(os.path.join(out_dir, "grid.csv"), report.cells, matrix.shape[0])
    write_best_json(os.path.join(out_dir, "best.json"), report.best, best_index)
    manifest = _base_manifest(
        "grid",
        params,
        {
            "data_file": fingerprint_file(params["data"]),
            "data_matrix": fingerprint_matrix(matrix),
        },
        created,
    )
    manifest["pipeline"] = report.manifest
    save_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    best = report.best
    print(
        f"best: {best.spec.describe()} with {best.kpc_count} KPC(s) -> "
        f"{best.outcome.k} clusters, Dunn {best.outcome.dunn:.6g}"
    )
    return 0


def cmd_grid(args) -> int:
    file_config = {}
    if args.config is not None:
        if not os.path.exists(args.config):
            return _fail(2, f"config file not found: {args.config}")
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                file_config = json.load(fh)
            except json.JSONDecodeError as exc:
                return _fail(2, f"{args.config}: {exc}")
        if not isinstance(file_config, dict):
            return _fail(2, f"{args.config}: config must be a JSON object")

    run_params = {key: file_config[key] for key in _RUN_KEYS if key in file_config}
    pipe_fields = {k: v for k, v in file_config.items() if k not in _RUN_KEYS}
    if args.data is not None:
        run_params["data"] = args.data
    for name in ("seed", "kmax", "restarts"):
        value = getattr(args, name)
        if value is not None:
            pipe_fields[name] = value
    if args.bootstrap_B is not None:
        pipe_fields["bootstrap_b"] = args.bootstrap_B
    if args.threads is not None:
        pipe_fields["workers"] = args.threads
    pipe_fields.setdefault("workers", os.cpu_count() or 1)

    if "data" not in run_params:
        return _fail(2, "no data file given; use --data or a config file")
    try:
        config = PipelineConfig.from_dict(pipe_fields)
    except (TypeError, ValueError) as exc:
        return _fail(2, f"bad configuration: {exc}")
    params = dict(run_params)
    params["config"] = config.to_dict()
    return _run_grid(params, args.out)


def _run_report(params: dict, out_dir: str, created=None) -> int:
    run_dir = params["run"]
    manifest_path = os.path.join(run_dir, "manifest.json")
    best_path = os.path.join(run_dir, "best.json")
    if not (os.path.exists(manifest_path) and os.path.exists(best_path)):
        return _fail(2, f"{run_dir}: not a completed grid run (need manifest.json and best.json)")
    try:
        run_manifest = load_manifest(manifest_path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(2, str(exc))
    if run_manifest.get("command") != "grid":
        return _fail(2, f"{manifest_path}: expected a grid manifest")
    with open(best_path, "r", encoding="utf-8") as fh:
        best = json.load(fh)
    if best.get("outcome", {}).get("kind") != "clusters":
        return _fail(2, f"{best_path}: best cell has no clustering")

    grid_params = run_manifest["params"]
    try:
        matrix, catalog = _load_matrix(grid_params)
    except (OSError, ValueError, KpclustError) as exc:
        return _fail(2, str(exc))
    if fingerprint_matrix(matrix) != run_manifest["fingerprints"]["data_matrix"]:
        return _fail(2, f"{grid_params['data']}: data changed since the grid run")

    config = PipelineConfig.from_dict(grid_params["config"])
    kmax = params["kmax"]
    try:
        spec = kernel_from_dict(best["spec"])
        zdata, _, _ = standardize(matrix)
        model = fit_kpca(spec, zdata, max_components=best["kpc_count"])
        scores = model.training_scores()[:, : best["kpc_count"]]
        cell_seed = derive_seed(config.seed, 200, best["grid_index"])
        assignment = kmeans(
            scores, best["outcome"]["k"], seed=cell_seed, restarts=config.restarts
        )
        rob = robustness_check(
            scores, assignment.labels, kmax=kmax, n_neighbors=REPORT_NEIGHBORS
        )
        agreement = adjusted_rand(assignment.labels, rob.hierarchical.labels)
    except KpclustError as exc:
        return _fail(1, str(exc))

    _ensure_out(out_dir)
    write_scores_csv(
        os.path.join(out_dir, "scores.csv"),
        scores,
        {"kmeans": assignment.labels, "hierarchical": rob.hierarchical.labels},
    )
    write_asw_csv(os.path.join(out_dir, "asw.csv"), rob.asw_by_k, rob.hierarchical.k)
    write_knn_csv(os.path.join(out_dir, "knn.csv"), REPORT_NEIGHBORS, rob.knn_error)
    write_ari_csv(
        os.path.join(out_dir, "ari.csv"), [("kmeans_vs_hierarchical", agreement)]
    )
    if catalog is not None:
        write_summary_csv(
            os.path.join(out_dir, "summary_kmeans.csv"),
            cluster_summary(catalog, assignment.labels),
        )
        write_summary_csv(
            os.path.join(out_dir, "summary_hierarchical.csv"),
            cluster_summary(catalog, rob.hierarchical.labels),
        )
        quantities = derived(catalog)
        defined = quantities.log10_ft_defined
        write_fluence_csv(
            os.path.join(out_dir, "fluence_duration.csv"),
            quantities.log10_t90[defined],
            quantities.log10_ft[defined],
            assignment.labels[defined],
        )

    from . import figures

    figures.save_scatter(
        os.path.join(out_dir, "scores_kmeans.png"),
        scores[:, :2] if scores.shape[1] >= 2 else np.column_stack([scores[:, 0], scores[:, 0]]),
        assignment.labels,
        title="best-cell scores by k-means cluster",
        xlabel="KPC 1",
        ylabel="KPC 2" if scores.shape[1] >= 2 else "KPC 1",
    )
    figures.save_asw_curve(
        os.path.join(out_dir, "asw.png"), rob.asw_by_k, rob.hierarchical.k
    )
    if catalog is not None:
        figures.save_fluence_duration(
            os.path.join(out_dir, "fluence_duration.png"),
            quantities.log10_t90[defined],
            quantities.log10_ft[defined],
            assignment.labels[defined],
        )

    manifest = _base_manifest(
        "report",
        params,
        {"run_manifest": fingerprint_file(manifest_path)},
        created,
    )
    save_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    asw_text = ", ".join(f"k={k}: {v:.4f}" for k, v in sorted(rob.asw_by_k.items()))
    print(f"hierarchical cut: k={rob.hierarchical.k} ({asw_text})")
    print(
        f"{REPORT_NEIGHBORS}-NN LOOCV error {rob.knn_error:.6g}; "
        f"k-means vs hierarchical adjusted Rand {agreement:.4f}"
    )
    return 0


def cmd_report(args) -> int:
    out_dir = args.out if args.out is not None else os.path.join(args.run, "report")
    params = {"run": args.run, "kmax": args.kmax}
    return _run_report(params, out_dir)


def cmd_rerun(args) -> int:
    if not os.path.exists(args.manifest):
        return _fail(2, f"manifest not found: {args.manifest}")
    try:
        manifest = load_manifest(args.manifest)
    except (ValueError, json.JSONDecodeError) as exc:
        return _fail(2, str(exc))
    command = manifest.get("command")
    runners = {"simulate": _run_simulate, "grid": _run_grid, "report": _run_report}
    if command not in runners:
        return _fail(2, f"{args.manifest}: cannot rerun command {command!r}")
    return runners[command](manifest["params"], args.out, created=manifest["created"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpclust",
        description="kernel-PCA clustering: simulations, grid search, reports",
    )
    parser.add_argument("--version", action="version", version=f"kpclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a bundled synthetic benchmark")
    sim.add_argument("which", choices=sorted(SIMULATION_KERNELS))
    sim.add_argument("--n", type=int, default=500, help="sample size (default 500)")
    sim.add_argument("--noise", type=float, default=0.05,
                     help="spiral noise standard deviation (default 0.05)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--restarts", type=int, default=25)
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    grid = sub.add_parser("grid", help="run the kernel/KPC grid search")
    grid.add_argument("--config", help="JSON config file")
    grid.add_argument("--data", help="input CSV (overrides the config file)")
    grid.add_argument("--out", required=True, help="output directory")
    grid.add_argument("--seed", type=int, default=None)
    grid.add_argument("--threads", type=int, default=None,
                      help="worker processes (default: all cores)")
    grid.add_argument("--kmax", type=int, default=None)
    grid.add_argument("--bootstrap-B", type=int, default=None)
    grid.add_argument("--restarts", type=int, default=None)
    grid.set_defaults(func=cmd_grid)

    rep = sub.add_parser("report", help="robustness checks and summaries for a grid run")
    rep.add_argument("--run", required=True, help="grid output directory")
    rep.add_argument("--out", default=None,
                     help="report directory (default: <run>/report)")
    rep.add_argument("--kmax", type=int, default=REPORT_KMAX_DEFAULT,
                     help="largest dendrogram cut to score (default 5)")
    rep.set_defaults(func=cmd_report)

    rerun = sub.add_parser("rerun", help="replay a previous run from its manifest")
    rerun.add_argument("--manifest", required=True)
    rerun.add_argument("--out", required=True, help="output directory for the replay")
    rerun.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
