"""Command line interface.

Subcommands: closed-form, simulate, enumerate, sweep, coverage,
tensor build, tensor analyze, neighbors. Data goes to stdout or --out
files; diagnostics to stderr. Exit codes: 0 ok, 2 usage or validation,
3 resource guard, 4 file-format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import backend
from .analytics import (PredictionMatrix, confidence_feature_table,
                        data_model_counts, feature_frequency,
                        nearest_neighbors, per_class_frequency,
                        shared_error_table, split_feature_density,
                        write_csv_with_warnings)
from .closedform import (expected_accuracy, expected_agreement, q_components)
from .errors import EnumerationSizeError, FormatError, ValidationError
from .exhaustive import enum_accuracy, enum_agreement
from .fileio import (load_manifest, read_activations, read_interaction_tensor,
                     read_labels, write_interaction_tensor)
from .montecarlo import mc_accuracy, mc_agreement
from .params import DEFAULT_PARAMS, FrameworkParams, parse_zeta
from .pipeline import (ActivationMatrix, assign_data_features, build_lambda,
                       cluster_features, fit_pca, lambda_offdiagonal_values,
                       percentile_threshold, project)
from .sweeps import (SweepSpec, parse_grid, sweep_coupled, sweep_coverage,
                     sweep_single, sweep_zeta, write_csv, write_sidecar)

GAMMA_CORR_FLOOR = 1e-8
GAMMA_CORR_CEIL = 1.0 - 1e-9


def _load_params(path: str | None) -> FrameworkParams:
    if path is None:
        return DEFAULT_PARAMS
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read params file {path}: {e}") from e
    return FrameworkParams.from_json(text)


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _cmd_closed_form(args) -> int:
    params = _load_params(args.params)
    zeta = parse_zeta(args.zeta)
    qc = q_components(params)
    acc = float(expected_accuracy(params))
    agr = float(expected_agreement(params, zeta, components=qc))
    _emit_json({
        "acc": acc, "agr": agr, "diff": acc - agr,
        "q1": qc.q1, "q2": list(qc.q2), "q3": qc.q3,
        "c_d": params.c_d, "c_r": params.c_r,
        "params": params.to_dict(), "zeta": zeta.spec_string(),
    })
    return 0


def _cmd_simulate(args) -> int:
    params = _load_params(args.params)
    zeta = parse_zeta(args.zeta)
    acc_est = mc_accuracy(params, args.samples, args.seed)
    agr_est = mc_agreement(params, zeta, args.samples, args.seed, mode=args.mode)
    acc_cf = float(expected_accuracy(params))
    agr_cf = float(expected_agreement(params, zeta))
    _emit_json({
        "acc_estimate": acc_est.to_dict(), "agr_estimate": agr_est.to_dict(),
        "closed_form": {"acc": acc_cf, "agr": agr_cf},
        "delta": {"acc": acc_est.mean - acc_cf, "agr": agr_est.mean - agr_cf},
        "mode": args.mode, "backend": backend.backend_name(),
        "params": params.to_dict(), "zeta": zeta.spec_string(),
    })
    return 0


def _cmd_enumerate(args) -> int:
    params = _load_params(args.params)
    zeta = parse_zeta(args.zeta)
    acc = enum_accuracy(params)
    agr = enum_agreement(params, zeta)
    _emit_json({
        "acc": f"{acc.numerator}/{acc.denominator}",
        "agr": f"{agr.numerator}/{agr.denominator}",
        "params": params.to_dict(), "zeta": zeta.spec_string(),
    })
    return 0


def _cmd_sweep(args) -> int:
    params = _load_params(args.params)
    zeta = parse_zeta(args.zeta)
    grid = parse_grid(args.grid)
    if args.family:
        if not args.eta_grid:
            raise ValidationError("--family requires --eta-grid")
        rows = sweep_zeta(params, args.family, parse_grid(args.eta_grid),
                          args.theta, args.vary, grid,
                          couple_alpha=args.couple)
    else:
        spec = SweepSpec(base=params, vary=args.vary, grid=grid, zeta=zeta,
                         couple_alpha=args.couple)
        rows = sweep_coupled(spec) if args.couple is not None else sweep_single(spec)
    write_csv(rows, args.out)
    write_sidecar(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_coverage(args) -> int:
    params = _load_params(args.params)
    rows = sweep_coverage(params, parse_grid(args.grid),
                          mc_samples=args.mc_samples, seed=args.seed)
    write_csv(rows, args.out)
    write_sidecar(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _clamp_gamma_corr(raw: float) -> float:
    return min(max(raw, GAMMA_CORR_FLOOR), GAMMA_CORR_CEIL)


def _cmd_tensor_build(args) -> int:
    manifest = load_manifest(args.manifest)
    pcs = manifest["pcs"]
    projections = []
    for entry in manifest["models"]:
        act = ActivationMatrix(model_id=entry["id"],
                               values=read_activations(entry["activations"]))
        basis = fit_pca(act, pcs)
        projections.append(project(act, basis))
    lam = build_lambda(projections)
    raw_corr = percentile_threshold(lambda_offdiagonal_values(lam),
                                    manifest["corr_percentile"])
    gamma_corr = _clamp_gamma_corr(raw_corr)
    clusters = cluster_features(lam, gamma_corr)
    pooled = np.concatenate([p.normalized.ravel() for p in projections])
    gamma_data = percentile_threshold(pooled, manifest["data_percentile"])
    _, omega = assign_data_features(projections, clusters, gamma_data)
    write_interaction_tensor(args.out, omega)
    meta = {
        "models": [e["id"] for e in manifest["models"]],
        "pcs": pcs,
        "corr_percentile": manifest["corr_percentile"],
        "data_percentile": manifest["data_percentile"],
        "gamma_corr_percentile_value": raw_corr,
        "gamma_corr": gamma_corr,
        "gamma_data": gamma_data,
        "n_clusters": clusters.n_clusters,
        "cluster_sizes": clusters.cluster_sizes().tolist(),
        "dims": {"M": omega.dims[0], "N": omega.dims[1], "T": omega.dims[2]},
        "nnz": omega.nnz,
    }
    meta_path = args.meta or str(Path(args.out).with_suffix(".meta.json"))
    Path(meta_path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote tensor {args.out} ({omega.nnz} triples, "
          f"{clusters.n_clusters} clusters) and metadata {meta_path}",
          file=sys.stderr)
    return 0


def _load_predictions(args, omega) -> PredictionMatrix:
    if not args.manifest:
        raise ValidationError(f"report {args.report!r} requires --manifest "
                              "with prediction files")
    manifest = load_manifest(args.manifest)
    labels_path = args.labels or manifest["labels"]
    if labels_path is None:
        raise ValidationError("no labels file in manifest and no --labels given")
    labels = read_labels(labels_path)
    preds = []
    for entry in manifest["models"]:
        if entry["predictions"] is None:
            raise ValidationError(f"model {entry['id']!r} has no predictions file")
        preds.append(read_labels(entry["predictions"]))
    matrix = np.stack(preds, axis=0)
    num_classes = max(int(matrix.max()), int(labels.max())) + 1
    pm = PredictionMatrix(predictions=matrix, true_labels=labels,
                          num_classes=num_classes)
    if pm.n_models != omega.dims[0]:
        raise ValidationError(
            f"tensor has M={omega.dims[0]} models, manifest has {pm.n_models}"
        )
    return pm


def _load_true_labels(args) -> np.ndarray:
    if args.labels:
        return read_labels(args.labels)
    if args.manifest:
        manifest = load_manifest(args.manifest)
        if manifest["labels"]:
            return read_labels(manifest["labels"])
    raise ValidationError(f"report {args.report!r} requires --labels "
                          "or a manifest with labels")


def _cmd_tensor_analyze(args) -> int:
    omega = read_interaction_tensor(args.tensor)
    report = args.report
    if report == "o1":
        rows = feature_frequency(omega)
        model_counts = omega.model_feature_matrix().sum(axis=0)
        write_csv_with_warnings(
            args.out, ["feature_id", "data_count", "model_count"],
            [(t, c, int(model_counts[t])) for t, c in rows])
    elif report == "o2":
        preds = _load_predictions(args, omega)
        rows = confidence_feature_table(omega, preds)
        write_csv_with_warnings(args.out, ["datum", "confidence", "n_features"], rows)
    elif report == "o2density":
        preds = _load_predictions(args, omega)
        rows, flags = split_feature_density(omega, preds)
        write_csv_with_warnings(
            args.out,
            ["feature_id", "global_rank", "density_high_confidence",
             "density_low_confidence"], rows, flags)
    elif report == "o3":
        rows, corr, flags = data_model_counts(omega)
        if corr is not None:
            flags = [f"pearson_correlation={corr:.12g}"] + list(flags)
        write_csv_with_warnings(
            args.out, ["feature_id", "data_count", "model_count"], rows, flags)
    elif report == "o4":
        preds = _load_predictions(args, omega)
        rows, flags = shared_error_table(omega.model_feature_matrix(), preds,
                                         mode=args.mistake_mode)
        write_csv_with_warnings(
            args.out,
            ["model_i", "model_j", "shared_features", "shared_error"], rows, flags)
    elif report == "neighbors":
        if args.index is None:
            raise ValidationError("report 'neighbors' requires --index")
        rows = nearest_neighbors(omega.data_feature_matrix(), args.index, args.top)
        write_csv_with_warnings(args.out, ["datum", "similarity"], rows)
    elif report == "perclass":
        labels = _load_true_labels(args)
        if labels.shape[0] != omega.dims[1]:
            raise ValidationError(
                f"labels cover {labels.shape[0]} data, tensor has N={omega.dims[1]}"
            )
        table = per_class_frequency(omega.data_feature_matrix(), labels)
        header = ["feature_id"] + [f"class_{c}" for c in range(table.shape[1])]
        rows = [(t, *table[t].tolist()) for t in range(table.shape[0])]
        write_csv_with_warnings(args.out, header, rows)
    else:
        raise ValidationError(f"unknown report {report!r}")
    print(f"wrote report {report} to {args.out}", file=sys.stderr)
    return 0


def _cmd_neighbors(args) -> int:
    args.report = "neighbors"
    return _cmd_tensor_analyze(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifl",
        description="Feature-learning model analysis and interaction-tensor tools")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker threads (or set IFL_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params_zeta(p):
        p.add_argument("--params", default=None,
                       help="JSON file with the six model parameters "
                            "(default: built-in baseline)")
        p.add_argument("--zeta", default="constant:0.9",
                       help="agreement function, e.g. constant:0.9, "
                            "proportional:2.0, step:2:0.8")

    p = sub.add_parser("closed-form", help="closed-form accuracy and agreement")
    add_params_zeta(p)
    p.set_defaults(func=_cmd_closed_form)

    p = sub.add_parser("simulate", help="Monte-Carlo estimates vs closed forms")
    add_params_zeta(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["rao", "bernoulli"], default="rao")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("enumerate", help="exact rational oracle (small instances)")
    add_params_zeta(p)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("sweep", help="closed-form parameter sweep to CSV")
    add_params_zeta(p)
    p.add_argument("--vary", required=True,
                   choices=["p_d", "c", "t_d", "t_r", "n_d", "n_r"])
    p.add_argument("--grid", required=True, help="start:stop:step")
    p.add_argument("--couple", type=float, default=None,
                   help="tie the dominant counterpart to floor(alpha * value)")
    p.add_argument("--family", choices=["constant", "proportional", "step"],
                   default=None, help="sweep an eta grid of this family as well")
    p.add_argument("--eta-grid", default=None, help="start:stop:step for eta")
    p.add_argument("--theta", type=float, default=None,
                   help="step-family plateau (default 0.8)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("coverage", help="coverage bound over a beta grid")
    p.add_argument("--params", default=None)
    p.add_argument("--grid", required=True, help="start:stop:step over beta")
    p.add_argument("--mc-samples", type=int, default=None,
                   help="add a Monte-Carlo accuracy column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_coverage)

    tensor = sub.add_parser("tensor", help="interaction-tensor pipeline")
    tsub = tensor.add_subparsers(dest="tensor_command", required=True)

    p = tsub.add_parser("build", help="build the tensor from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--meta", default=None,
                   help="metadata JSON path (default: <out>.meta.json)")
    p.set_defaults(func=_cmd_tensor_build)

    p = tsub.add_parser("analyze", help="reports over a built tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--report", required=True,
                   choices=["o1", "o2", "o2density", "o3", "o4",
                            "neighbors", "perclass"])
    p.add_argument("--manifest", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--mistake-mode", choices=["identical", "joint"],
                   default="identical")
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tensor_analyze)

    p = sub.add_parser("neighbors", help="nearest data by feature overlap")
    p.add_argument("--tensor", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_neighbors)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        backend.configure_threads(args.threads)
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EnumerationSizeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
