"""``qborn`` command line: gen-data, fit, density, classify.

Results are CSV; every file written with ``--out`` gets a ``<out>.meta.json``
sidecar holding the resolved configuration and tool version. Exit codes:
0 success, 2 usage error, 3 data error, 4 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import NoiseSpec
from .datagen import BiGaussConfig, XorConfig, config_dict, format_csv, gen_bigaussian, gen_xor, read_csv
from .errors import DataError, DegenerateStateError, DimensionError
from .estimator import (
    classify_circuit,
    classify_exact,
    density_circuit,
    density_exact,
    evaluate_many,
    pdf_scale,
)
from .model import TrainedModel, fit
from .oracle import KdeConfig, kde, roc_auc
from .qfm import LabelEncoding, LabelKind, RffQfm, SinCosQfm, rff_sample_params

EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 2, 3, 4

logger = logging.getLogger("qborn")


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _sidecar(out: Path, meta: dict) -> None:
    doc = {"tool": "qborn", "version": __version__, **meta}
    _write_text(Path(str(out) + ".meta.json"), json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _emit(out: str | None, text: str, meta: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    _write_text(Path(out), text)
    _sidecar(Path(out), meta)


# ---------------------------------------------------------------- gen-data

def cmd_gen_data(args) -> int:
    if args.kind == "xor":
        cfg = XorConfig(args.n_per_blob, args.blob_std, args.seed)
        data = gen_xor(cfg)
    else:
        cfg = BiGaussConfig(args.n, tuple(args.means), tuple(args.stds), tuple(args.weights), args.seed)
        data = gen_bigaussian(cfg)
    meta = {"command": "gen-data", "kind": args.kind, "config": config_dict(cfg), "rows": len(data)}
    _emit(args.out, format_csv(data), meta)
    return 0


# --------------------------------------------------------------------- fit

def _noise(args) -> NoiseSpec:
    return NoiseSpec(args.noise_1q, args.noise_2q, args.noise_readout, args.noise_reset)


def cmd_fit(args) -> int:
    want_labels = args.label_encoding is not None
    table = read_csv(args.data, require_label=want_labels)
    d = table.features.shape[1]
    if args.qfm == "sincos":
        qfm = SinCosQfm(d)
        qfm_cfg = {"kind": "sincos", "dim": d}
    else:
        qfm = RffQfm(rff_sample_params(args.rff_dim, args.gamma, d, args.seed))
        qfm_cfg = {"kind": "rff", "D": args.rff_dim, "gamma": args.gamma, "dim": d, "seed": args.seed}
    labeled = table.labeled and not args.unlabeled
    enc = None
    if labeled:
        k = args.num_classes or max(2, int(table.labels.max()))
        if table.labels.max() > k:
            raise DataError(f"label {int(table.labels.max())} exceeds --num-classes {k}")
        enc = LabelEncoding(LabelKind(args.label_encoding or "basis"), k)
    meta = {
        "command": "fit",
        "data": Path(args.data).name,
        "qfm": qfm_cfg,
        "label_encoding": None if enc is None else enc.descriptor(),
        "seed": args.seed,
    }
    model = fit(table.features, qfm, table.labels if labeled else None, enc, metadata=meta)
    try:
        Path(args.out).write_text(model.dumps(), encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc.strerror}") from None
    report = {
        "model": str(args.out),
        "n_qubits": model.dataset.n_qubits,
        "n_samples": model.dataset.n_samples,
        "labeled": model.labeled,
        "cnot_count": model.circuit.cnot_count,
        "gate_count": len(model.circuit),
        "fidelity": model.fidelity,
    }
    print(json.dumps(report, sort_keys=True))
    return 0


# ----------------------------------------------------------------- queries

def _queries(args, dim: int):
    if args.queries is not None and args.grid is not None:
        raise UsageError("give either --queries or --grid, not both")
    if args.grid is not None:
        lo, hi, steps = args.grid
        steps = int(steps)
        if steps < 2:
            raise UsageError("grid resolution must be at least 2")
        axis = np.linspace(float(lo), float(hi), steps)
        pts = np.array(list(itertools.product(axis, repeat=dim)), dtype=np.float64)
        return pts, None, {"grid": [float(lo), float(hi), steps]}
    if args.queries is None:
        raise UsageError("need --queries CSV or --grid LO HI STEPS")
    table = read_csv(args.queries)
    if table.features.shape[1] != dim:
        raise DimensionError(f"queries have {table.features.shape[1]} features, model expects {dim}")
    return table.features, table.labels, {"queries": Path(args.queries).name}


def _run_config(args) -> dict:
    cfg = {"exact": args.exact, "seed": args.seed}
    if not args.exact:
        cfg["shots"] = args.shots
        cfg["noise"] = config_dict(_noise(args))
    return cfg


def _check_shots(args) -> None:
    if not args.exact and args.shots < 1:
        raise UsageError("--shots must be >= 1")


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------- density

def cmd_density(args) -> int:
    _check_shots(args)
    model = TrainedModel.load(args.model)
    if model.labeled:
        raise UsageError("model is labeled; use `qborn classify` for classification models")
    qfm, ds = model.qfm, model.dataset
    pts, _, source = _queries(args, qfm.dim)
    noise = _noise(args)

    def one(i, x):
        if args.exact:
            return density_exact(ds, x, qfm)
        return density_circuit(ds, x, qfm, args.shots, args.seed, noise, stream_key=(i,))

    results = evaluate_many(one, pts)
    d = pts.shape[1]
    header = [f"x{i + 1}" for i in range(d)] + ["estimate", "stderr", "shots"]
    meta = {"command": "density", "model": Path(args.model).name, **source, **_run_config(args)}
    scale = None
    if args.rescale is not None:
        lo, hi = args.rescale
        scale = pdf_scale(ds, qfm, lo, hi)
        header += ["scaled_estimate", "scaled_stderr"]
        meta["rescale"] = {"interval": [lo, hi], "rule": "trapezoid", "points": 1001, "factor": scale}
    kde_cfg = None
    if args.compare_kde:
        if model.training_features is None:
            raise DataError("model file carries no training features for the KDE comparison")
        gamma = args.kde_gamma
        if gamma is None:
            if not isinstance(qfm, RffQfm):
                raise UsageError("--kde-gamma is required for models without an RFF feature map")
            gamma = qfm.params.gamma
        kde_cfg = KdeConfig(gamma, normalized=True)
        header.append("kde")
        meta["kde"] = {"gamma": gamma, "normalized": True, "bandwidth_rule": "matched to feature-map gamma"
                       if args.kde_gamma is None else "user supplied"}
    rows = []
    for x, est in zip(pts, results):
        row = [_fmt(v) for v in x] + [_fmt(est.value), _fmt(est.stderr), str(est.shots)]
        if scale is not None:
            row += [_fmt(est.value * scale), _fmt(est.stderr * scale)]
        if kde_cfg is not None:
            row.append(_fmt(kde(model.training_features, x, kde_cfg)))
        rows.append(row)
    meta["rows"] = len(rows)
    _emit(args.out, _rows_to_csv(header, rows), meta)
    return 0


# ---------------------------------------------------------------- classify

def cmd_classify(args) -> int:
    _check_shots(args)
    model = TrainedModel.load(args.model)
    if not model.labeled:
        raise UsageError("model has no labels; use `qborn density` for density models")
    qfm, ds, enc = model.qfm, model.dataset, model.label_encoding
    pts, labels, source = _queries(args, qfm.dim)
    noise = _noise(args)

    def one(i, x):
        if args.exact:
            return classify_exact(ds, x, qfm, enc)
        return classify_circuit(ds, x, qfm, enc, args.shots, args.seed, noise, stream_key=(i,))

    results = evaluate_many(one, pts)
    K = enc.num_classes
    d = pts.shape[1]
    header = [f"x{i + 1}" for i in range(d)]
    if labels is not None:
        header.append("label")
    header += [f"joint_{k}" for k in range(1, K + 1)] + [f"conditional_{k}" for k in range(1, K + 1)]
    header += ["predicted", "degenerate"]
    rows = []
    for i, (x, res) in enumerate(zip(pts, results)):
        row = [_fmt(v) for v in x]
        if labels is not None:
            row.append(str(int(labels[i])))
        row += [_fmt(v) for v in res.joint] + [_fmt(v) for v in res.conditional]
        row += [str(res.predicted), str(int(res.degenerate))]
        rows.append(row)
    meta = {
        "command": "classify",
        "model": Path(args.model).name,
        **source,
        **_run_config(args),
        "tie_break": "lowest class index",
        "decision_score": "conditional",
        "rows": len(rows),
    }
    if labels is not None and K == 2:
        if len(set(labels.tolist())) < 2:
            logger.warning("queries contain a single class; ROC-AUC not computed")
        else:
            auc = roc_auc([r.conditional[1] for r in results], labels == 2)
            meta["roc_auc"] = auc
            print(json.dumps({"roc_auc": auc, "positive_class": 2, "score": "conditional_2"}, sort_keys=True),
                  file=sys.stdout if args.out is not None else sys.stderr)
    _emit(args.out, _rows_to_csv(header, rows), meta)
    return 0


# ------------------------------------------------------------------ parser

def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help="qborn-model/1 JSON file from `qborn fit`")
    p.add_argument("--queries", help="CSV of query points (x1,...,xd[,label])")
    p.add_argument("--grid", nargs=3, type=float, metavar=("LO", "HI", "STEPS"),
                   help="evaluate on a regular grid over [LO, HI] per feature")
    p.add_argument("--shots", type=int, default=1024, help="circuit executions per query (default 1024)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="exact Born probabilities instead of shots")
    p.add_argument("--noise-1q", type=float, default=0.0, help="depolarizing probability after 1-qubit gates")
    p.add_argument("--noise-2q", type=float, default=0.0, help="depolarizing probability after CNOTs")
    p.add_argument("--noise-readout", type=float, default=0.0, help="per-bit readout flip probability")
    p.add_argument("--noise-reset", type=float, default=0.0, help="per-qubit reset error probability")
    p.add_argument("--out", help="output CSV (default: stdout, no sidecar)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qborn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qborn {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate the XOR or bi-Gaussian toy dataset")
    g.add_argument("kind", choices=["xor", "bigauss"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-per-blob", type=int, default=XorConfig.n_per_blob)
    g.add_argument("--blob-std", type=float, default=XorConfig.blob_std)
    g.add_argument("--n", type=int, default=BiGaussConfig.n)
    g.add_argument("--means", type=float, nargs=2, default=list(BiGaussConfig.means))
    g.add_argument("--stds", type=float, nargs=2, default=list(BiGaussConfig.stds))
    g.add_argument("--weights", type=float, nargs=2, default=list(BiGaussConfig.weights))
    g.add_argument("--out", help="output CSV (default: stdout)")
    g.set_defaults(func=cmd_gen_data)

    f = sub.add_parser("fit", help="build and compile a dataset state")
    f.add_argument("data", help="training CSV")
    f.add_argument("--qfm", choices=["sincos", "rff"], default="sincos")
    f.add_argument("--gamma", type=float, default=80.0, help="RFF Gaussian kernel width (default 80)")
    f.add_argument("--rff-dim", type=int, default=8, help="number of random Fourier features D (default 8)")
    f.add_argument("--seed", type=int, default=0, help="seed for the RFF parameters")
    f.add_argument("--label-encoding", choices=[k.value for k in LabelKind],
                   help="label encoding (default: basis when the CSV has a label column)")
    f.add_argument("--num-classes", type=int, help="number of classes (default: largest label, at least 2)")
    f.add_argument("--unlabeled", action="store_true", help="ignore a label column and fit a density model")
    f.add_argument("--out", required=True, help="model file to write")
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("density", help="estimate densities from a fitted model")
    _add_run_flags(d)
    d.add_argument("--compare-kde", action="store_true", help="add a Gaussian KDE column")
    d.add_argument("--kde-gamma", type=float, help="KDE gamma (default: the model's RFF gamma)")
    d.add_argument("--rescale", nargs=2, type=float, metavar=("LO", "HI"),
                   help="add unit-area rescaled columns, normalizing over [LO, HI]")
    d.set_defaults(func=cmd_density)

    c = sub.add_parser("classify", help="class probabilities from a fitted labeled model")
    _add_run_flags(c)
    c.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="qborn: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DataError, DimensionError) as exc:
        print(f"qborn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateStateError as exc:
        print(f"qborn: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"qborn: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
