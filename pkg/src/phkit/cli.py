"""Command-line front end.

Exit status is 0 on success, 1 for bad input or arguments and 2 for an
internal failure. ``--max-dim`` always counts homology dimensions; Rips and
clique complexes are built one simplex dimension higher so the top
homology dimension is complete.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .alpha import alpha_filtration
from .complexes import WeightedGraph, clique_filtration, cubical_filtration, rips_filtration
from .geometry import SHAPE_KINDS, ParseError, ShapeSpec, distance_matrix, generate_shape
from .geometry import load_point_cloud_csv, parse_pdb_ca, save_point_cloud_csv
from .kernels import KERNEL_KINDS, KernelConfig, gram_matrix
from .learn import SVC, evaluate, grid_search_cv
from .metrics import FimParams, InfiniteBarMismatch, SwParams, bottleneck, fisher_information_metric
from .metrics import sliced_wasserstein, wasserstein
from .persistence import diagrams
from .plotting import barcode_svg, diagram_svg
from .vectorize import (
    BIN_KINDS,
    AlgebraicCoordinates,
    BarcodeStatistics,
    BinnedFeatures,
    FeatureMatrix,
    PersistenceBoW,
    PersistenceFisherVector,
    PersistenceVLAD,
    SignatureLayer,
    TropicalCoordinates,
    fit_codebook,
    fit_gmm,
)
from .vectorize.codebook import Codebook, GmmModel

__all__ = ["main", "build_parser", "UserError"]

VECTOR_METHODS = ("stats", "algebraic", "tropical", "bins", "pbow", "pvlad", "pfv", "signature")
DIST_METHODS = ("bottleneck", "wasserstein", "sw", "fim")


class UserError(Exception):
    """Problem with the invocation or its inputs (exit status 1)."""


def _require(path):
    p = Path(path)
    if not p.is_file():
        raise UserError(f"{p}: no such file")
    return p


def _load_points(path):
    p = _require(path)
    if p.suffix.lower() in (".pdb", ".ent"):
        return parse_pdb_ca(p)
    return load_point_cloud_csv(p)


def _out(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_diagrams(paths):
    ds = [io.read_diagram_csv(_require(p)) for p in paths]
    if not ds:
        raise UserError("no diagram files given")
    return ds, [Path(p).stem for p in paths]


# -- subcommands -------------------------------------------------------------


def cmd_gen(a):
    spec = ShapeSpec(a.kind, a.n, a.noise, a.seed, a.radius, separation=a.separation, n_clusters=a.clusters)
    pc = generate_shape(spec)
    if a.output in (None, "-"):
        for row in pc.points:
            print(",".join(repr(float(x)) for x in row))
    else:
        save_point_cloud_csv(pc, a.output)


def cmd_barcode(a):
    if a.max_dim < 0:
        raise UserError("--max-dim must be >= 0")
    if a.complex == "rips":
        pts = _load_points(a.input).points
        f = rips_filtration(distance_matrix(pts), max_dim=a.max_dim + 1, max_scale=a.max_scale)
    elif a.complex == "alpha":
        f = alpha_filtration(_load_points(a.input).points)
    elif a.complex == "cubical":
        f = cubical_filtration(load_point_cloud_csv(_require(a.input)).points)
    else:
        rows = load_point_cloud_csv(_require(a.input)).points
        if rows.shape[1] != 3:
            raise UserError(f"{a.input}: clique input needs rows 'u,v,weight'")
        n = int(rows[:, :2].max()) + 1 if a.vertices is None else a.vertices
        g = WeightedGraph(n, tuple((int(u), int(v), w) for u, v, w in rows.tolist() if w <= a.max_scale))
        f = clique_filtration(g, max_dim=a.max_dim + 1)
    if a.dump_filtration:
        Path(a.dump_filtration).write_text(f.to_text())
    _out(io.format_diagram_csv(diagrams(f, max_dim=a.max_dim)), a.output)


def _vectorizer(a, ds):
    m = a.method
    if m == "stats":
        return BarcodeStatistics(window=(a.window[0], a.window[1]))
    if m == "algebraic":
        return AlgebraicCoordinates(a.homology_dim)
    if m == "tropical":
        return TropicalCoordinates(a.homology_dim)
    if m == "bins":
        dims = tuple(range(max(d.max_dim for d in ds) + 1)) if a.dims is None else tuple(a.dims)
        return BinnedFeatures(L=a.L, bin_width=a.bin_width, kinds=tuple(a.kinds), dims=dims)
    if m == "signature":
        return SignatureLayer(n_units=a.units, homology_dim=a.homology_dim)
    if a.codebook is None:
        raise UserError(f"--method {m} needs a fitted model: run 'phkit fit-codebook' and pass --codebook")
    model = io.load_codebook(_require(a.codebook))
    if m in ("pbow", "pvlad"):
        if not isinstance(model, Codebook):
            raise UserError(f"{a.codebook}: expected a k-means codebook, found a GMM")
        est = (PersistenceBoW if m == "pbow" else PersistenceVLAD)(n_words=model.k, homology_dim=model.homology_dim)
        est.codebook_ = model
    else:
        if not isinstance(model, GmmModel):
            raise UserError(f"{a.codebook}: expected a GMM, found a k-means codebook")
        est = PersistenceFisherVector(n_components=model.m, homology_dim=model.homology_dim)
        est.gmm_ = model
    est.n_features_out_ = len(est._feature_names())
    return est


def cmd_vectorize(a):
    ds, ids = _load_diagrams(a.diagrams)
    dims = {d.max_dim for d in ds}
    if len(dims) > 1:
        raise UserError(f"diagram files disagree on homology dimensions: {sorted(dims)}")
    est = _vectorizer(a, ds)
    if not hasattr(est, "n_features_out_"):
        est.fit(ds)
    X = est.transform(ds)
    fm = FeatureMatrix(X, list(est.get_feature_names_out()), ids)
    io.write_feature_csv(fm, a.output)


def cmd_fit_codebook(a):
    ds, _ = _load_diagrams(a.diagrams)
    if a.gmm:
        model = fit_gmm(ds, a.k, seed=a.seed, homology_dim=a.homology_dim)
    else:
        model = fit_codebook(ds, a.k, weighted=a.weighted, seed=a.seed, homology_dim=a.homology_dim)
    io.save_codebook(model, a.output)


def cmd_dist(a):
    (d1, d2), _ = _load_diagrams([a.first, a.second])
    x, y = d1[a.homology_dim], d2[a.homology_dim]
    if a.method == "bottleneck":
        v = bottleneck(x, y)
    elif a.method == "wasserstein":
        v = wasserstein(x, y, a.p)
    elif a.method == "sw":
        v = sliced_wasserstein(x, y, SwParams(a.slices))
    else:
        v = fisher_information_metric(x, y, FimParams(a.sigma, a.resolution))
    print(f"{v:.12g}")


def cmd_gram(a):
    cfg = KernelConfig(
        kind=a.kernel,
        sigma=a.sigma,
        C=a.C,
        p=a.p,
        h=a.h,
        t0=a.t0,
        fim=FimParams(a.fim_sigma),
        levels=a.levels,
        radii=tuple(a.radii or ()),
        n_centers=a.centers,
        n_boot=a.boot,
        homology_dim=a.homology_dim,
        cap=a.cap,
        printed_sign=a.printed_sign,
        seed=a.seed,
    )
    if a.kernel in ("mphk", "smurphk"):
        corpus = [_load_points(p) for p in a.inputs]
    else:
        corpus, _ = _load_diagrams(a.inputs)
    ids = [Path(p).stem for p in a.inputs]
    gm = gram_matrix(corpus, cfg, ids)
    io.write_gram_csv(gm.values, ids, a.output)
    print(f"min eigenvalue {gm.min_eigenvalue:.6g} ({'PSD' if gm.is_psd else 'not PSD'})", file=sys.stderr)


def _aligned_labels(ids, label_path):
    lid, labels = io.read_labels_csv(_require(label_path))
    lookup = dict(zip(lid, labels))
    missing = [i for i in ids if i not in lookup]
    if missing:
        raise UserError(f"{label_path}: no label for ids {missing[:5]}")
    return np.array([lookup[i] for i in ids])


def cmd_classify(a):
    from sklearn.model_selection import train_test_split

    if a.kernel == "precomputed":
        X, ids = io.read_gram_csv(_require(a.features))
    else:
        fm = io.read_feature_csv(_require(a.features))
        X, ids = fm.values, fm.ids
    y = _aligned_labels(ids, a.labels)
    classes = sorted(set(y.tolist()))
    if a.mixed_class not in classes:
        raise UserError(f"--mixed-class {a.mixed_class!r} is not a label (labels: {classes})")
    tr, te = train_test_split(np.arange(len(y)), test_size=a.test_size, stratify=y, random_state=a.seed)
    gammas = [2.0**e for e in range(a.gamma_range[0], a.gamma_range[1] + 1)]
    Cs = [2.0**e for e in range(a.c_range[0], a.c_range[1] + 1)]
    if a.kernel == "precomputed":
        Ktr = X[np.ix_(tr, tr)]
        gs = grid_search_cv(Ktr, y[tr], Cs, [1.0], folds=a.folds, kernel="precomputed", seed=a.seed)
        clf = SVC(kernel="precomputed", C=gs.C).fit(Ktr, y[tr])
        pred = clf.predict(X[np.ix_(te, tr)])
    else:
        gs = grid_search_cv(X[tr], y[tr], Cs, gammas, folds=a.folds, kernel=a.kernel, seed=a.seed)
        clf = gs.estimator(kernel=a.kernel).fit(X[tr], y[tr])
        pred = clf.predict(X[te])
    order = [a.mixed_class] + [c for c in classes if c != a.mixed_class]
    report = evaluate(pred, y[te], a.mixed_class, classes=order)
    gamma = "" if a.kernel != "rbf" else f" gamma={gs.gamma:g}"
    print(f"selected C={gs.C:g}{gamma} (CV accuracy {100 * gs.cv_accuracy:.1f}%)")
    print(report.table())
    if a.model_out:
        clf.save(a.model_out)


def cmd_predict(a):
    clf = SVC.load(_require(a.model))
    fm = io.read_feature_csv(_require(a.features))
    io.write_labels_csv(fm.ids, clf.predict(fm.values).tolist(), a.output)


def cmd_plot(a):
    (d,), (stem,) = _load_diagrams([a.input])
    svg = diagram_svg(d, title=stem) if a.kind == "pd" else barcode_svg(d, title=stem)
    _out(svg, a.output)


def cmd_demo(a):
    from .pipeline import compute_diagrams, run_protocol, shape_corpus

    clouds, labels = shape_corpus(a.per_class, a.points, a.noise, seed=a.seed)
    ds = compute_diagrams(clouds)
    res = run_protocol(ds, labels, bin_width=a.bin_width, L=a.L, seed=a.seed)
    print(f"{res.n_features} features; C={res.C:g} gamma={res.gamma:g}")
    print(res.report.table())


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phkit", description="Persistent homology features, distances and kernels.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic point cloud")
    p.add_argument("--kind", choices=SHAPE_KINDS, required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--radius", type=float)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--clusters", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("barcode", help="persistence diagram of a point cloud, graph or grid")
    p.add_argument("input")
    p.add_argument("--complex", choices=("rips", "alpha", "cubical", "clique"), default="rips")
    p.add_argument("--max-dim", type=int, default=1, help="highest homology dimension reported")
    p.add_argument("--max-scale", type=float, default=np.inf)
    p.add_argument("--vertices", type=int, help="vertex count for clique input (default: max index + 1)")
    p.add_argument("--dump-filtration")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_barcode)

    p = sub.add_parser("vectorize", help="feature matrix from diagram files")
    p.add_argument("--diagrams", nargs="+", required=True)
    p.add_argument("--method", choices=VECTOR_METHODS, required=True)
    p.add_argument("--homology-dim", type=int, default=1)
    p.add_argument("--window", type=float, nargs=2, default=(4.5, 5.5))
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--bin-width", type=float, default=0.5)
    p.add_argument("--kinds", nargs="+", choices=BIN_KINDS, default=["bt_hist", "dt_hist", "pl_hist"])
    p.add_argument("--dims", type=int, nargs="+")
    p.add_argument("--units", type=int, default=9)
    p.add_argument("--codebook")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("fit-codebook", help="fit a k-means codebook or GMM on diagrams")
    p.add_argument("--diagrams", nargs="+", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--gmm", action="store_true")
    p.add_argument("--homology-dim", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_fit_codebook)

    p = sub.add_parser("dist", help="distance between two diagram files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--method", choices=DIST_METHODS, default="bottleneck")
    p.add_argument("--homology-dim", type=int, default=1)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--slices", type=int, default=50)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--resolution", type=int, default=100)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("gram", help="kernel Gram matrix over diagrams (or clouds for mphk/smurphk)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--kernel", choices=KERNEL_KINDS, default="pssk")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--fim-sigma", type=float, default=0.1)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--radii", type=float, nargs="+")
    p.add_argument("--centers", type=int, default=10)
    p.add_argument("--boot", type=int, default=1)
    p.add_argument("--homology-dim", type=int, default=1)
    p.add_argument("--cap", type=float)
    p.add_argument("--printed-sign", action="store_true", help="use exp(+d/h) for gtk/glk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("classify", help="tune, train and evaluate an SVM")
    p.add_argument("--features", required=True, help="feature CSV, or Gram CSV with --kernel precomputed")
    p.add_argument("--labels", required=True)
    p.add_argument("--mixed-class", required=True)
    p.add_argument("--kernel", choices=("rbf", "linear", "precomputed"), default="rbf")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--test-size", type=float, default=1 / 3)
    p.add_argument("--c-range", type=int, nargs=2, default=(-14, 14), help="log2 bounds of the C grid")
    p.add_argument("--gamma-range", type=int, nargs=2, default=(-6, 3), help="log2 bounds of the gamma grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("predict", help="apply a saved SVM model to a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("plot", help="SVG persistence diagram (pd) or barcode (pb)")
    p.add_argument("input")
    p.add_argument("--kind", choices=("pd", "pb"), default="pd")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("demo", help="run the synthetic three-shape classification protocol")
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--bin-width", type=float, default=0.5)
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        args.func(args)
    except (UserError, ParseError, InfiniteBarMismatch, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
