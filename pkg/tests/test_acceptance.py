"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected in ``RESULTS`` and echoed in the pytest
terminal summary, so ``pytest -v`` output records the outcome of every
criterion even when stdout capture is on.
"""

import math
import time

import numpy as np
import pytest
from oracles import betti_at, betti_from_bars, brute_rips, random_diagram
from scipy.stats import multivariate_normal

from phkit.alpha import alpha_filtration
from phkit.complexes import cubical_filtration, rips_filtration
from phkit.geometry import ShapeSpec, distance_matrix, generate_shape
from phkit.kernels import KernelConfig, gram_matrix, pssk
from phkit.metrics import SwParams, bottleneck, sliced_wasserstein, wasserstein
from phkit.persistence import diagrams
from phkit.pipeline import compute_diagrams, run_protocol, shape_corpus
from phkit.vectorize.binning import BinningSpec
from phkit.vectorize.codebook import GmmModel, pfv_points
from phkit.vectorize.signature import SignatureUnit, signature_layer, structure_element

RESULTS = []
WIDTHS = (0.5, 0.25, 0.1)


def _record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _rips(pts, max_dim=2):
    return rips_filtration(distance_matrix(pts), max_dim=max_dim)


# -- 1. oracle equivalence -----------------------------------------------------


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    mismatches = checks = 0
    for _ in range(200):
        pts = rng.uniform(size=(int(rng.integers(5, 9)), 2))
        dm = distance_matrix(pts)
        d = diagrams(rips_filtration(dm, max_dim=2), max_dim=2)
        cells = brute_rips(pts, 2, dist=dm)
        for t in sorted(set(cells.values())):
            for k in range(3):
                checks += 1
                mismatches += betti_from_bars(d[k], t) != betti_at(cells, k, t)
    sec = time.perf_counter() - t0
    _record(1, mismatches == 0 and sec < 30, f"{mismatches} mismatches in {checks} checks, {sec:.1f}s")


# -- 2. Euler identity ---------------------------------------------------------


def _euler_violations(f):
    d = diagrams(f)
    bad = 0
    for t in np.unique(f.values):
        chi = sum((-1) ** k * int(c) for k, c in enumerate(f.count_by_dim(t)))
        bad += chi != sum((-1) ** k * betti_from_bars(d[k], t) for k in range(len(d)))
    return bad


def test_criterion_2_euler_identity():
    rng = np.random.default_rng(2)
    bad = 0
    for _ in range(50):
        pts = rng.uniform(size=(int(rng.integers(5, 10)), int(rng.integers(2, 4))))
        bad += _euler_violations(_rips(pts, max_dim=3))
    for _ in range(20):
        shape = tuple(int(s) for s in rng.integers(2, 7, size=int(rng.integers(2, 4))))
        bad += _euler_violations(cubical_filtration(rng.uniform(size=shape)))
    _record(2, bad == 0, f"{bad} violating steps over 50 Rips + 20 cubical")


# -- 3. geometry fixtures ------------------------------------------------------


def test_criterion_3_geometry_fixtures():
    circle = generate_shape(ShapeSpec("circle", n=100, noise=0.0, seed=0)).points
    pers = np.sort(np.diff(diagrams(_rips(circle), max_dim=1)[1], axis=1).ravel())[::-1]
    dominant = len(pers) >= 1 and pers[0] > 1.0 and (len(pers) == 1 or pers[1] < 0.1 * pers[0])

    t = np.arange(6) * np.pi / 3
    hexagon = np.column_stack([np.cos(t), np.sin(t)])
    near = hexagon + 1e-9 * np.random.default_rng(0).standard_normal(hexagon.shape)
    h1 = diagrams(alpha_filtration(near))[1]
    main = h1[np.argmax(h1[:, 1] - h1[:, 0])]
    alpha_err = max(abs(main[0] - 0.5), abs(main[1] - 1.0))

    hx = diagrams(_rips(hexagon))[1]
    hex_err = max(abs(hx[0, 0] - 1.0), abs(hx[0, 1] - math.sqrt(3))) if hx.shape == (1, 2) else math.inf

    ok = dominant and alpha_err <= 1e-6 and hex_err <= 1e-12
    detail = (
        f"circle top persistences {pers[:2].round(4).tolist()}, "
        f"alpha err {alpha_err:.1e}, hexagon err {hex_err:.1e}"
    )
    _record(3, ok, detail)


# -- 4. metric axioms ----------------------------------------------------------


def test_criterion_4_metric_axioms():
    rng = np.random.default_rng(4)
    fns = {
        "bottleneck": (bottleneck, 1e-9),
        "w1": (lambda a, b: wasserstein(a, b, 1), 1e-9),
        "w2": (lambda a, b: wasserstein(a, b, 2), 1e-9),
        "sw": (lambda a, b: sliced_wasserstein(a, b, SwParams(500)), 1e-6),
    }
    t0 = time.perf_counter()
    failures = []
    for i in range(100):
        x, y, z = (random_diagram(rng, int(rng.integers(1, 8))) for _ in range(3))
        for name, (fn, tol) in fns.items():
            if abs(fn(x, x)) > 1e-12:
                failures.append((i, name, "identity"))
            if abs(fn(x, y) - fn(y, x)) > tol:
                failures.append((i, name, "symmetry"))
            if fn(x, z) > fn(x, y) + fn(y, z) + tol:
                failures.append((i, name, "triangle"))
        for a, b in ((x, y), (y, z), (x, z)):
            db = bottleneck(a, b)
            if db > wasserstein(a, b, 1) + 1e-9 or db > wasserstein(a, b, 2) + 1e-9:
                failures.append((i, "dB<=dW", ""))
    sec = time.perf_counter() - t0
    _record(4, not failures and sec < 120, f"{len(failures)} failures on 100 triples, {sec:.1f}s")


# -- 5. stability --------------------------------------------------------------


def test_criterion_5_stability():
    rng = np.random.default_rng(5)
    worst = 0.0
    for delta in (1e-3, 1e-2):
        for dim in (2, 3):
            for _ in range(5):
                pts = rng.uniform(size=(12, dim))
                moved = pts + rng.uniform(-delta, delta, size=pts.shape)
                d1, d2 = diagrams(_rips(pts, 2), max_dim=1), diagrams(_rips(moved, 2), max_dim=1)
                bound = 2 * delta * math.sqrt(dim)
                for k in (0, 1):
                    worst = max(worst, bottleneck(d1[k], d2[k]) / bound)
    _record(5, worst <= 1.1, f"worst d_B / (2 delta sqrt(dim)) = {worst:.3f}, allowed 1.1")


# -- 6. kernel PSD -------------------------------------------------------------


def test_criterion_6_kernel_psd():
    rng = np.random.default_rng(6)
    corpus = [random_diagram(rng, int(rng.integers(1, 7))) for _ in range(20)]
    ratios = {}
    for kind in ("pssk", "upssk", "pwgk", "pfk", "gphk"):
        gm = gram_matrix(corpus, KernelConfig(kind))
        ratios[kind] = gm.min_eigenvalue / np.trace(gm.values)
    spot_err = abs(pssk([[0.0, 2.0]], [[0.0, 2.0]], 1.0) - (1 - math.exp(-1)) / (8 * math.pi))
    ok = all(r >= -1e-8 for r in ratios.values()) and spot_err <= 1e-9
    detail = ", ".join(f"{k} {v:.1e}" for k, v in ratios.items())
    _record(6, ok, f"min eig / trace: {detail}; PSSK spot err {spot_err:.1e}")


# -- 7. gradient checks --------------------------------------------------------


def _scipy_ll(pts, weights, means, variances):
    dens = sum(w * multivariate_normal(mu, np.diag(v)).pdf(pts) for w, mu, v in zip(weights, means, variances))
    return float(np.sum(np.log(np.atleast_1d(dens))))


def _pfv_rel_error(rng):
    m = 3
    w = rng.dirichlet(np.ones(m))
    mu = rng.normal(size=(m, 2)) * 2
    var = rng.uniform(0.5, 2.0, size=(m, 2))
    pts = rng.normal(size=(15, 2)) * 2
    grad = pfv_points(pts, GmmModel(w, mu, var))
    h = 1e-5
    num = []
    for block in ("mu", "var"):
        for i in range(m):
            for j in range(2):
                up_mu, dn_mu, up_var, dn_var = mu.copy(), mu.copy(), var.copy(), var.copy()
                if block == "mu":
                    up_mu[i, j] += h
                    dn_mu[i, j] -= h
                else:
                    up_var[i, j] += h
                    dn_var[i, j] -= h
                num.append((_scipy_ll(pts, w, up_mu, up_var) - _scipy_ll(pts, w, dn_mu, dn_var)) / (2 * h))
    num = np.array(num)
    return np.linalg.norm(grad - num) / np.linalg.norm(num)


def _signature_rel_jump(rng):
    nu = rng.uniform(0.05, 3)
    u = SignatureUnit((rng.normal(), abs(rng.normal())), rng.uniform(0.2, 1.5, 2), nu)
    a = rng.uniform(0, nu)
    eps = 1e-9
    lo, hi = structure_element(a, nu - eps, u), structure_element(a, nu + eps, u)
    at = structure_element(a, nu, u)
    elem = abs(lo - hi) / max(abs(at), 1e-300)
    bars = np.array([[a, nu - eps], [0.3 * a, 2 * nu]])
    moved = np.array([[a, nu + eps], [0.3 * a, 2 * nu]])
    la, lb = signature_layer(bars, [u]), signature_layer(moved, [u])
    layer = float(abs(la - lb)[0] / max(abs(la[0]), 1e-300))
    return max(elem, layer)


def test_criterion_7_gradient_checks():
    rng = np.random.default_rng(7)
    pfv_err = max(_pfv_rel_error(rng) for _ in range(10))
    sig_err = max(_signature_rel_jump(rng) for _ in range(200))
    ok = pfv_err < 1e-5 and sig_err < 1e-5
    _record(7, ok, f"PFV max rel err {pfv_err:.1e}, signature max rel jump at nu {sig_err:.1e}")


# -- 8 and 9. pipeline protocol ------------------------------------------------


@pytest.fixture(scope="module")
def task():
    t0 = time.perf_counter()
    clouds, labels = shape_corpus(n_per_class=50, n_points=30, noise=0.2, seed=0)
    diags = compute_diagrams(clouds, homology_max_dim=2)
    return diags, labels, time.perf_counter() - t0


@pytest.fixture(scope="module")
def protocol_runs(task):
    diags, labels, _ = task
    return {w: run_protocol(diags, labels, bin_width=w, seed=0) for w in WIDTHS}


def test_criterion_8_pipeline(task, protocol_runs):
    _, _, diag_sec = task
    res = protocol_runs[0.5]
    r = res.report
    total = diag_sec + res.seconds
    print(r.table())
    ok = r.overall >= 0.90 and r.type2 == 0 and total < 300
    detail = (
        f"overall {100 * r.overall:.1f}%, Type-I {r.type1}/{r.n}, Type-II {r.type2}/{r.n}, "
        f"C={res.C:g} gamma={res.gamma:g}, {res.n_features} features, {total:.0f}s"
    )
    _record(8, ok, detail)


def test_criterion_9_bin_width_sweep(task, protocol_runs):
    diags, _, _ = task
    widths = {w: protocol_runs[w].n_features for w in WIDTHS}
    n_bins = {w: BinningSpec(L=20.0, bin_width=w).n_bins for w in WIDTHS}
    exact = all(widths[w] == 9 * n_bins[w] for w in WIDTHS) and all(
        widths[w] * n_bins[WIDTHS[0]] == widths[WIDTHS[0]] * n_bins[w] for w in WIDTHS
    )
    acc = {w: 100 * protocol_runs[w].report.overall for w in WIDTHS}
    spread = max(acc.values()) - min(acc.values())
    ok = exact and spread <= 5.0
    detail = (
        "features "
        + "/".join(str(widths[w]) for w in WIDTHS)
        + ", accuracy "
        + "/".join(f"{acc[w]:.1f}" for w in WIDTHS)
        + f"%, spread {spread:.1f} points"
    )
    _record(9, ok, detail)
