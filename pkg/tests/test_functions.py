import math

import numpy as np
import pytest
from oracles import random_diagram, tent_landscape
from scipy import integrate

from phkit.functions import (
    Grid1D,
    ImageParams,
    betti_curve,
    betti_function,
    landscape,
    landscapes,
    persistence_image,
    persistence_surface,
    persistent_entropy,
    ramp_weight,
)


def test_betti_curve_closed_ends():
    assert betti_curve([[0, 1], [0.5, 2]], Grid1D(0, 2, 3)).tolist() == [1, 2, 1]


def test_betti_curve_empty():
    assert np.all(betti_curve(np.zeros((0, 2)), Grid1D(0, 1, 5)) == 0)


def test_betti_curve_hexagon():
    g = Grid1D(1.2, 2.2, 2)
    assert betti_curve([[1.0, math.sqrt(3)]], g)[0] == 1


def test_betti_curve_infinite_capped():
    assert betti_curve([[0, np.inf]], Grid1D(0, 5, 6)).tolist() == [1] * 6


def test_betti_function_values():
    g = Grid1D(0, 2, 3)
    v = betti_function([[0, 2]], g)
    assert v[1] == 1.0
    assert v[0] == pytest.approx(math.exp(-0.25), abs=1e-12)
    np.testing.assert_allclose(betti_function([[0, 2], [0, 2]], g), 2 * v)


def test_betti_function_weight_errors():
    with pytest.raises(ValueError):
        betti_function([[0, 1]], Grid1D(0, 1, 3), weights=[0.0])
    with pytest.raises(ValueError):
        betti_function([[0, 1]], Grid1D(0, 1, 3), weights=[1.0, 1.0])


def test_landscape_tent():
    g = Grid1D(0, 2, 5)
    l1 = landscape([[0, 2]], 1, g)
    assert l1[2] == 1.0 and l1[1] == 0.5
    assert np.all(landscape([[0, 2]], 2, g) == 0)


def test_landscape_duplicates_and_second_level():
    g = Grid1D(0, 3, 7)
    lam = landscapes([[0, 2], [0, 2]], 2, g)
    np.testing.assert_array_equal(lam[0], lam[1])
    assert landscape([[0, 2], [1, 3]], 2, g)[3] == pytest.approx(0.5)


def test_landscape_matches_pointwise_oracle(rng):
    bars = random_diagram(rng, 8)
    g = Grid1D(0, 16, 161)
    for m in (1, 2, 3):
        np.testing.assert_allclose(landscape(bars, m, g), tent_landscape(bars, m, g.x), atol=1e-12)


def test_landscape_level_error():
    with pytest.raises(ValueError):
        landscapes([[0, 1]], 0, Grid1D(0, 1, 2))


def test_ramp_weight():
    np.testing.assert_array_equal(ramp_weight([0, 0.5, 1, 2], 0.5, 1.5), [0, 0, 0.5, 1])


def test_image_zero_below_t1():
    p = ImageParams(sigma=0.05, t1=0.5, t2=1.0, resolution=(10, 10), domain=(0, 1, 0, 1))
    img = persistence_image([[0.2, 0.4], [0.5, 0.6]], p)
    # pixel rows entirely in the strip y <= t1 receive exactly zero
    assert np.all(img[:, :5] == 0)


def test_image_total_mass():
    sigma = 0.1
    p = ImageParams(sigma=sigma, t1=0.0, t2=0.5, resolution=(40, 40), domain=(0.6, 1.4, 1.6, 2.4))
    img = persistence_image([[1.0, 3.0]], p)
    assert img.sum() == pytest.approx(1.0, abs=0.02)


def test_image_matches_explicit_gauss_legendre():
    p = ImageParams(sigma=0.3, t1=0.2, t2=1.0, resolution=(3, 2), domain=(0, 1.5, 0, 1.2))
    bars = [[0.4, 1.1], [0.9, 1.5]]
    img = persistence_image(bars, p)
    nodes, weights = np.polynomial.legendre.leggauss(2)
    ex = np.linspace(0, 1.5, 4)
    ey = np.linspace(0, 1.2, 3)
    for i in range(3):
        for j in range(2):
            hx, hy = ex[i + 1] - ex[i], ey[j + 1] - ey[j]
            xs = ex[i] + hx * (nodes + 1) / 2
            ys = ey[j] + hy * (nodes + 1) / 2
            ref = sum(
                wa * wb * float(persistence_surface(bars, p, xa, yb))
                for xa, wa in zip(xs, weights)
                for yb, wb in zip(ys, weights)
            ) * hx * hy / 4
            assert img[i, j] == pytest.approx(ref, rel=1e-12)


def test_image_converges_to_adaptive_quadrature():
    p = ImageParams(sigma=0.3, t1=0.2, t2=1.0, resolution=(60, 48), domain=(0, 1.5, 0, 1.2))
    bars = [[0.4, 1.1], [0.9, 1.5]]
    ref, _ = integrate.dblquad(lambda y, x: float(persistence_surface(bars, p, x, y)), 0, 1.5, 0, 1.2)
    assert persistence_image(bars, p).sum() == pytest.approx(ref, rel=1e-3)


def test_image_linear_and_nonnegative(rng):
    p = ImageParams(sigma=0.2, t1=0.0, t2=1.0, resolution=(8, 8), domain=(0, 5, 0, 5))
    bars = random_diagram(rng, 5, scale=4)
    img = persistence_image(bars, p)
    assert np.all(img >= 0)
    np.testing.assert_allclose(persistence_image(np.vstack([bars, bars]), p), 2 * img)


def test_image_params_validation():
    with pytest.raises(ValueError, match="zero area"):
        ImageParams(sigma=1, t1=0, t2=1, domain=(0, 0, 0, 1))
    with pytest.raises(ValueError):
        ImageParams(sigma=0, t1=0, t2=1)


def test_entropy_examples():
    assert persistent_entropy([[0, 1], [2, 3]]) == pytest.approx(math.log(2))
    assert persistent_entropy([[0, 1]]) == 0.0
    ref = -0.25 * math.log(0.25) - 0.75 * math.log(0.75)
    assert persistent_entropy([[0, 1], [0, 3]]) == pytest.approx(ref, abs=1e-12)


def test_entropy_ignores_infinite_and_rejects_empty():
    assert persistent_entropy([[0, 1], [0, 1], [0, np.inf]]) == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        persistent_entropy(np.zeros((0, 2)))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(1, 1, 5)
    with pytest.raises(ValueError):
        Grid1D(0, 1, 1)
