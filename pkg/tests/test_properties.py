import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pairpot import PiecewiseStrauss, Strauss, log_papangelou, log_papangelou_multi
from pairpot.estimators import EstimatorInput, estimate_J, estimate_R_hat
from pairpot.spatial import CellGrid, PointPattern, Window, erode

coords = st.floats(0.0, 10.0, allow_nan=False)


def _pattern(dim, n):
    return arrays(np.float64, (n, dim), elements=coords, unique=True)


@given(st.integers(1, 3), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_erosion_is_additive(dim, a, b):
    W = Window(dim, 10.0)
    assert erode(W, a).erode(b).volume == erode(W, a + b).volume


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 60), st.floats(0.1, 3.0), st.data())
def test_self_pairs_brute_force(dim, n, radius, data):
    pts = data.draw(_pattern(dim, n))
    pts = np.unique(pts, axis=0)
    i, j, d = CellGrid(pts, 10.0, radius).self_pairs(radius)
    got = set(zip(i.tolist(), j.tolist()))
    full = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
    want = {(a, b) for a in range(len(pts)) for b in range(len(pts)) if a != b and full[a, b] <= radius}
    assert got == want


@settings(max_examples=100, deadline=None)
@given(st.data(), st.floats(0.05, 1.0), st.floats(0.3, 2.0))
def test_strauss_intensity_counts_neighbours(data, phi, R):
    pts = data.draw(_pattern(2, 15))
    u = np.array(data.draw(st.tuples(coords, coords)))
    m = Strauss(1.0, R, phi)
    k = int(np.count_nonzero(np.linalg.norm(pts - u, axis=1) <= R))
    assert math.isclose(log_papangelou(m, u, pts), k * math.log(phi), rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_multi_point_chain_rule(data):
    pts = data.draw(_pattern(2, 10))
    y = np.unique(data.draw(_pattern(2, 3)), axis=0)
    m = PiecewiseStrauss(1.3, [0.5, 1.2], [0.4, 0.8])
    total = sum(log_papangelou(m, y[k], np.vstack([pts, y[:k]])) for k in range(len(y)))
    assert math.isclose(log_papangelou_multi(m, y, pts), total, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_estimators_are_label_free(data):
    pts = np.unique(data.draw(_pattern(2, 40)), axis=0)
    perm = data.draw(st.permutations(range(len(pts))))
    r = np.array([0.3, 0.6, 0.9])
    a = EstimatorInput(PointPattern(Window(2, 10.0), pts), 1.0, "epanechnikov", 0.2, r)
    b = EstimatorInput(PointPattern(Window(2, 10.0), pts[list(perm)]), 1.0, "epanechnikov", 0.2, r)
    assert np.array_equal(estimate_R_hat(a), estimate_R_hat(b))
    assert np.array_equal(estimate_J(a), estimate_J(b))
