import math

import numpy as np
from hypothesis import given, settings, strategies as st

from hlk.geometry import count_self_intersections, crossing_pairs, crossings_between


def brute_force(pts):
    pts = np.asarray(pts, dtype=float)

    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    out = []
    for i in range(len(pts) - 1):
        for j in range(i + 2, len(pts) - 1):
            p1, p2, q1, q2 = pts[i], pts[i + 1], pts[j], pts[j + 1]
            if orient(q1, q2, p1) * orient(q1, q2, p2) < 0 and orient(p1, p2, q1) * orient(p1, p2, q2) < 0:
                out.append((i, j))
    return out


def test_figure_eight_and_simple_curves():
    # lemniscate passes the origin at t = 0 and t = pi, between samples
    t = np.linspace(-1.0, math.pi + 1.0, 400)
    assert count_self_intersections(np.column_stack([np.sin(t), np.sin(2 * t) / 2])) == 1
    t = np.linspace(0, 2 * math.pi, 401)
    assert count_self_intersections(np.column_stack([np.cos(t), np.sin(t)])) == 0
    # trochoid loops: one crossing per loop
    s = np.linspace(-math.pi, 5 * math.pi, 6001)
    assert count_self_intersections(np.column_stack([s - 2 * np.sin(s), -2 * np.cos(s)])) == 3


def test_short_and_degenerate():
    assert count_self_intersections(np.zeros((2, 2))) == 0
    assert count_self_intersections(np.zeros((10, 2))) == 0
    assert count_self_intersections([[0, 0], [1, 0], [2, 0], [3, 0]]) == 0


def test_cap():
    # zigzag crossed by a long horizontal sweep back
    xs = np.arange(50, dtype=float)
    zig = np.column_stack([xs, np.where(xs % 2 == 0, -1.0, 1.0)])
    pts = np.vstack([zig, [[49.5, 0.0], [-0.5, 0.0]]])
    assert count_self_intersections(pts) == 49
    assert count_self_intersections(pts, cap=10) == 10


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=4, max_size=40))
def test_matches_brute_force_random(points):
    pts = np.array(points, dtype=float)
    assert sorted(map(tuple, crossing_pairs(pts).tolist())) == brute_force(pts)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 3.0))
def test_matches_brute_force_multiscale(seed, spread):
    # mixed segment lengths exercise the hierarchical buckets
    rng = np.random.default_rng(seed)
    steps = rng.normal(size=(120, 2)) * np.exp(spread * rng.normal(size=(120, 1)))
    pts = np.cumsum(steps, axis=0)
    assert sorted(map(tuple, crossing_pairs(pts).tolist())) == brute_force(pts)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_crossings_between_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    fam_a = [np.cumsum(rng.normal(size=(rng.integers(2, 30), 2)), axis=0) for _ in range(3)]
    fam_b = [np.cumsum(rng.normal(size=(rng.integers(2, 30), 2)), axis=0) for _ in range(2)]
    expected = 0
    for a in fam_a:
        for b in fam_b:
            # join with a far-away detour so the bridge segments meet nothing
            far = np.array([[1e6, 1e6], [1e6 + 1, 1e6 + 1]])
            pts = np.vstack([a, far, b])
            k_a, k_b = len(a) - 1, len(a) + 2
            expected += sum(1 for i, j in brute_force(pts) if i < k_a and j >= k_b)
    assert crossings_between(fam_a, fam_b) == expected
    assert crossings_between(fam_a, []) == 0
