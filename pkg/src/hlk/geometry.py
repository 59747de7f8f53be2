"""Planar polyline utilities."""

from __future__ import annotations

import numpy as np

INTERSECTION_CAP = 10_000
MIN_LEVEL = -30


def _orient(ax, ay, bx, by, cx, cy):
    return np.sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _expand_cells(lo, hi, size, ids):
    """(cell key, segment id) for every grid cell a bounding box touches."""
    i0 = np.floor(lo / size).astype(np.int64)
    i1 = np.floor(hi / size).astype(np.int64)
    nx = i1[:, 0] - i0[:, 0] + 1
    ny = i1[:, 1] - i0[:, 1] + 1
    counts = nx * ny
    rep = np.repeat(np.arange(len(ids)), counts)
    k = np.arange(len(rep)) - np.repeat(np.cumsum(counts) - counts, counts)
    cx = i0[rep, 0] + k % nx[rep]
    cy = i0[rep, 1] + k // nx[rep]
    return cx, cy, ids[rep]


def _pairs_sharing_key(keys_a, ids_a, keys_b, ids_b) -> np.ndarray:
    """All (id_a, id_b) pairs whose keys agree, as a cartesian product per key."""
    order = np.argsort(keys_a, kind="stable")
    ka, ia = keys_a[order], ids_a[order]
    lo = np.searchsorted(ka, keys_b, side="left")
    cnt = np.searchsorted(ka, keys_b, side="right") - lo
    total = int(cnt.sum())
    if total == 0:
        return np.empty((0, 2), dtype=np.int64)
    rep = np.repeat(np.arange(len(keys_b)), cnt)
    offset = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return np.column_stack([ia[lo[rep] + offset], ids_b[rep]])


def _segment_candidates(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairs (i, j), i < j, of segments a[k]-b[k] whose bounding boxes share a grid cell.

    Segments are bucketed on a hierarchy of grids: a segment of length L goes
    to the level whose cell size is the smallest power-of-two multiple of the
    base size that is at least 2 L, so every segment touches at most 2 x 2
    cells of its own level. Pairs across levels are joined on the coarser
    level's grid.
    """
    m = len(a)
    if m < 2:
        return np.empty((0, 2), dtype=np.int64)
    origin = np.minimum(a.min(axis=0), b.min(axis=0))
    lo = np.minimum(a, b) - origin
    hi = np.maximum(a, b) - origin
    seglen = np.maximum(hi[:, 0] - lo[:, 0], hi[:, 1] - lo[:, 1])
    positive = seglen[seglen > 0]
    base = float(np.median(positive)) if len(positive) else 1.0
    # finer grids for short segments too, so slow stretches of a curve do not pile into one cell
    level = np.full(m, MIN_LEVEL, dtype=np.int64)
    pos = seglen > 0
    level[pos] = np.maximum(np.ceil(np.log2(seglen[pos] / base)), MIN_LEVEL).astype(np.int64)
    ids = np.arange(m)
    levels = np.unique(level)
    chunks = []
    for la in levels:
        sel_a = ids[level == la]
        for lb in levels[levels >= la]:
            sel_b = ids[level == lb]
            size = 2.0 * base * 2.0 ** lb
            cxa, cya, ia = _expand_cells(lo[sel_a], hi[sel_a], size, sel_a)
            if lb == la:
                width = int(cxa.max()) + 2
                keys = cya * width + cxa
                pairs = _pairs_sharing_key(keys, ia, keys, ia)
                chunks.append(pairs[pairs[:, 0] < pairs[:, 1]])
            else:
                cxb, cyb, ib = _expand_cells(lo[sel_b], hi[sel_b], size, sel_b)
                width = int(max(cxa.max(), cxb.max())) + 2
                chunks.append(_pairs_sharing_key(cya * width + cxa, ia, cyb * width + cxb, ib))
    pairs = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    if len(pairs) == 0:
        return pairs
    return np.unique(np.sort(pairs, axis=1), axis=0)


def _proper(a, b, pairs) -> np.ndarray:
    """Mask of candidate pairs whose segments cross at a single interior point."""
    i, j = pairs[:, 0], pairs[:, 1]
    p1, p2, q1, q2 = a[i], b[i], a[j], b[j]
    d1 = _orient(*q1.T, *q2.T, *p1.T)
    d2 = _orient(*q1.T, *q2.T, *p2.T)
    d3 = _orient(*p1.T, *p2.T, *q1.T)
    d4 = _orient(*p1.T, *p2.T, *q2.T)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def candidate_pairs(pts: np.ndarray) -> np.ndarray:
    """Segment index pairs (i, j), i + 1 < j, of a polyline whose bounding boxes share a grid cell."""
    if len(pts) < 4:
        return np.empty((0, 2), dtype=np.int64)
    pairs = _segment_candidates(pts[:-1], pts[1:])
    return pairs[pairs[:, 1] - pairs[:, 0] >= 2]


def crossing_pairs(pts) -> np.ndarray:
    """Segment index pairs (i, j) of a polyline that cross properly.

    Touching at endpoints and collinear overlaps are not crossings.
    """
    pts = np.asarray(pts, dtype=float)
    pairs = candidate_pairs(pts)
    if len(pairs) == 0:
        return pairs
    return pairs[_proper(pts[:-1], pts[1:], pairs)]


def crossings_between(polys_a, polys_b) -> int:
    """Number of proper crossings between a segment of one family of polylines and one of another."""
    def segments(polys):
        polys = [np.asarray(q, dtype=float) for q in polys if len(q) >= 2]
        if not polys:
            return np.empty((0, 2)), np.empty((0, 2))
        return np.concatenate([q[:-1] for q in polys]), np.concatenate([q[1:] for q in polys])

    a0, a1 = segments(polys_a)
    b0, b1 = segments(polys_b)
    if len(a0) == 0 or len(b0) == 0:
        return 0
    start, end = np.vstack([a0, b0]), np.vstack([a1, b1])
    pairs = _segment_candidates(start, end)
    k = len(a0)
    pairs = pairs[(pairs[:, 0] < k) & (pairs[:, 1] >= k)]
    if len(pairs) == 0:
        return 0
    return int(np.count_nonzero(_proper(start, end, pairs)))


def count_self_intersections(pts, cap: int = INTERSECTION_CAP) -> int:
    """Number of self-crossings of a polyline, saturating at ``cap``."""
    return min(len(crossing_pairs(pts)), cap)
