"""Classification of rotational surfaces from their integrated profiles.

Surfaces meeting the axis are classified from the AxisUp/AxisDown orbit;
surfaces that do not are seeded at a horizontal-normal point (x_hat, 0) on
the eps = 1 sheet and integrated in both directions. Statements about
infinitely many crossings or self-intersections cannot be observed on a
truncated orbit; they are reported as ``InfiniteWitnessed`` together with the
witnessed count and the cap that truncated the run.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .geometry import INTERSECTION_CAP
from .model import ModelParams
from .orbits import (
    EventKind, OrbitOptions, OrbitSeed, OrbitTrace, ProfileCurve, SeedKind,
    curvature_residual, integrate_orbit, reconstruct_profile,
)
from .phaseplane import Regime, regime_of

EMBEDDING_CAVEAT = (
    "embeddedness is read off the truncated profile: no self-intersections on the "
    "integrated part and embedded ends"
)


class Topology(str, enum.Enum):
    DISK = "Disk"
    CYLINDER = "Cylinder_Sn1xR"
    HYPERPLANE = "Hyperplane"
    ROUND_CYLINDER = "RoundCylinder"
    ENTIRE_GRAPH = "EntireGraph"


class CountKind(str, enum.Enum):
    NONE = "None"
    ZERO = "Zero"
    FINITE = "Finite"
    INFINITE_WITNESSED = "InfiniteWitnessed"


@dataclass(frozen=True)
class CountClass:
    """A count that is either observed exactly or witnessed up to a cap."""

    kind: CountKind
    count: int = 0
    cap: int | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "count": self.count}
        if self.cap is not None:
            d["cap"] = self.cap
        return d


class EndKind(str, enum.Enum):
    CMC_CYLINDER = "ConvergesToCMCCylinder"
    GRAPH = "GraphOutsideCompact"
    LOOPING = "UnboundedLooping"


@dataclass(frozen=True)
class End:
    kind: EndKind
    radius: float | None = None
    crossing_class: CountClass | None = None

    @property
    def embedded(self) -> bool:
        return self.kind is not EndKind.LOOPING

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is EndKind.CMC_CYLINDER:
            d["radius"] = self.radius
            d["crossing_class"] = self.crossing_class.to_dict()
        return d


@dataclass(frozen=True)
class ClassificationReport:
    params: ModelParams
    seed_kind: str
    surface_topology: Topology | None
    embedded: bool | None
    self_intersection_class: CountClass | None
    ends: tuple[End, ...]
    regime: Regime
    truncated: bool = False
    error: str | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "seed_kind": self.seed_kind,
            "surface_topology": self.surface_topology.value if self.surface_topology else None,
            "embedded": self.embedded,
            "self_intersection_class": (self.self_intersection_class.to_dict()
                                        if self.self_intersection_class else None),
            "ends": [e.to_dict() for e in self.ends],
            "regime": self.regime.value,
            "truncated": self.truncated,
            "error": self.error,
            "metadata": self.metadata,
        }


def crossing_class(regime: Regime, crossings: int, converged: bool, cap: int) -> CountClass:
    """Crossings of the line x = e0 by an orbit converging to e0.

    Once the orbit is inside the ball where the linearisation governs it,
    complex eigenvalues force infinitely many further crossings; real ones
    allow none after a finite number.
    """
    if regime is Regime.SPIRAL and converged:
        return CountClass(CountKind.INFINITE_WITNESSED, crossings, cap)
    if crossings == 0 and regime is Regime.SINK:
        return CountClass(CountKind.ZERO)
    return CountClass(CountKind.FINITE, crossings)


def _end_of(trace: OrbitTrace) -> tuple[End | None, bool]:
    """End classification of one integrated direction; second value flags truncation."""
    p = trace.params
    term = trace.termination
    kind = term.kind
    if kind is EventKind.CONVERGED_E0:
        cls = crossing_class(regime_of(p), trace.cylinder_crossings, True, trace.options.winding_cap)
        return End(EndKind.CMC_CYLINDER, p.cylinder_radius, cls), False
    if kind is EventKind.CONVERGED_ASYMPTOTE:
        return End(EndKind.GRAPH), False
    turns = trace.turns
    looping = len(turns) >= 2 and turns[-1].x > turns[0].x
    if kind is EventKind.BUDGET and looping:
        return End(EndKind.LOOPING), False
    if kind is EventKind.ESCAPED:
        if p.lam > 1.0 or looping:
            return End(EndKind.LOOPING), False
        return End(EndKind.GRAPH), False
    return None, True


def _self_intersection_class(count: int, ends) -> CountClass:
    if any(e is not None and e.kind is EndKind.LOOPING for e in ends):
        return CountClass(CountKind.INFINITE_WITNESSED, count, INTERSECTION_CAP)
    if count == 0:
        return CountClass(CountKind.NONE)
    return CountClass(CountKind.FINITE, count)


def _base_meta(opts: OrbitOptions) -> dict:
    return {
        "winding_cap": opts.winding_cap,
        "turn_cap": opts.resolved_turn_cap(),
        "intersection_cap": INTERSECTION_CAP,
        "e0_radius": opts.e0_radius,
        "embeddedness_caveat": EMBEDDING_CAVEAT,
    }


def _trace_meta(trace: OrbitTrace, profile: ProfileCurve) -> dict:
    return {
        "termination": trace.termination.to_dict(),
        "winding": trace.winding,
        "cylinder_crossings": trace.cylinder_crossings,
        "turn_radii": [e.x for e in trace.turns],
        "self_intersections": profile.self_intersections,
        "is_graph_over_axis": profile.is_graph_over_axis,
        "is_horizontal_graph": profile.is_horizontal_graph,
        "strictly_convex": profile.convexity_sign() != 0,
        "curvature_residual": curvature_residual(profile).max_residual,
        "samples": len(profile.s),
    }


def classify_axis_surface(p: ModelParams, delta: int, opts: OrbitOptions | None = None) -> ClassificationReport:
    """Classify the rotational surface meeting the axis at a point with normal (0, delta)."""
    if delta not in (1, -1):
        raise ValueError("delta must be +1 or -1")
    opts = opts or OrbitOptions()
    seed = OrbitSeed.axis_up(p) if delta == 1 else OrbitSeed.axis_down(p)
    regime = regime_of(p)
    meta = _base_meta(opts)
    if delta == -1 and p.lam == 1.0:
        meta["exact"] = "Hyperplane"
        return ClassificationReport(p, seed.kind.value, Topology.HYPERPLANE, True,
                                    CountClass(CountKind.NONE), (End(EndKind.GRAPH),), regime,
                                    metadata=meta)
    try:
        trace = integrate_orbit(seed, opts=opts)
        profile = reconstruct_profile(trace)
    except Exception as exc:  # integration errors annotate the report
        return ClassificationReport(p, seed.kind.value, Topology.DISK, None, None, (), regime,
                                    truncated=True, error=f"{type(exc).__name__}: {exc}",
                                    metadata=meta)
    end, truncated = _end_of(trace)
    ends = (end,) if end else ()
    meta.update(_trace_meta(trace, profile))
    si = _self_intersection_class(profile.self_intersections, ends)
    embedded = None if truncated else (si.kind is CountKind.NONE and all(e.embedded for e in ends))
    topology = Topology.DISK
    if end is not None and end.kind is EndKind.GRAPH and profile.is_horizontal_graph:
        topology = Topology.ENTIRE_GRAPH
    return ClassificationReport(p, seed.kind.value, topology, embedded, si, ends, regime,
                                truncated=truncated, metadata=meta)


def classify_offaxis_surface(p: ModelParams, x_hat: float,
                             opts: OrbitOptions | None = None) -> ClassificationReport:
    """Classify the rotational surface through the horizontal-normal point (x_hat, 0) on eps = 1."""
    if not x_hat > 0:
        raise ValueError("x_hat must be positive")
    opts = opts or OrbitOptions()
    regime = regime_of(p)
    meta = _base_meta(opts)
    e0 = p.cylinder_radius
    meta["x_hat"] = x_hat
    if abs(x_hat - e0) <= 1e-12 * e0:
        meta["exact"] = "RoundCylinder"
        cyl = End(EndKind.CMC_CYLINDER, e0, CountClass(CountKind.ZERO))
        return ClassificationReport(p, SeedKind.INTERIOR.value, Topology.ROUND_CYLINDER, True,
                                    CountClass(CountKind.NONE), (cyl, cyl), regime, metadata=meta)
    seed = OrbitSeed.interior(p, x_hat, 0.0, 1)
    try:
        fwd = integrate_orbit(seed, opts=replace(opts, direction=1))
        bwd = integrate_orbit(seed, opts=replace(opts, direction=-1))
        joined = OrbitTrace.join(bwd, fwd)
        profile = reconstruct_profile(joined)
    except Exception as exc:
        return ClassificationReport(p, SeedKind.INTERIOR.value, Topology.CYLINDER, None, None, (),
                                    regime, truncated=True, error=f"{type(exc).__name__}: {exc}",
                                    metadata=meta)
    ends, truncated = [], False
    for tr in (bwd, fwd):
        end, trunc = _end_of(tr)
        truncated |= trunc
        if end is not None:
            ends.append(end)
    # the cylinder end first
    ends.sort(key=lambda e: e.kind is not EndKind.CMC_CYLINDER)
    meta.update(_trace_meta(joined, profile))
    meta["forward_termination"] = fwd.termination.to_dict()
    meta["backward_termination"] = bwd.termination.to_dict()
    meta["backward_turn_radii"] = [e.x for e in bwd.turns]
    if p.lam < 1.0:
        # embedded exactly when the seed lies inside the cylinder radius
        meta["seed_side"] = "below" if x_hat < e0 else "above"
        meta["seed_side_predicts_embedded"] = x_hat < e0
    si = _self_intersection_class(profile.self_intersections, ends)
    embedded = None if truncated else (si.kind is CountKind.NONE and all(e.embedded for e in ends))
    if p.lam < 1.0 and embedded is not None:
        meta["seed_side_consistent"] = embedded == meta["seed_side_predicts_embedded"]
    return ClassificationReport(p, SeedKind.INTERIOR.value, Topology.CYLINDER, embedded, si,
                                tuple(ends), regime, truncated=truncated, metadata=meta)


def _classify_cell(args) -> ClassificationReport:
    p, delta, opts = args
    try:
        return classify_axis_surface(p, delta, opts)
    except Exception as exc:
        return ClassificationReport(p, "AxisUp" if delta == 1 else "AxisDown", None, None, None,
                                    (), regime_of(p), truncated=True,
                                    error=f"{type(exc).__name__}: {exc}")


def default_jobs() -> int:
    env = os.environ.get("HLK_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def classification_table(p_grid, delta: int = 1, opts: OrbitOptions | None = None,
                         jobs: int | None = None) -> list[ClassificationReport]:
    """Classify the axis surface for every cell of a parameter grid, in grid order.

    Cells are independent; an error in one cell is recorded in its report and
    does not abort the batch.
    """
    grid = list(p_grid)
    if not grid:
        raise ValueError("the parameter grid is empty")
    opts = opts or OrbitOptions()
    jobs = jobs or 1
    work = [(p, delta, opts) for p in grid]
    if jobs == 1 or len(grid) == 1:
        return [_classify_cell(w) for w in work]
    with ProcessPoolExecutor(max_workers=min(jobs, len(grid))) as pool:
        return list(pool.map(_classify_cell, work))


def grid_of(ns, lams) -> list[ModelParams]:
    """Row-major parameter grid, n outermost."""
    return [ModelParams(n, lam) for n in ns for lam in lams]


def report_is_consistent(r: ClassificationReport) -> bool:
    """Radius and regime/crossing-class invariants of a report."""
    expected = {Regime.SPIRAL: CountKind.INFINITE_WITNESSED, Regime.SINK: CountKind.ZERO,
                Regime.IMPROPER_NODE: CountKind.FINITE}
    for e in r.ends:
        if e.kind is not EndKind.CMC_CYLINDER:
            continue
        if not math.isclose(e.radius, r.params.cylinder_radius, rel_tol=0, abs_tol=0):
            return False
        if r.metadata.get("exact") != "RoundCylinder" and e.crossing_class.kind is not expected[r.regime]:
            return False
    return True


__all__ = [
    "ClassificationReport", "Topology", "CountKind", "CountClass", "EndKind", "End",
    "classify_axis_surface", "classify_offaxis_surface", "classification_table",
    "crossing_class", "grid_of", "default_jobs", "report_is_consistent",
]
