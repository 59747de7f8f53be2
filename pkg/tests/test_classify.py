import json

import pytest

from hlk.classify import (
    CountClass, CountKind, EndKind, Topology, classification_table, classify_axis_surface,
    classify_offaxis_surface, crossing_class, grid_of, report_is_consistent,
)
from hlk.io import to_json
from hlk.model import ModelParams
from hlk.phaseplane import Regime


def test_crossing_class_rules():
    assert crossing_class(Regime.SPIRAL, 12, True, 12) == CountClass(CountKind.INFINITE_WITNESSED, 12, 12)
    assert crossing_class(Regime.SINK, 0, True, 12).kind is CountKind.ZERO
    assert crossing_class(Regime.SINK, 2, True, 12) == CountClass(CountKind.FINITE, 2)
    assert crossing_class(Regime.IMPROPER_NODE, 0, True, 12) == CountClass(CountKind.FINITE, 0)
    assert crossing_class(Regime.SPIRAL, 3, False, 12) == CountClass(CountKind.FINITE, 3)


def test_axis_up_spiral_is_embedded_disk():
    r = classify_axis_surface(ModelParams(2, 2.0), 1)
    assert r.surface_topology is Topology.DISK
    assert r.embedded is True
    assert r.self_intersection_class.kind is CountKind.NONE
    (end,) = r.ends
    assert end.kind is EndKind.CMC_CYLINDER and end.radius == 0.25
    assert end.crossing_class.kind is CountKind.INFINITE_WITNESSED
    assert end.crossing_class.count == 12
    assert report_is_consistent(r)


def test_axis_down_lambda_one_is_hyperplane():
    r = classify_axis_surface(ModelParams(2, 1.0), -1)
    assert r.surface_topology is Topology.HYPERPLANE
    assert r.embedded is True


def test_axis_down_lambda_less_one_is_entire_convex_graph():
    r = classify_axis_surface(ModelParams(2, 0.5), -1)
    assert r.surface_topology is Topology.ENTIRE_GRAPH
    assert r.embedded is True
    assert r.ends[0].kind is EndKind.GRAPH
    assert r.metadata["strictly_convex"] is True
    assert r.metadata["self_intersections"] == 0


def test_axis_down_lambda_greater_one_loops():
    r = classify_axis_surface(ModelParams(2, 2.0), -1)
    assert r.surface_topology is Topology.DISK
    assert r.embedded is False
    assert r.ends[0].kind is EndKind.LOOPING
    si = r.self_intersection_class
    assert si.kind is CountKind.INFINITE_WITNESSED and si.count == 24
    radii = r.metadata["turn_radii"]
    assert all(a < b for a, b in zip(radii[::2], radii[2::2]))


def test_offaxis_lambda_greater_one_is_not_embedded():
    r = classify_offaxis_surface(ModelParams(2, 2.0), 1.0)
    assert r.surface_topology is Topology.CYLINDER
    assert r.embedded is False
    assert [e.kind for e in r.ends] == [EndKind.CMC_CYLINDER, EndKind.LOOPING]


def test_offaxis_at_equilibrium_is_round_cylinder():
    p = ModelParams(3, 2.0)
    r = classify_offaxis_surface(p, p.cylinder_radius)
    assert r.surface_topology is Topology.ROUND_CYLINDER
    assert r.embedded is True
    assert report_is_consistent(r)
    with pytest.raises(ValueError):
        classify_offaxis_surface(p, 0.0)


@pytest.mark.parametrize("n,lam,x_hat,count", [(2, 0.5, 0.5, 0), (2, 0.5, 3.0, 1),
                                               (3, 0.5, 0.8, 0), (3, 0.5, 5.0, 1)])
def test_offaxis_lambda_less_one_dichotomy(n, lam, x_hat, count):
    r = classify_offaxis_surface(ModelParams(n, lam), x_hat)
    assert r.metadata["self_intersections"] == count
    assert r.embedded is (count == 0)
    assert r.metadata["seed_side_consistent"] is True
    assert {e.kind for e in r.ends} == {EndKind.CMC_CYLINDER, EndKind.GRAPH}


def test_offaxis_lambda_one():
    r = classify_offaxis_surface(ModelParams(2, 1.0), 3.0)
    assert r.metadata["backward_turn_radii"][0] == pytest.approx(2.6964114001560113, abs=1e-9)
    assert r.metadata["self_intersections"] == 1
    assert r.embedded is False


def test_grid_table_is_consistent_and_ordered():
    grid = grid_of([2, 3, 4, 5], [0.5, 1.0, 2.0])
    table = classification_table(grid, jobs=2)
    assert [r.params for r in table] == grid
    assert all(report_is_consistent(r) for r in table)
    assert all(not r.truncated and r.error is None for r in table)
    by = {(r.params.n, r.params.lam): r for r in table}
    assert by[(2, 0.5)].regime is Regime.IMPROPER_NODE
    assert by[(5, 1.0)].ends[0].crossing_class == CountClass(CountKind.FINITE, 0)
    assert by[(4, 0.5)].ends[0].crossing_class.kind is CountKind.ZERO
    assert by[(3, 2.0)].ends[0].crossing_class.kind is CountKind.INFINITE_WITNESSED
    serial = classification_table(grid[:3], jobs=1)
    assert [to_json(r.to_dict()) for r in serial] == [to_json(r.to_dict()) for r in table[:3]]
    with pytest.raises(ValueError):
        classification_table([])


def test_report_serialises():
    r = classify_axis_surface(ModelParams(10, 0.5), 1)
    d = json.loads(to_json(r.to_dict()))
    assert d["surface_topology"] == "Disk"
    assert d["ends"][0]["crossing_class"] == {"kind": "Zero", "count": 0}
    assert d["metadata"]["embeddedness_caveat"]
    assert d["regime"] == "Sink"
