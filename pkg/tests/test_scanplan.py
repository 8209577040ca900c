"""Scan-plan geometry against independent brute-force oracles.

The oracle below re-implements coverage as plain Python loops (textbook
ray-cast, squared-distance check) with the same expression shapes as the
vectorized code, so equality assertions are exact, not approximate.
"""

import json
import math
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinfm.errors import DegenerateFloor, MalformedPayload
from twinfm.scanplan import (
    FloorOutline,
    ScanPlan,
    ScanPosition,
    ScanTarget,
    coverage_fraction,
    overlap_graph,
    validate_plan,
)

FIXTURES = Path(__file__).parent / "fixtures"


# --- independent oracle -------------------------------------------------------

def oracle_in_ring(x: float, y: float, ring) -> bool:
    inside = False
    j = len(ring) - 1
    for i in range(len(ring)):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y) and x < (xj - xi) * (y - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def oracle_coverage(floor: FloorOutline, plan: ScanPlan, step: float):
    xs = [p[0] for p in floor.exterior]
    ys = [p[1] for p in floor.exterior]
    xmin, ymin, xmax, ymax = min(xs), min(ys), max(xs), max(ys)
    nx = max(1, math.ceil((xmax - xmin) / step))
    ny = max(1, math.ceil((ymax - ymin) / step))
    r2 = plan.range_radius * plan.range_radius
    total = covered = 0
    for i in range(nx):
        cx = xmin + (i + 0.5) * step
        for j in range(ny):
            cy = ymin + (j + 0.5) * step
            if not oracle_in_ring(cx, cy, floor.exterior):
                continue
            if any(oracle_in_ring(cx, cy, hole) for hole in floor.holes):
                continue
            total += 1
            for pos in plan.positions:
                dx = cx - pos.point[0]
                dy = cy - pos.point[1]
                if dx * dx + dy * dy <= r2:
                    covered += 1
                    break
    if total == 0:
        return 0.0, 0
    return covered / total, total - covered


def oracle_overlap_edges(plan: ScanPlan):
    out = set()
    for a in plan.positions:
        for b in plan.positions:
            if a.index < b.index and math.dist(a.point, b.point) < 2 * plan.range_radius:
                out.add((a.index, b.index))
    return out


# --- fixed cases from the geometry rules ------------------------------------------

SQUARE_20 = FloorOutline(exterior=[(0, 0), (20, 0), (20, 20), (0, 20)])
RECT_100x40 = FloorOutline(exterior=[(0, 0), (100, 0), (100, 40), (0, 40)])


def plan_of(points, radius=30.0, targets=()):
    return ScanPlan(
        positions=[ScanPosition(index=i, point=p) for i, p in enumerate(points, 1)],
        targets=list(targets),
        range_radius=radius,
    )


def test_square_inscribed_in_disk_is_fully_covered():
    fraction, uncovered = coverage_fraction(SQUARE_20, plan_of([(10, 10)]), 1.0)
    assert fraction == 1.0
    assert uncovered == 0


def test_no_positions_zero_coverage():
    fraction, uncovered = coverage_fraction(RECT_100x40, plan_of([]), 1.0)
    assert fraction == 0.0
    assert uncovered == 100 * 40


def test_rectangle_two_positions_matches_oracle_exactly():
    plan = plan_of([(25, 20), (75, 20)])
    got = coverage_fraction(RECT_100x40, plan, 1.0)
    want = oracle_coverage(RECT_100x40, plan, 1.0)
    assert got == want
    assert 0.0 < got[0] < 1.0


def test_overlap_50ft_apart_connected():
    edges, connected = overlap_graph(plan_of([(0, 0), (50, 0)]))
    assert edges == [(1, 2)]
    assert connected


def test_overlap_70ft_apart_disconnected():
    edges, connected = overlap_graph(plan_of([(0, 0), (70, 0)]))
    assert edges == []
    assert not connected


def test_overlap_exactly_tangent_is_no_edge():
    edges, _ = overlap_graph(plan_of([(0, 0), (60, 0)]))
    assert edges == []


def test_single_position_vacuously_connected():
    edges, connected = overlap_graph(plan_of([(5, 5)]))
    assert edges == []
    assert connected


def test_sequence_gap_invalid():
    plan = ScanPlan(positions=[ScanPosition(1, (10, 10)), ScanPosition(3, (30, 10))])
    report = validate_plan(RECT_100x40, plan, min_coverage=0.01)
    assert not report.sequence_valid
    assert not report.passed


def test_far_target_warns():
    plan = plan_of([(25, 20), (75, 20)],
                   targets=[ScanTarget(kind="checkerboard", point=(500, 500))])
    report = validate_plan(RECT_100x40, plan, min_coverage=0.01)
    assert len(report.warnings) == 1
    assert "out of range" in report.warnings[0]


def test_compliant_two_scan_plan_passes():
    plan = plan_of([(25, 20), (75, 20)], radius=40.0)
    report = validate_plan(RECT_100x40, plan, min_coverage=0.99)
    assert report.sequence_valid and report.overlap_connected
    assert report.coverage_fraction >= 0.99
    assert report.passed


# --- randomized oracle equivalence -------------------------------------------------

def random_floor(rng: random.Random) -> FloorOutline:
    if rng.random() < 0.5:
        w = rng.uniform(10, 120)
        h = rng.uniform(10, 80)
        floor = FloorOutline(exterior=[(0, 0), (w, 0), (w, h), (0, h)])
        if rng.random() < 0.4:
            hx = rng.uniform(w * 0.2, w * 0.5)
            hy = rng.uniform(h * 0.2, h * 0.5)
            floor.holes.append([(hx, hy), (hx + w * 0.2, hy),
                                (hx + w * 0.2, hy + h * 0.2), (hx, hy + h * 0.2)])
        return floor
    n = rng.randint(3, 8)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    radius = rng.uniform(10, 60)
    pts = [(radius + radius * math.cos(a), radius + radius * math.sin(a))
           for a in angles]
    if abs_area(pts) < 1.0:
        return FloorOutline(exterior=[(0, 0), (30, 0), (30, 30), (0, 30)])
    return FloorOutline(exterior=pts)


def abs_area(ring) -> float:
    total = 0.0
    for i in range(len(ring)):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % len(ring)]
        total += x1 * y2 - x2 * y1
    return abs(total / 2.0)


def test_coverage_matches_oracle_on_60_random_fixtures():
    rng = random.Random(987123)
    for case in range(60):
        floor = random_floor(rng)
        xmin, ymin, xmax, ymax = floor.bounds()
        points = [(rng.uniform(xmin - 10, xmax + 10), rng.uniform(ymin - 10, ymax + 10))
                  for _ in range(rng.randint(0, 6))]
        plan = plan_of(points, radius=rng.choice([10.0, 20.0, 30.0]))
        step = rng.choice([0.5, 1.0, 2.5])
        got = coverage_fraction(floor, plan, step)
        want = oracle_coverage(floor, plan, step)
        assert got == want, f"case {case}: {got} != {want}"


def test_overlap_matches_pairwise_oracle_on_random_plans():
    rng = random.Random(5150)
    for _ in range(200):
        points = [(rng.uniform(0, 150), rng.uniform(0, 150))
                  for _ in range(rng.randint(1, 8))]
        plan = plan_of(points, radius=rng.choice([15.0, 30.0]))
        edges, _connected = overlap_graph(plan)
        assert set(edges) == oracle_overlap_edges(plan)
        # symmetry: undirected by construction, each unordered pair once
        assert len(set(edges)) == len(edges)
        assert all(i < j for i, j in edges)


@settings(max_examples=150)
@given(
    st.lists(st.tuples(st.floats(-10, 110, allow_nan=False),
                       st.floats(-10, 50, allow_nan=False)),
             min_size=0, max_size=5),
    st.tuples(st.floats(0, 100, allow_nan=False), st.floats(0, 40, allow_nan=False)),
)
def test_adding_a_position_never_decreases_coverage(points, extra):
    base = plan_of(points)
    more = plan_of(points + [extra])
    f_base, _ = coverage_fraction(RECT_100x40, base, 2.0)
    f_more, _ = coverage_fraction(RECT_100x40, more, 2.0)
    assert f_more >= f_base


# --- grid-refinement regression fixture ----------------------------------------------

def test_grid_refinement_stability_fixture():
    spec = json.loads((FIXTURES / "scanplan_refinement.json").read_text())
    floor = FloorOutline(
        exterior=[tuple(p) for p in spec["floor"]["exterior"]],
        holes=[[tuple(p) for p in ring] for ring in spec["floor"].get("holes", [])],
    )
    plan = ScanPlan.from_payload(spec["plan"])
    fractions = {}
    for entry in spec["expected"]:
        step = entry["grid_step"]
        fraction, _ = coverage_fraction(floor, plan, step)
        assert fraction == pytest.approx(entry["coverage_fraction"], abs=1e-12), \
            f"step {step} drifted from frozen value"
        fractions[step] = fraction
    steps = sorted(fractions, reverse=True)
    for coarse, fine in zip(steps, steps[1:]):
        assert abs(fractions[fine] - fractions[coarse]) <= spec["tolerance"]


# --- payload and floor validation ---------------------------------------------------

def test_degenerate_floor_rejected():
    with pytest.raises(DegenerateFloor):
        coverage_fraction(FloorOutline(exterior=[(0, 0), (1, 1), (2, 2)]),
                          plan_of([(0, 0)]), 1.0)


def test_hole_outside_exterior_rejected():
    floor = FloorOutline(exterior=[(0, 0), (10, 0), (10, 10), (0, 10)],
                         holes=[[(20, 20), (22, 20), (22, 22), (20, 22)]])
    with pytest.raises(DegenerateFloor):
        floor.validate()


def test_from_geojson_variants():
    poly = {"type": "Polygon",
            "coordinates": [[[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]]]}
    for wrapper in (
        poly,
        {"type": "Feature", "geometry": poly},
        {"type": "FeatureCollection", "features": [{"geometry": poly}]},
    ):
        floor = FloorOutline.from_geojson(wrapper)
        assert floor.exterior == [(0, 0), (10, 0), (10, 10), (0, 10)]


def test_from_geojson_rejects_non_polygon():
    with pytest.raises(MalformedPayload):
        FloorOutline.from_geojson({"type": "Point", "coordinates": [0, 0]})


def test_plan_payload_round_trip():
    plan = plan_of([(1, 2), (3, 4)],
                   targets=[ScanTarget(kind="sphere", point=(5, 6), height=4.0)])
    back = ScanPlan.from_payload(plan.to_payload())
    assert back.to_payload() == plan.to_payload()


@pytest.mark.parametrize("payload", [
    {"range_radius": -5, "positions": []},
    {"positions": [{"index": 1}]},
    {"positions": [], "targets": [{"kind": "pyramid", "point": [0, 0]}]},
])
def test_malformed_plan_payloads(payload):
    with pytest.raises(MalformedPayload):
        ScanPlan.from_payload(payload)
