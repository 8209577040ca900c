"""Scan-plan validation: range-disk coverage, overlap, and sequencing.

A plan passes when every sampled floor cell lies within the range radius of
at least one scanner position, the positions' range disks form one connected
overlap component (so scans can be registered to each other), and positions
are numbered 1..N in execution order.

Coverage uses cell-center sampling on an axis-aligned grid.  The vectorized
evaluation and the reference loop in the tests share the exact same
arithmetic (same ray-cast expression, squared-distance compare), so their
results are equal bit for bit, not just approximately.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateFloor, FileUnreadable, MalformedPayload

DEFAULT_RANGE_RADIUS_FT = 30.0
TARGET_KINDS = ("checkerboard", "sphere")


# ----------------------------------------------------------------- geometry

def ring_area(ring: list[tuple[float, float]]) -> float:
    """Signed shoelace area (vertices need not repeat the first point)."""
    total = 0.0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def point_in_ring(x: float, y: float, ring: list[tuple[float, float]]) -> bool:
    """Ray-cast point-in-polygon; boundary behavior follows the crossing rule."""
    inside = False
    j = len(ring) - 1
    for i in range(len(ring)):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y) and x < (xj - xi) * (y - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def _points_in_ring(px: np.ndarray, py: np.ndarray, ring) -> np.ndarray:
    """Vectorized twin of point_in_ring (identical per-edge arithmetic)."""
    inside = np.zeros(px.shape, dtype=bool)
    j = len(ring) - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(len(ring)):
            xi, yi = ring[i]
            xj, yj = ring[j]
            crosses = (yi > py) != (yj > py)
            xcross = (xj - xi) * (py - yi) / (yj - yi) + xi
            inside ^= crosses & (px < xcross)
            j = i
    return inside


@dataclass
class FloorOutline:
    """Planar floor boundary in feet: one exterior ring, optional holes."""

    exterior: list[tuple[float, float]]
    holes: list[list[tuple[float, float]]] = field(default_factory=list)

    def validate(self) -> None:
        if len(self.exterior) < 3 or abs(ring_area(self.exterior)) == 0.0:
            raise DegenerateFloor("exterior ring has zero area")
        for k, hole in enumerate(self.holes):
            if len(hole) < 3 or abs(ring_area(hole)) == 0.0:
                raise DegenerateFloor(f"hole {k} has zero area")
            for x, y in hole:
                if not point_in_ring(x, y, self.exterior):
                    raise DegenerateFloor(f"hole {k} is not inside the exterior")

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.exterior]
        ys = [p[1] for p in self.exterior]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, x: float, y: float) -> bool:
        if not point_in_ring(x, y, self.exterior):
            return False
        return not any(point_in_ring(x, y, hole) for hole in self.holes)

    @classmethod
    def from_geojson(cls, obj: dict) -> "FloorOutline":
        geom = obj
        if obj.get("type") == "FeatureCollection":
            feats = obj.get("features") or []
            if not feats:
                raise MalformedPayload("FeatureCollection with no features")
            geom = feats[0].get("geometry", {})
        elif obj.get("type") == "Feature":
            geom = obj.get("geometry", {})
        if geom.get("type") != "Polygon":
            raise MalformedPayload(f"expected Polygon geometry, got {geom.get('type')!r}")
        rings = geom.get("coordinates") or []
        if not rings:
            raise MalformedPayload("Polygon with no rings")

        def as_ring(coords):
            pts = [(float(x), float(y)) for x, y in coords]
            if len(pts) > 1 and pts[0] == pts[-1]:
                pts = pts[:-1]
            return pts

        return cls(exterior=as_ring(rings[0]), holes=[as_ring(r) for r in rings[1:]])


@dataclass
class ScanPosition:
    index: int
    point: tuple[float, float]
    label: str = ""


@dataclass
class ScanTarget:
    kind: str
    point: tuple[float, float]
    height: float = 0.0


@dataclass
class ScanPlan:
    positions: list[ScanPosition]
    targets: list[ScanTarget] = field(default_factory=list)
    range_radius: float = DEFAULT_RANGE_RADIUS_FT

    @classmethod
    def from_payload(cls, d: dict) -> "ScanPlan":
        try:
            positions = [ScanPosition(index=int(p["index"]),
                                      point=(float(p["point"][0]), float(p["point"][1])),
                                      label=str(p.get("label", "")))
                         for p in d.get("positions", [])]
            targets = [ScanTarget(kind=str(t["kind"]),
                                  point=(float(t["point"][0]), float(t["point"][1])),
                                  height=float(t.get("height", 0.0)))
                       for t in d.get("targets", [])]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise MalformedPayload(f"bad scan plan: {exc}") from exc
        radius = float(d.get("range_radius", DEFAULT_RANGE_RADIUS_FT))
        if radius <= 0:
            raise MalformedPayload("range_radius must be positive")
        for t in targets:
            if t.kind not in TARGET_KINDS:
                raise MalformedPayload(f"unknown target kind {t.kind!r}")
        return cls(positions=positions, targets=targets, range_radius=radius)

    def to_payload(self) -> dict:
        return {
            "range_radius": self.range_radius,
            "positions": [{"index": p.index, "point": list(p.point), "label": p.label}
                          for p in self.positions],
            "targets": [{"kind": t.kind, "point": list(t.point), "height": t.height}
                        for t in self.targets],
        }


@dataclass
class PlanReport:
    coverage_fraction: float
    uncovered_cell_count: int
    overlap_edges: list[tuple[int, int]]
    overlap_connected: bool
    sequence_valid: bool
    warnings: list[str] = field(default_factory=list)
    min_coverage: float = 0.0
    passed: bool = False

    def to_payload(self) -> dict:
        return {
            "coverage_fraction": self.coverage_fraction,
            "uncovered_cell_count": self.uncovered_cell_count,
            "overlap_edges": [list(e) for e in self.overlap_edges],
            "overlap_connected": self.overlap_connected,
            "sequence_valid": self.sequence_valid,
            "warnings": self.warnings,
            "min_coverage": self.min_coverage,
            "passed": self.passed,
        }


# ---------------------------------------------------------------- coverage

def grid_centers(floor: FloorOutline, grid_step: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell-center coordinates of the bounding-box grid (flattened)."""
    xmin, ymin, xmax, ymax = floor.bounds()
    nx = max(1, math.ceil((xmax - xmin) / grid_step))
    ny = max(1, math.ceil((ymax - ymin) / grid_step))
    cx = xmin + (np.arange(nx) + 0.5) * grid_step
    cy = ymin + (np.arange(ny) + 0.5) * grid_step
    gx, gy = np.meshgrid(cx, cy)
    return gx.ravel(), gy.ravel()


def coverage_fraction(floor: FloorOutline, plan: ScanPlan,
                      grid_step: float = 1.0) -> tuple[float, int]:
    """Fraction of in-floor grid cells within range of some position."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    floor.validate()
    px, py = grid_centers(floor, grid_step)
    in_floor = _points_in_ring(px, py, floor.exterior)
    for hole in floor.holes:
        in_floor &= ~_points_in_ring(px, py, hole)
    total = int(in_floor.sum())
    if total == 0:
        return 0.0, 0
    fx, fy = px[in_floor], py[in_floor]
    covered = np.zeros(total, dtype=bool)
    r2 = plan.range_radius * plan.range_radius
    for pos in plan.positions:
        qx, qy = pos.point
        dx = fx - qx
        dy = fy - qy
        covered |= dx * dx + dy * dy <= r2
    n_cov = int(covered.sum())
    return n_cov / total, total - n_cov


def overlap_graph(plan: ScanPlan) -> tuple[list[tuple[int, int]], bool]:
    """Edges between positions whose open range disks intersect, plus
    whether the whole plan forms one connected component."""
    idx = [p.index for p in plan.positions]
    edges: list[tuple[int, int]] = []
    limit = 2.0 * plan.range_radius
    for a in range(len(plan.positions)):
        for b in range(a + 1, len(plan.positions)):
            pa, pb = plan.positions[a], plan.positions[b]
            if math.dist(pa.point, pb.point) < limit:
                edges.append((pa.index, pb.index))
    adj: dict[int, set[int]] = {i: set() for i in idx}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    connected = True
    if idx:
        seen = {idx[0]}
        frontier = [idx[0]]
        while frontier:
            cur = frontier.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        connected = len(seen) == len(idx)
    return edges, connected


def validate_plan(floor: FloorOutline, plan: ScanPlan, min_coverage: float = 0.99,
                  grid_step: float = 1.0) -> PlanReport:
    """Run all three checks and collect warnings (e.g. unreachable targets)."""
    if not 0.0 < min_coverage <= 1.0:
        raise ValueError("min_coverage must be in (0, 1]")
    fraction, uncovered = coverage_fraction(floor, plan, grid_step)
    edges, connected = overlap_graph(plan)
    indices = [p.index for p in plan.positions]
    sequence_valid = bool(indices) and indices == list(range(1, len(indices) + 1))

    warnings = []
    r2 = plan.range_radius * plan.range_radius
    for k, target in enumerate(plan.targets):
        tx, ty = target.point
        reachable = any((tx - p.point[0]) ** 2 + (ty - p.point[1]) ** 2 <= r2
                        for p in plan.positions)
        if not reachable:
            warnings.append(
                f"target {k} ({target.kind}) at ({tx:g}, {ty:g}) is out of range "
                "of every scan position")

    return PlanReport(
        coverage_fraction=fraction,
        uncovered_cell_count=uncovered,
        overlap_edges=edges,
        overlap_connected=connected,
        sequence_valid=sequence_valid,
        warnings=warnings,
        min_coverage=min_coverage,
        passed=fraction >= min_coverage and connected and sequence_valid,
    )


# --------------------------------------------------------------------- io

def load_floor(path: str | Path) -> FloorOutline:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedPayload(f"{path}: {exc}") from exc
    return FloorOutline.from_geojson(obj)


def load_plan(path: str | Path) -> ScanPlan:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedPayload(f"{path}: {exc}") from exc
    return ScanPlan.from_payload(obj)
