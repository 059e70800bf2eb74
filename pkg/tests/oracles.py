"""Independent reference implementations used to freeze expected values.

Nothing here shares code with the engine: winding uses the classic
ray-crossing accumulator, intersections use a brute-force O(n^2) sweep,
and the class count uses the cycle-counting average directly.
"""
from __future__ import annotations

import math


def winding_number(polygon, point) -> int:
    """Signed winding of a closed polygon around a point (ray crossing)."""
    px, py = point
    w = 0
    n = len(polygon)
    for i in range(n):
        x0, y0 = polygon[i]
        x1, y1 = polygon[(i + 1) % n]
        if y0 <= py:
            if y1 > py and (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0) > 0:
                w += 1
        elif y1 <= py and (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0) < 0:
            w -= 1
    return w


def _seg_intersect(p0, p1, q0, q1, eps: float):
    """Proper interior intersection test for two segments."""
    rx, ry = p1[0] - p0[0], p1[1] - p0[1]
    sx, sy = q1[0] - q0[0], q1[1] - q0[1]
    denom = rx * sy - ry * sx
    if abs(denom) < eps:
        return None
    qpx, qpy = q0[0] - p0[0], q0[1] - p0[1]
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    margin = 1e-9
    if margin < t < 1 - margin and margin < u < 1 - margin:
        return (p0[0] + t * rx, p0[1] + t * ry)
    return None


def count_intersections(polylines, eps: float = 1e-12) -> int:
    """Brute-force count of interior crossings over closed polylines."""
    segs = []
    for ci, pts in enumerate(polylines):
        n = len(pts)
        for i in range(n):
            segs.append((ci, i, tuple(pts[i]), tuple(pts[(i + 1) % n])))
    count = 0
    lengths = {}
    for ci, pts in enumerate(polylines):
        lengths[ci] = len(pts)
    for a in range(len(segs)):
        ca, ia, p0, p1 = segs[a]
        for b in range(a + 1, len(segs)):
            cb, ib, q0, q1 = segs[b]
            if ca == cb:
                d = abs(ia - ib)
                if d <= 1 or lengths[ca] - d <= 1:
                    continue
            if _seg_intersect(p0, p1, q0, q1, eps):
                count += 1
    return count


def class_count_by_cycle_average(perms, colors: int) -> int:
    """Number of coloring classes under a permutation group action."""
    total = 0
    for perm in perms:
        seen = set()
        cycles = 0
        for i in range(len(perm)):
            if i in seen:
                continue
            cycles += 1
            j = i
            while j not in seen:
                seen.add(j)
                j = perm[j]
        total += colors ** cycles
    assert total % len(perms) == 0
    return total // len(perms)


def lifted_junction_height(junction_x: float, obstacle_x: float,
                           clearance: float) -> float:
    """Minimal lift of a junction above a collinear obstacle dot.

    Dot at the origin, junction at (junction_x, h), obstacle dot at
    (obstacle_x, 0).  The arm from the dot to the junction must keep
    perpendicular distance >= clearance from the obstacle:
        h * obstacle_x / hypot(junction_x, h) >= clearance.
    Solving for the minimal h (valid while the perpendicular foot lies
    inside the arm, true whenever obstacle_x <= junction_x):
    """
    return clearance * junction_x / math.sqrt(obstacle_x ** 2 - clearance ** 2)
