"""Realize kolams as smooth closed curves, audit them, and emit SVG.

A realized kolam is assembled from three kinds of pieces:
  * boundary arcs: a radial arm from a strand-end to the dot's loop circle,
    a circular arc, and an arm back out to the next end,
  * connector paths resolving each junction per its bond
    (Broken caps, Double tracks, Cross lines),
  * plain circles for junction-free dots.
Piece geometry is fixed per parent; only connectors depend on the bond
choice, which keeps exhaustive enumeration cheap: winding numbers and
intersection audits are precomputed per piece and summed per assignment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagram import (
    BondAssignment,
    BondType,
    Kolam,
    Orbit,
    StrandDiagram,
    ValidationReport,
    WINDING_MIN,
    resolve,
    trace_orbits,
    validate,
)
from .errors import EditError, StyleError, TopologyRiskError
from .geometry import DotSet, Junction, JunctionPolicy, build_junctions
from .parent import ParentKolam, build_parent

AUDIT_REL_TOL = 1e-6
MIN_SIN = 1e-3          # transversality threshold for crossings
WIDTH_FLOOR = 1e-4
INTER_JUNCTION = 0.35
WIDTH_SLACK = 1.7       # clearance budget consumed per unit of half-width


@dataclass(frozen=True)
class Style:
    loop_ratio: float = 0.35
    width_ratio: float = 0.12
    angular_share: float = 0.35
    share_cap: float = math.radians(25.0)
    clearance_margin: float = 1.05
    delta_ratio: float = 0.6
    bulge_ratio: float = 0.25
    samples_per_turn: int = 96
    stroke_ratio: float = 0.045
    dot_radius_ratio: float = 0.08
    margin_ratio: float = 0.05
    stroke_color: str = "#2b2b47"
    dot_color: str = "#b03030"
    precision: int = 6

    def to_json(self) -> dict:
        return {
            "loop_ratio": self.loop_ratio,
            "width_ratio": self.width_ratio,
            "angular_share": self.angular_share,
            "share_cap": self.share_cap,
            "clearance_margin": self.clearance_margin,
            "delta_ratio": self.delta_ratio,
            "bulge_ratio": self.bulge_ratio,
            "samples_per_turn": self.samples_per_turn,
            "stroke_ratio": self.stroke_ratio,
            "dot_radius_ratio": self.dot_radius_ratio,
            "margin_ratio": self.margin_ratio,
            "stroke_color": self.stroke_color,
            "dot_color": self.dot_color,
            "precision": self.precision,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Style":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


DEFAULT_STYLE = Style()


# ---------------------------------------------------------------------------
# polyline helpers

def chaikin_closed(points: np.ndarray, iterations: int) -> np.ndarray:
    """Corner-cutting subdivision of a closed polyline."""
    pts = np.asarray(points, dtype=float)
    for _ in range(iterations):
        nxt = np.roll(pts, -1, axis=0)
        out = np.empty((2 * len(pts), 2), dtype=float)
        out[0::2] = 0.75 * pts + 0.25 * nxt
        out[1::2] = 0.25 * pts + 0.75 * nxt
        pts = out
    return pts


def polyline_winding(points: np.ndarray, center) -> float:
    """Turns of a closed polyline around a point, in full revolutions."""
    rel = np.asarray(points, float) - np.asarray(center, float)
    nxt = np.roll(rel, -1, axis=0)
    cross = rel[:, 0] * nxt[:, 1] - rel[:, 1] * nxt[:, 0]
    dot = (rel * nxt).sum(axis=1)
    return float(np.arctan2(cross, dot).sum() / (2.0 * math.pi))


def _open_path_angle(points: np.ndarray, center) -> float:
    """Swept angle of an open path around a point (radians)."""
    rel = np.asarray(points, float) - np.asarray(center, float)
    a, b = rel[:-1], rel[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = (a * b).sum(axis=1)
    return float(np.arctan2(cross, dot).sum())


def _segments_of(points: np.ndarray, closed: bool) -> np.ndarray:
    pts = np.asarray(points, float)
    if closed:
        nxt = np.roll(pts, -1, axis=0)
        return np.stack([pts, nxt], axis=1)
    return np.stack([pts[:-1], pts[1:]], axis=1)


def _audit_pairs(segs: np.ndarray, idx_a: np.ndarray, idx_b: np.ndarray,
                 tol: float, joints: np.ndarray | None):
    """Exact crossing/overlap/tangency tests for candidate segment pairs."""
    crossings = 0
    overlap = False
    tangency = False
    if len(idx_a) == 0:
        return crossings, overlap, tangency
    A0 = segs[idx_a, 0]
    A1 = segs[idx_a, 1]
    B0 = segs[idx_b, 0]
    B1 = segs[idx_b, 1]
    r = A1 - A0
    s = B1 - B0
    qp = B0 - A0
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    rlen = np.hypot(r[:, 0], r[:, 1])
    slen = np.hypot(s[:, 0], s[:, 1])
    scale = np.maximum(rlen * slen, 1e-300)
    sin = np.abs(denom) / scale

    parallel = sin < 1e-9
    if parallel.any():
        cr_qp_r = qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]
        line_d = np.abs(cr_qp_r) / np.maximum(rlen, 1e-300)
        near = parallel & (line_d <= tol)
        if near.any():
            rr = np.maximum((r * r).sum(axis=1), 1e-300)
            t0 = ((B0 - A0) * r).sum(axis=1) / rr
            t1 = ((B1 - A0) * r).sum(axis=1) / rr
            lo = np.maximum(np.minimum(t0, t1), 0.0)
            hi = np.minimum(np.maximum(t0, t1), 1.0)
            ov_len = (hi - lo) * rlen
            if bool(((ov_len > tol) & near).any()):
                overlap = True

    nonpar = ~parallel
    if nonpar.any():
        d = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / d
        u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / d
        eps_t = tol / np.maximum(rlen, 1e-300)
        eps_u = tol / np.maximum(slen, 1e-300)
        hit = nonpar & (t >= -eps_t) & (t <= 1 + eps_t) & \
            (u >= -eps_u) & (u <= 1 + eps_u)
        if hit.any():
            interior = hit & (t > eps_t) & (t < 1 - eps_t) & \
                (u > eps_u) & (u < 1 - eps_u)
            crossings = int(interior.sum())
            if bool((interior & (sin < MIN_SIN)).any()):
                tangency = True
            touch = hit & ~interior
            if touch.any():
                X = A0[touch] + t[touch, None] * r[touch]
                if joints is not None and len(joints):
                    dmin = np.sqrt(
                        ((X[:, None, :] - joints[None, :, :]) ** 2).sum(axis=2)
                    ).min(axis=1)
                    if bool((dmin > 3.0 * tol).any()):
                        tangency = True
                else:
                    tangency = True
    return crossings, overlap, tangency


def _grid_candidates(segs: np.ndarray, tol: float,
                     exclude_adjacent: np.ndarray | None = None):
    """Candidate intersecting pairs via uniform-grid binning.

    ``exclude_adjacent``: array (n, 2) of (curve_id, position) used to skip
    neighbouring segments of the same closed polyline.
    """
    n = len(segs)
    if n < 2:
        return np.empty(0, int), np.empty(0, int)
    lo = segs.min(axis=1) - tol
    hi = segs.max(axis=1) + tol
    lengths = np.hypot(*(segs[:, 1] - segs[:, 0]).T)
    cell = max(float(np.median(lengths)) * 4.0, tol * 8.0, 1e-12)
    i0 = np.floor(lo / cell).astype(np.int64)
    i1 = np.floor(hi / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for k in range(n):
        for cx in range(i0[k, 0], i1[k, 0] + 1):
            for cy in range(i0[k, 1], i1[k, 1] + 1):
                buckets.setdefault((cx, cy), []).append(k)
    pairs: set[tuple[int, int]] = set()
    for members in buckets.values():
        m = len(members)
        if m < 2:
            continue
        for x in range(m):
            for y in range(x + 1, m):
                a, b = members[x], members[y]
                pairs.add((a, b) if a < b else (b, a))
    if not pairs:
        return np.empty(0, int), np.empty(0, int)
    arr = np.array(sorted(pairs), dtype=int)
    ia, ib = arr[:, 0], arr[:, 1]
    if exclude_adjacent is not None:
        ca, pa = exclude_adjacent[ia, 0], exclude_adjacent[ia, 1]
        cb, pb = exclude_adjacent[ib, 0], exclude_adjacent[ib, 1]
        counts = np.bincount(exclude_adjacent[:, 0])
        same = ca == cb
        diff = np.abs(pa - pb)
        wrap = counts[ca] - diff
        adjacent = same & ((diff <= 1) | (wrap <= 1))
        keep = ~adjacent
        ia, ib = ia[keep], ib[keep]
    # bbox overlap refinement
    ok = ~((hi[ia] < lo[ib]) | (hi[ib] < lo[ia])).any(axis=1)
    return ia[ok], ib[ok]


def audit_polylines(polylines: list[np.ndarray], tol: float,
                    joints: np.ndarray | None = None):
    """Count transverse crossings and flag overlaps over a set of closed
    polylines (self- and mutual intersections)."""
    segs_list = []
    meta = []
    for ci, pts in enumerate(polylines):
        s = _segments_of(pts, closed=True)
        segs_list.append(s)
        meta.extend((ci, k) for k in range(len(s)))
    if not segs_list:
        return 0, False, False
    segs = np.concatenate(segs_list, axis=0)
    meta_arr = np.array(meta, dtype=int)
    ia, ib = _grid_candidates(segs, tol, exclude_adjacent=meta_arr)
    return _audit_pairs(segs, ia, ib, tol, joints)


# ---------------------------------------------------------------------------
# realization pieces

@dataclass(eq=False)
class Piece:
    key: tuple
    points: np.ndarray            # open polyline
    start_end: int                # strand-end id at points[0] (-1 for circles)
    stop_end: int

    def oriented(self, forward: bool) -> np.ndarray:
        return self.points if forward else self.points[::-1]


@dataclass(eq=False)
class Curve:
    orbit_index: int
    points: np.ndarray            # closed polyline, last point != first
    crossing_junctions: tuple[int, ...] = ()


def _line(p, q, n) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)[:, None]
    return np.asarray(p, float) * (1 - t) + np.asarray(q, float) * t


def _quad_bezier(p0, c, p2, n) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)[:, None]
    p0, c, p2 = (np.asarray(v, float) for v in (p0, c, p2))
    return (1 - t) ** 2 * p0 + 2 * (1 - t) * t * c + t ** 2 * p2


class Realizer:
    """Per-parent cache of realized pieces, winding sums, and audits."""

    def __init__(self, parent: ParentKolam, style: Style = DEFAULT_STYLE):
        self.parent = parent
        self.style = style
        dots = parent.dots
        self.dots = dots
        self.tol = AUDIT_REL_TOL * max(dots.bbox_diag, 1.0)
        nnd = dots.nearest_distances
        finite = [d for d in nnd if math.isfinite(d)]
        self.unit = float(np.mean(finite)) if finite else 1.0
        self.radii = tuple(
            style.loop_ratio * d if math.isfinite(d) else 1.0 for d in nnd)
        self._compute_widths()
        self._check_radii()
        self._build_fixed_pieces()
        self._build_variants()
        self._precompute_audits()

    # -- geometry ------------------------------------------------------

    def _junction_frame(self, j: Junction):
        a, b = self.dots[j.a].pos, self.dots[j.b].pos
        ux, uy = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(ux, uy)
        u = (ux / norm, uy / norm)
        nl = (-u[1], u[0])
        return u, nl, norm

    def _compute_widths(self):
        parent = self.parent
        dots = self.dots
        bearings: dict[int, list[tuple[float, int]]] = {d.id: [] for d in dots}
        for j in parent.junctions:
            for did in j.pair:
                p = dots[did].pos
                bearings[did].append(
                    (math.atan2(j.position[1] - p[1], j.position[0] - p[0]), j.id))
        self.widths: dict[int, float] = {}
        self.deltas: dict[int, float] = {}
        positions = [j.position for j in parent.junctions]
        for j in parent.junctions:
            u, nl, pair_len = self._junction_frame(j)
            w = self.style.width_ratio * pair_len
            for did in j.pair:
                p = dots[did].pos
                dist = math.hypot(j.position[0] - p[0], j.position[1] - p[1])
                others = [(a, jid2) for a, jid2 in bearings[did] if jid2 != j.id]
                if others:
                    mine = math.atan2(j.position[1] - p[1], j.position[0] - p[0])
                    gaps = []
                    for a, _ in others:
                        d = abs(a - mine) % (2 * math.pi)
                        gaps.append(min(d, 2 * math.pi - d))
                    if gaps:
                        share = min(self.style.angular_share * min(gaps),
                                    self.style.share_cap)
                        w = min(w, math.tan(share) * dist * 0.9)
                else:
                    w = min(w, math.tan(self.style.share_cap) * dist * 0.9)
            a, b = dots[j.a].pos, dots[j.b].pos
            for t in dots:
                if t.id in j.pair:
                    continue
                guard = self.style.clearance_margin * self.radii[t.id]
                slack = min(
                    math.hypot(j.position[0] - t.x, j.position[1] - t.y),
                    _seg_dist(a, j.position, t.pos),
                    _seg_dist(b, j.position, t.pos)) - guard
                if slack > 0:
                    w = min(w, slack / WIDTH_SLACK)
            for k, q in enumerate(positions):
                if k == j.id:
                    continue
                d = math.hypot(j.position[0] - q[0], j.position[1] - q[1])
                if d > 0:
                    w = min(w, INTER_JUNCTION * d)
            w = max(w, WIDTH_FLOOR * pair_len)
            self.widths[j.id] = w
            self.deltas[j.id] = self.style.delta_ratio * w

    def drawn_end(self, j: Junction, dot_id: int, side: str) -> np.ndarray:
        u, nl, _ = self._junction_frame(j)
        w, dlt = self.widths[j.id], self.deltas[j.id]
        along = -dlt if dot_id == j.a else dlt
        across = w if side == "L" else -w
        return np.array([j.position[0] + along * u[0] + across * nl[0],
                         j.position[1] + along * u[1] + across * nl[1]])

    def _check_radii(self):
        for j in self.parent.junctions:
            for did in j.pair:
                p = self.dots[did].pos
                for side in ("L", "R"):
                    e = self.drawn_end(j, did, side)
                    if self.radii[did] >= math.hypot(e[0] - p[0], e[1] - p[1]):
                        raise StyleError(
                            f"loop radius of dot {did} reaches past junction "
                            f"{j.id}; lower loop_ratio", code="radius-too-large")

    # -- pieces --------------------------------------------------------

    def _arc_samples(self, span: float) -> int:
        n = int(math.ceil(self.style.samples_per_turn * span / (2 * math.pi)))
        return max(n, 8)

    def _build_fixed_pieces(self):
        parent = self.parent
        self.pieces: dict[tuple, Piece] = {}
        self.end_positions: dict[int, np.ndarray] = {}
        for j in parent.junctions:
            for e in j.ends:
                self.end_positions[e.end_id] = self.drawn_end(j, e.dot_id, e.side)
        for arc in parent.arcs:
            d = self.dots[arc.dot]
            r = self.radii[arc.dot]
            if arc.is_circle:
                ang = np.linspace(0.0, 2 * math.pi, self.style.samples_per_turn + 1)
                pts = np.stack([d.x + r * np.cos(ang), d.y + r * np.sin(ang)], axis=1)
                self.pieces[("arc", arc.id)] = Piece(("arc", arc.id), pts, -1, -1)
                continue
            p_src = self.end_positions[arc.src]
            p_dst = self.end_positions[arc.dst]
            a_src = math.atan2(p_src[1] - d.y, p_src[0] - d.x)
            a_dst = math.atan2(p_dst[1] - d.y, p_dst[0] - d.x)
            span = (a_dst - a_src) % (2 * math.pi)
            x_src = np.array([d.x + r * math.cos(a_src), d.y + r * math.sin(a_src)])
            x_dst = np.array([d.x + r * math.cos(a_dst), d.y + r * math.sin(a_dst)])
            ang = np.linspace(a_src, a_src + span, self._arc_samples(span) + 1)
            circ = np.stack([d.x + r * np.cos(ang), d.y + r * np.sin(ang)], axis=1)
            pts = np.concatenate([
                _line(p_src, x_src, 4),
                circ[1:],
                _line(x_dst, p_dst, 4)[1:],
            ], axis=0)
            self.pieces[("arc", arc.id)] = Piece(("arc", arc.id), pts,
                                                 arc.src, arc.dst)

    def _connector_pieces(self, j: Junction, bond: BondType) -> list[Piece]:
        base = 4 * j.id
        u, nl, _ = self._junction_frame(j)
        w = self.widths[j.id]
        pos = {e.end_id: self.end_positions[e.end_id] for e in j.ends}
        out = []
        if bond is BondType.BROKEN:
            depth = self.style.bulge_ratio * 2 * w
            for k, (p, q, sgn) in enumerate(
                    ((base + 0, base + 1, -1.0), (base + 2, base + 3, 1.0))):
                mid = 0.5 * (pos[p] + pos[q])
                ctrl = mid + 2 * depth * sgn * np.array(u)
                pts = _quad_bezier(pos[p], ctrl, pos[q], 12)
                out.append(Piece(("conn", j.id, "B", k), pts, p, q))
        elif bond is BondType.DOUBLE:
            for k, (p, q) in enumerate(((base + 0, base + 2), (base + 1, base + 3))):
                out.append(Piece(("conn", j.id, "D", k),
                                 _line(pos[p], pos[q], 8), p, q))
        else:
            for k, (p, q) in enumerate(((base + 0, base + 3), (base + 1, base + 2))):
                out.append(Piece(("conn", j.id, "X", k),
                                 _line(pos[p], pos[q], 8), p, q))
        return out

    def _build_variants(self):
        self.variants: dict[tuple[int, str], list[Piece]] = {}
        for j in self.parent.junctions:
            for bond in BondType:
                self.variants[(j.id, bond.letter)] = self._connector_pieces(j, bond)

    # -- winding sums ----------------------------------------------------

    def _angles_for(self, pts: np.ndarray) -> np.ndarray:
        return np.array([
            _open_path_angle(pts, d.pos) for d in self.dots])

    def _precompute_audits(self):
        self.arc_angles: dict[int, np.ndarray] = {}
        for arc in self.parent.arcs:
            self.arc_angles[arc.id] = self._angles_for(
                self.pieces[("arc", arc.id)].points)
        self.conn_angles: dict[tuple[int, str, int], np.ndarray] = {}
        for (jid, letter), pieces in self.variants.items():
            for k, piece in enumerate(pieces):
                self.conn_angles[(jid, letter, k)] = self._angles_for(piece.points)

        joints = np.array(list(self.end_positions.values())) \
            if self.end_positions else None
        self.joints = joints

        fixed = [self.pieces[("arc", a.id)] for a in self.parent.arcs]

        def pair_audit(pa: Piece, pb: Piece):
            lo_a = pa.points.min(axis=0) - self.tol
            hi_a = pa.points.max(axis=0) + self.tol
            lo_b = pb.points.min(axis=0) - self.tol
            hi_b = pb.points.max(axis=0) + self.tol
            if (hi_a < lo_b).any() or (hi_b < lo_a).any():
                return (0, False, False)
            sa = _segments_of(pa.points, closed=False)
            sb = _segments_of(pb.points, closed=False)
            segs = np.concatenate([sa, sb], axis=0)
            na = len(sa)
            ia, ib = np.meshgrid(np.arange(na), na + np.arange(len(sb)),
                                 indexing="ij")
            return _audit_pairs(segs, ia.ravel(), ib.ravel(), self.tol, joints)

        total = [0, False, False]
        for i in range(len(fixed)):
            for k in range(i + 1, len(fixed)):
                c, o, t = pair_audit(fixed[i], fixed[k])
                total[0] += c
                total[1] = total[1] or o
                total[2] = total[2] or t
        self.fixed_audit = tuple(total)

        self.vf_audit: dict[tuple[int, str], tuple] = {}
        self.internal_audit: dict[tuple[int, str], tuple] = {}
        for (jid, letter), pieces in self.variants.items():
            acc = [0, False, False]
            for piece in pieces:
                for fp in fixed:
                    c, o, t = pair_audit(piece, fp)
                    acc[0] += c
                    acc[1] = acc[1] or o
                    acc[2] = acc[2] or t
            self.vf_audit[(jid, letter)] = tuple(acc)
            c, o, t = pair_audit(pieces[0], pieces[1])
            self.internal_audit[(jid, letter)] = (c, o, t)

        # connector-connector interactions only matter for nearby junctions
        self.close_pairs: list[tuple[int, int]] = []
        self.vv_audit: dict[tuple[int, int], dict[tuple[str, str], tuple]] = {}
        js = self.parent.junctions
        for i in range(len(js)):
            for k in range(i + 1, len(js)):
                ri = self.widths[i] * (1 + self.style.delta_ratio) + \
                    self.style.bulge_ratio * 2 * self.widths[i]
                rk = self.widths[k] * (1 + self.style.delta_ratio) + \
                    self.style.bulge_ratio * 2 * self.widths[k]
                d = math.hypot(js[i].position[0] - js[k].position[0],
                               js[i].position[1] - js[k].position[1])
                if d > ri + rk + 4 * self.tol:
                    continue
                self.close_pairs.append((i, k))
                table = {}
                for bi in BondType:
                    for bk in BondType:
                        acc = [0, False, False]
                        for pa in self.variants[(i, bi.letter)]:
                            for pb in self.variants[(k, bk.letter)]:
                                c, o, t = pair_audit(pa, pb)
                                acc[0] += c
                                acc[1] = acc[1] or o
                                acc[2] = acc[2] or t
                        table[(bi.letter, bk.letter)] = tuple(acc)
                self.vv_audit[(i, k)] = table

    # -- per-assignment products ----------------------------------------

    def realization_for(self, diagram: StrandDiagram,
                        orbits: list[Orbit]) -> "GeometricRealization":
        letters = {jid: diagram.assignment[jid].letter
                   for jid in range(self.parent.junction_count)}
        n_dots = len(self.dots)
        windings: dict[int, list[float]] = {d.id: [] for d in self.dots}
        for orbit in orbits:
            acc = np.zeros(n_dots)
            for pos, el in enumerate(orbit.elements):
                if not orbit.ends_path:
                    acc += self.arc_angles[el[1]]
                    continue
                e_in = orbit.ends_path[2 * pos]
                if el[0] == "bond":
                    jid, k = el[1], el[2]
                    piece = self.variants[(jid, letters[jid])][k]
                    ang = self.conn_angles[(jid, letters[jid], k)]
                else:
                    piece = self.pieces[("arc", el[1])]
                    ang = self.arc_angles[el[1]]
                acc += ang if e_in == piece.start_end else -ang
            w = acc / (2.0 * math.pi)
            for d in self.dots:
                windings[d.id].append(float(w[d.id]))

        cross, overlap, tangency = self.fixed_audit
        for jid, letter in letters.items():
            for table in (self.internal_audit, self.vf_audit):
                c, o, t = table[(jid, letter)]
                cross += c
                overlap = overlap or o
                tangency = tangency or t
        for (i, k) in self.close_pairs:
            c, o, t = self.vv_audit[(i, k)][(letters[i], letters[k])]
            cross += c
            overlap = overlap or o
            tangency = tangency or t
        return GeometricRealization(
            {d: tuple(v) for d, v in windings.items()},
            (cross, overlap, tangency))

    def realize(self, diagram: StrandDiagram, orbits: list[Orbit]) -> list[Curve]:
        letters = {jid: diagram.assignment[jid].letter
                   for jid in range(self.parent.junction_count)}
        curves = []
        for orbit in orbits:
            chunks: list[np.ndarray] = []
            if not orbit.ends_path:
                pts = self.pieces[("arc", orbit.elements[0][1])].points
                curves.append(Curve(orbit.index, pts[:-1].copy(),
                                    orbit.crossing_junctions))
                continue
            for pos, el in enumerate(orbit.elements):
                e_in = orbit.ends_path[2 * pos]
                if el[0] == "bond":
                    jid, k = el[1], el[2]
                    piece = self.variants[(jid, letters[jid])][k]
                else:
                    piece = self.pieces[("arc", el[1])]
                pts = piece.oriented(e_in == piece.start_end)
                chunks.append(pts if not chunks else pts[1:])
            pts = np.concatenate(chunks, axis=0)
            if np.allclose(pts[0], pts[-1], atol=self.tol):
                pts = pts[:-1]
            curves.append(Curve(orbit.index, pts, orbit.crossing_junctions))
        return curves


class GeometricRealization:
    """Winding table plus intersection audit for one assignment."""

    def __init__(self, windings: dict[int, tuple[float, ...]],
                 audit_result: tuple[int, bool, bool]):
        self._windings = windings
        self._audit = audit_result

    def winding_numbers(self) -> dict[int, tuple[float, ...]]:
        return self._windings

    def audit(self) -> tuple[int, bool, bool]:
        return self._audit


# ---------------------------------------------------------------------------
# smoothing

def smooth(curve: Curve, iterations: int, *, tol: float | None = None,
           audit: bool = True) -> Curve:
    """Corner-cutting smoothing; refuses to change the curve's topology."""
    if iterations <= 0:
        return curve
    if tol is None:
        span = curve.points.max(axis=0) - curve.points.min(axis=0)
        tol = AUDIT_REL_TOL * max(float(np.hypot(*span)), 1.0)
    before = audit_polylines([curve.points], tol) if audit else None
    pts = chaikin_closed(curve.points, iterations)
    out = Curve(curve.orbit_index, pts, curve.crossing_junctions)
    if audit:
        after = audit_polylines([pts], tol)
        if after[0] != before[0] or (after[1] and not before[1]):
            raise TopologyRiskError(
                "smoothing changed self-intersections "
                f"({before[0]} -> {after[0]})")
    return out


def smooth_curves(curves: list[Curve], iterations: int, tol: float,
                  *, audit: bool = True) -> list[Curve]:
    if iterations <= 0:
        return curves
    before = audit_polylines([c.points for c in curves], tol) if audit else None
    out = [Curve(c.orbit_index, chaikin_closed(c.points, iterations),
                 c.crossing_junctions) for c in curves]
    if audit:
        after = audit_polylines([c.points for c in out], tol)
        if after[0] != before[0] or (after[1] and not before[1]):
            raise TopologyRiskError(
                f"smoothing changed the curve set ({before} -> {after})")
    return out


# ---------------------------------------------------------------------------
# documents

@dataclass(eq=False)
class KolamDocument:
    dots: list[tuple[int, float, float]]
    policy: JunctionPolicy
    assignment: str
    style: Style
    smooth_iterations: int
    seed: int | None
    unit: float
    curves: list[Curve]
    curve_windings: list[dict[int, float]]
    junction_meta: list[dict]
    validation: ValidationReport
    notes: list[str] = field(default_factory=list)
    edits: list[dict] = field(default_factory=list)
    original_dots: list[tuple[int, float, float]] | None = None

    @property
    def schema(self) -> str:
        return "kolam-doc/1"


def _seg_dist(a, b, p) -> float:
    ax, ay = a
    vx, vy = b[0] - ax, b[1] - ay
    wx, wy = p[0] - ax, p[1] - ay
    vv = vx * vx + vy * vy
    if vv <= 0:
        return math.hypot(wx, wy)
    t = min(max((wx * vx + wy * vy) / vv, 0.0), 1.0)
    return math.hypot(wx - t * vx, wy - t * vy)


def generate_document(dots: DotSet, policy: JunctionPolicy,
                      assignment: BondAssignment, *,
                      style: Style = DEFAULT_STYLE,
                      smooth_iterations: int = 3,
                      seed: int | None = None,
                      notes: list[str] | None = None,
                      strict: bool = False) -> KolamDocument:
    """Full pipeline: junctions, parent, trace, realize, smooth, validate."""
    junctions = build_junctions(dots, policy)
    parent = build_parent(dots, junctions)
    diagram = resolve(parent, assignment)
    orbits = trace_orbits(diagram)
    realizer = Realizer(parent, style)
    curves = realizer.realize(diagram, orbits)
    curves = smooth_curves(curves, smooth_iterations, realizer.tol)

    windings = []
    for c in curves:
        windings.append({d.id: polyline_winding(c.points, d.pos) for d in dots})
    m1 = all(any(abs(w[d.id]) >= WINDING_MIN for w in windings) for d in dots)
    cross, overlap, tangency = audit_polylines(
        [c.points for c in curves], realizer.tol, realizer.joints)
    m2 = (not overlap) and (not tangency if strict else True)
    report = validate(diagram, orbits, mode="combinatorial")
    report = ValidationReport(m1, m2, report.m3_pass,
                              report.orbit_count, report.crossing_count)

    meta_notes = list(notes or [])
    for j in junctions:
        if j.strained:
            meta_notes.append(
                f"junction {j.id} could not fully clear nearby dots; "
                "drawing may be cramped")
    junction_meta = [{
        "id": j.id,
        "pair": list(j.pair),
        "slot": j.slot,
        "position": [j.position[0], j.position[1]],
        "nominal": [j.nominal[0], j.nominal[1]],
        "displaced": j.displaced,
    } for j in junctions]

    return KolamDocument(
        dots=[(d.id, d.x, d.y) for d in dots],
        policy=policy,
        assignment=assignment.to_string(),
        style=style,
        smooth_iterations=smooth_iterations,
        seed=seed,
        unit=realizer.unit,
        curves=curves,
        curve_windings=windings,
        junction_meta=junction_meta,
        validation=report,
        notes=meta_notes,
        original_dots=[(d.id, d.x, d.y) for d in dots],
    )


def build_kolam(dots: DotSet, policy: JunctionPolicy,
                assignment: BondAssignment, *,
                style: Style = DEFAULT_STYLE, strict: bool = False) -> Kolam:
    """Resolve, trace, and geometrically validate one kolam (no smoothing)."""
    junctions = build_junctions(dots, policy)
    parent = build_parent(dots, junctions)
    diagram = resolve(parent, assignment)
    orbits = trace_orbits(diagram)
    realizer = Realizer(parent, style)
    realization = realizer.realization_for(diagram, orbits)
    report = validate(diagram, orbits, realization, strict=strict)
    return Kolam(diagram, tuple(orbits), report,
                 realization.winding_numbers())


# ---------------------------------------------------------------------------
# O3 edits: change dots of a finished document, keep the curves

def edit_dots(doc: KolamDocument, edits: list[dict], *,
              strict: bool = True) -> KolamDocument:
    """Apply add/remove/move dot edits to a finished kolam document."""
    dots = {i: (x, y) for i, x, y in doc.dots}
    tol = AUDIT_REL_TOL * max(1.0, doc.unit)
    applied = []
    for edit in edits:
        op = edit.get("op")
        if op == "add":
            new_id = max(dots) + 1 if dots else 0
            dots[new_id] = (float(edit["x"]), float(edit["y"]))
        elif op == "remove":
            did = int(edit["id"])
            if did not in dots:
                raise EditError(f"no dot {did} to remove")
            del dots[did]
            if not dots and strict:
                raise EditError("removal would leave the document with no dots",
                                code="empty-document")
        elif op == "move":
            did = int(edit["id"])
            if did not in dots:
                raise EditError(f"no dot {did} to move")
            dots[did] = (float(edit["x"]), float(edit["y"]))
        else:
            raise EditError(f"unknown edit op {op!r}")
        applied.append(dict(edit))

    ids = sorted(dots)
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            if math.hypot(dots[ids[x]][0] - dots[ids[y]][0],
                          dots[ids[x]][1] - dots[ids[y]][1]) <= tol:
                raise EditError(
                    f"dots {ids[x]} and {ids[y]} coincide after the edit",
                    code="coincident-dots")

    # no dot may land on a curve
    for did, p in dots.items():
        for c in doc.curves:
            segs = _segments_of(c.points, closed=True)
            d = np.min(np.array([
                _seg_dist(tuple(s[0]), tuple(s[1]), p) for s in segs]))
            if d <= tol:
                raise EditError(f"dot {did} lies on a curve", code="dot-on-curve")

    new_ids = {old: new for new, old in enumerate(sorted(dots))}
    new_dots = [(new_ids[old], dots[old][0], dots[old][1])
                for old in sorted(dots)]

    windings = []
    for c in doc.curves:
        windings.append({new_ids[old]: polyline_winding(c.points, dots[old])
                         for old in sorted(dots)})
    m1 = all(any(abs(w[i]) >= WINDING_MIN for w in windings)
             for i, _, _ in new_dots)
    if strict and not m1:
        raise EditError("edit breaks circumscription: some dot is not wound "
                        "by any curve", code="m1-broken")

    old = doc.validation
    report = ValidationReport(m1, old.m2_pass, old.m3_pass,
                              old.orbit_count, old.crossing_count)
    return KolamDocument(
        dots=new_dots,
        policy=doc.policy,
        assignment=doc.assignment,
        style=doc.style,
        smooth_iterations=doc.smooth_iterations,
        seed=doc.seed,
        unit=doc.unit,
        curves=doc.curves,
        curve_windings=windings,
        junction_meta=doc.junction_meta,
        validation=report,
        notes=list(doc.notes),
        edits=list(doc.edits) + applied,
        original_dots=doc.original_dots,
    )


# ---------------------------------------------------------------------------
# SVG

def _fmt(v: float, prec: int) -> str:
    s = f"{v:.{prec}f}"
    return "-0." + s[3:] if s.startswith("-0.") else s


def emit_svg(doc: KolamDocument) -> str:
    """Deterministic SVG: one path per curve, one filled circle per dot."""
    if not doc.curves and not doc.dots:
        raise StyleError("cannot render an empty document", code="empty-document")
    prec = doc.style.precision
    dot_r = doc.style.dot_radius_ratio * doc.unit
    stroke = doc.style.stroke_ratio * doc.unit

    xs, ys = [], []
    for c in doc.curves:
        xs.extend((float(c.points[:, 0].min()), float(c.points[:, 0].max())))
        ys.extend((float(c.points[:, 1].min()), float(c.points[:, 1].max())))
    for _, x, y in doc.dots:
        xs.extend((x - dot_r, x + dot_r))
        ys.extend((y - dot_r, y + dot_r))
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad = doc.style.margin_ratio * max(x1 - x0, y1 - y0, doc.unit)
    x0, y0, w, h = x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0, prec)} {_fmt(y0, prec)} {_fmt(w, prec)} {_fmt(h, prec)}">',
        f'<g fill="none" stroke="{doc.style.stroke_color}" '
        f'stroke-width="{_fmt(stroke, prec)}" stroke-linejoin="round">',
    ]
    for c in doc.curves:
        coords = [f"{_fmt(float(x), prec)} {_fmt(float(y), prec)}"
                  for x, y in c.points]
        d = "M" + "L".join(coords) + "Z"
        lines.append(f'<path id="orbit-{c.orbit_index}" d="{d}"/>')
    lines.append("</g>")
    lines.append(f'<g fill="{doc.style.dot_color}">')
    for i, x, y in doc.dots:
        lines.append(
            f'<circle id="dot-{i}" cx="{_fmt(x, prec)}" cy="{_fmt(y, prec)}" '
            f'r="{_fmt(dot_r, prec)}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
