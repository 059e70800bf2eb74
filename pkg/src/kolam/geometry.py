"""Dot sets, junction placement, and planar point-group machinery.

Junctions sit on the perpendicular bisector of their dot pair.  A junction
whose nominal spot collides with a third dot (or with another junction) is
slid along the bisector until the spot and both connecting arms clear the
obstacles; the slide is computed from coordinates only, never from dot
labels, so symmetric inputs rebuild to the same position multiset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import (
    CoincidentDotsError,
    GroupActionError,
    InvalidDotSetError,
    PolicyError,
)

# Loop drawn around each dot, as a fraction of its nearest-dot distance.
LOOP_RATIO = 0.35
# Collision triggers (fractions of the obstacle dot's loop radius).
TRIGGER_POINT = 1.15
TRIGGER_ARM = 1.05
# Clearance targets used while sliding a colliding junction.
CLEAR_POINT = 1.50
CLEAR_ARM_BASE = 1.25
CLEAR_ARM_SLOPE = 0.25
CLEAR_ARM_MAX = 2.50
# Minimum separation kept between a slid junction and already-placed ones.
JUNCTION_SEP_RATIO = 0.30
# Safety net: arms leaving the same dot stay at least this far apart (rad).
BEARING_SEP = 0.02
# Slot spacing along the bisector when a pair carries several junctions.
SLOT_SPACING = 0.15
# Offset of the four strand-ends from the junction point.
END_OFFSET = 1e-3

COINCIDENCE_REL_TOL = 1e-9
SYMMETRY_REL_TOL = 1e-6
NEIGHBOR_SLACK = 1e-6

POLICY_MODES = ("all-pairs", "nearest-neighbor", "cutoff")


# ---------------------------------------------------------------------------
# small vector helpers (plain tuples; numpy only for batch work)

def _dist(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _seg_point_dist(a: tuple[float, float], b: tuple[float, float],
                    p: tuple[float, float]) -> float:
    """Distance from point p to segment a-b."""
    ax, ay = a
    vx, vy = b[0] - ax, b[1] - ay
    wx, wy = p[0] - ax, p[1] - ay
    vv = vx * vx + vy * vy
    if vv <= 0.0:
        return math.hypot(wx, wy)
    t = (wx * vx + wy * vy) / vv
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(wx - t * vx, wy - t * vy)


def _bearing(frm: tuple[float, float], to: tuple[float, float]) -> float:
    return math.atan2(to[1] - frm[1], to[0] - frm[0])


def _ang_diff(a: float, b: float) -> float:
    """Absolute angular difference in [0, pi]."""
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


# ---------------------------------------------------------------------------
# dots

@dataclass(frozen=True)
class Dot:
    id: int
    x: float
    y: float

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)


class DotSet:
    """Validated, immutable collection of dots with ids 0..N-1."""

    def __init__(self, dots: list[Dot] | tuple[Dot, ...]):
        dots = tuple(sorted(dots, key=lambda d: d.id))
        if not dots:
            raise InvalidDotSetError("dot set is empty", code="empty-dot-set")
        ids = [d.id for d in dots]
        if ids != list(range(len(dots))):
            raise InvalidDotSetError(
                f"dot ids must be contiguous from 0, got {ids}")
        self.dots = dots
        coords = np.array([[d.x, d.y] for d in dots], dtype=float)
        if not np.isfinite(coords).all():
            raise InvalidDotSetError("dot coordinates must be finite")
        self._coords = coords
        lo, hi = coords.min(axis=0), coords.max(axis=0)
        self.bbox_diag = float(np.hypot(*(hi - lo)))
        self.coincidence_tol = COINCIDENCE_REL_TOL * self.bbox_diag
        self.symmetry_tol = SYMMETRY_REL_TOL * max(self.bbox_diag, 1e-300)
        for i, j in combinations(range(len(dots)), 2):
            if _dist(dots[i].pos, dots[j].pos) <= self.coincidence_tol:
                raise CoincidentDotsError(
                    f"dots {i} and {j} coincide within tolerance")

    @classmethod
    def from_coords(cls, coords) -> "DotSet":
        return cls([Dot(i, float(x), float(y)) for i, (x, y) in enumerate(coords)])

    def __len__(self) -> int:
        return len(self.dots)

    def __iter__(self):
        return iter(self.dots)

    def __getitem__(self, i: int) -> Dot:
        return self.dots[i]

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @cached_property
    def centroid(self) -> tuple[float, float]:
        c = self._coords.mean(axis=0)
        return (float(c[0]), float(c[1]))

    @cached_property
    def nearest_distances(self) -> tuple[float, ...]:
        """Distance from each dot to its nearest other dot (inf for N=1)."""
        n = len(self.dots)
        if n == 1:
            return (math.inf,)
        d = np.linalg.norm(self._coords[:, None] - self._coords[None, :], axis=2)
        np.fill_diagonal(d, np.inf)
        return tuple(float(v) for v in d.min(axis=1))

    @cached_property
    def loop_radii(self) -> tuple[float, ...]:
        """Default drawing radius of the closed loop around each dot."""
        if len(self.dots) == 1:
            return (1.0,)
        return tuple(LOOP_RATIO * d for d in self.nearest_distances)


# ---------------------------------------------------------------------------
# junction policy

@dataclass(frozen=True)
class JunctionPolicy:
    mode: str = "all-pairs"
    cutoff_distance: float | None = None
    junctions_per_pair: int = 1

    def __post_init__(self):
        if self.mode not in POLICY_MODES:
            raise PolicyError(f"unknown policy mode {self.mode!r}",
                              code="unknown-mode")
        if self.mode == "cutoff":
            if self.cutoff_distance is None or self.cutoff_distance <= 0:
                raise PolicyError("cutoff policy needs a positive cutoff_distance",
                                  code="bad-cutoff")
        if self.junctions_per_pair < 1:
            raise PolicyError("junctions_per_pair must be >= 1")

    def active_pairs(self, dots: DotSet) -> list[tuple[int, int]]:
        n = len(dots)
        pairs = []
        if self.mode == "all-pairs":
            pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        elif self.mode == "cutoff":
            lim = self.cutoff_distance * (1.0 + NEIGHBOR_SLACK)
            pairs = [(a, b) for a in range(n) for b in range(a + 1, n)
                     if _dist(dots[a].pos, dots[b].pos) <= lim]
        else:  # nearest-neighbor: both endpoints see the pair as (near) nearest
            nnd = dots.nearest_distances
            for a in range(n):
                for b in range(a + 1, n):
                    d = _dist(dots[a].pos, dots[b].pos)
                    if d <= (1.0 + NEIGHBOR_SLACK) * min(nnd[a], nnd[b]):
                        pairs.append((a, b))
        return pairs


# ---------------------------------------------------------------------------
# junctions

#: order of the four strand-ends within one junction
END_SIDES = (("a", "L"), ("a", "R"), ("b", "L"), ("b", "R"))


@dataclass(frozen=True)
class StrandEnd:
    end_id: int
    junction_id: int
    dot_id: int
    side: str          # "L" or "R", in the frame of the directed line a->b
    x: float
    y: float

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Junction:
    id: int
    pair: tuple[int, int]          # (a, b) with a < b
    slot: int
    position: tuple[float, float]  # possibly displaced
    nominal: tuple[float, float]   # undisplaced bisector spot
    displaced: bool
    strained: bool
    ends: tuple[StrandEnd, ...]

    @property
    def a(self) -> int:
        return self.pair[0]

    @property
    def b(self) -> int:
        return self.pair[1]

    def end(self, dot_id: int, side: str) -> StrandEnd:
        for e in self.ends:
            if e.dot_id == dot_id and e.side == side:
                return e
        raise KeyError((dot_id, side))


def _make_ends(jid: int, pair: tuple[int, int], pos: tuple[float, float],
               dots: DotSet) -> tuple[StrandEnd, ...]:
    a, b = pair
    pa, pb = dots[a].pos, dots[b].pos
    ux, uy = pb[0] - pa[0], pb[1] - pa[1]
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm
    nx, ny = -uy, ux                       # left of the directed line a->b
    eps = END_OFFSET * norm
    px, py = pos
    spots = {
        ("a", "L"): (px - eps * ux + eps * nx, py - eps * uy + eps * ny),
        ("a", "R"): (px - eps * ux - eps * nx, py - eps * uy - eps * ny),
        ("b", "L"): (px + eps * ux + eps * nx, py + eps * uy + eps * ny),
        ("b", "R"): (px + eps * ux - eps * nx, py + eps * uy - eps * ny),
    }
    ends = []
    for k, (role, side) in enumerate(END_SIDES):
        dot_id = a if role == "a" else b
        ex, ey = spots[(role, side)]
        ends.append(StrandEnd(4 * jid + k, jid, dot_id, side, ex, ey))
    return tuple(ends)


class JunctionSet:
    def __init__(self, dots: DotSet, policy: JunctionPolicy,
                 junctions: tuple[Junction, ...]):
        self.dots = dots
        self.policy = policy
        self.junctions = junctions
        incident: dict[int, list[int]] = {d.id: [] for d in dots}
        for j in junctions:
            incident[j.a].append(j.id)
            incident[j.b].append(j.id)
        self.incident = {k: tuple(v) for k, v in incident.items()}
        self.ends = tuple(e for j in junctions for e in j.ends)

    def __len__(self) -> int:
        return len(self.junctions)

    def __iter__(self):
        return iter(self.junctions)

    def __getitem__(self, i: int) -> Junction:
        return self.junctions[i]


def _canonical_axis(pa: tuple[float, float], pb: tuple[float, float]):
    """Label-free direction and left normal for the segment pa-pb."""
    if (pb[0], pb[1]) < (pa[0], pa[1]):
        pa, pb = pb, pa
    ux, uy = pb[0] - pa[0], pb[1] - pa[1]
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm
    return (ux, uy), (-uy, ux)


class _Placer:
    """Deterministic, label-free collision resolution for junction spots."""

    def __init__(self, dots: DotSet):
        self.dots = dots
        self.radii = dots.loop_radii
        self.nnd = dots.nearest_distances
        self.placed: list[tuple[int, tuple[int, int], tuple[float, float]]] = []

    def _clear_arm(self, t: int, pair_len: float) -> float:
        ratio = pair_len / self.nnd[t] if math.isfinite(self.nnd[t]) else 1.0
        f = CLEAR_ARM_BASE + CLEAR_ARM_SLOPE * ratio
        f = min(max(f, CLEAR_POINT), CLEAR_ARM_MAX)
        return f * self.radii[t]

    def _third_dots(self, pair: tuple[int, int]) -> list[int]:
        return [d.id for d in self.dots if d.id not in pair]

    def triggered(self, pair: tuple[int, int], pos: tuple[float, float]) -> bool:
        pa, pb = self.dots[pair[0]].pos, self.dots[pair[1]].pos
        for t in self._third_dots(pair):
            pt = self.dots[t].pos
            if _dist(pos, pt) < TRIGGER_POINT * self.radii[t]:
                return True
            if min(_seg_point_dist(pa, pos, pt),
                   _seg_point_dist(pb, pos, pt)) < TRIGGER_ARM * self.radii[t]:
                return True
        tol = max(self.dots.coincidence_tol, 1e-15)
        for _, _, q in self.placed:
            if _dist(pos, q) <= tol:
                return True
        return False

    def _violation(self, pair: tuple[int, int], pos: tuple[float, float],
                   pair_len: float) -> float:
        """0.0 when pos satisfies every clearance constraint."""
        pa, pb = self.dots[pair[0]].pos, self.dots[pair[1]].pos
        bad = 0.0
        for t in self._third_dots(pair):
            pt = self.dots[t].pos
            bad += max(0.0, CLEAR_POINT * self.radii[t] - _dist(pos, pt))
            need = self._clear_arm(t, pair_len)
            bad += max(0.0, need - _seg_point_dist(pa, pos, pt))
            bad += max(0.0, need - _seg_point_dist(pb, pos, pt))
        sep = JUNCTION_SEP_RATIO * min(self.radii[pair[0]], self.radii[pair[1]])
        for _, opair, q in self.placed:
            bad += max(0.0, sep - _dist(pos, q))
            shared = set(pair) & set(opair)
            for s in shared:
                ps = self.dots[s].pos
                gap = _ang_diff(_bearing(ps, pos), _bearing(ps, q))
                if gap < BEARING_SEP:
                    bad += (BEARING_SEP - gap) * max(pair_len, 1.0)
        return bad

    def place(self, pair: tuple[int, int], nominal: tuple[float, float],
              pair_len: float) -> tuple[tuple[float, float], bool, bool]:
        """Return (position, displaced, strained)."""
        if not self.triggered(pair, nominal):
            self.placed.append((len(self.placed), pair, nominal))
            return nominal, False, False
        _, left = _canonical_axis(self.dots[pair[0]].pos, self.dots[pair[1]].pos)
        step = 0.02 * pair_len
        d_max = 3.0 * (pair_len + max(self.dots.bbox_diag, pair_len))
        best: tuple[float, float, tuple[float, float]] | None = None  # (viol, d, pos)
        for side in (1.0, -1.0):
            prev_d = 0.0
            prev_bad = self._violation(pair, nominal, pair_len)
            d = step
            while d <= d_max:
                pos = (nominal[0] + side * d * left[0],
                       nominal[1] + side * d * left[1])
                bad = self._violation(pair, pos, pair_len)
                if bad == 0.0:
                    lo, hi = prev_d, d
                    for _ in range(40):
                        mid = 0.5 * (lo + hi)
                        mp = (nominal[0] + side * mid * left[0],
                              nominal[1] + side * mid * left[1])
                        if self._violation(pair, mp, pair_len) == 0.0:
                            hi = mid
                        else:
                            lo = mid
                    pos = (nominal[0] + side * hi * left[0],
                           nominal[1] + side * hi * left[1])
                    self.placed.append((len(self.placed), pair, pos))
                    return pos, True, False
                if best is None or bad < best[0] - 1e-15:
                    best = (bad, side * d, pos)
                prev_d, prev_bad = d, bad
                d += step
        # No clean spot exists; keep the least-bad candidate and flag it.
        assert best is not None
        self.placed.append((len(self.placed), pair, best[2]))
        return best[2], True, True


def build_junctions(dots: DotSet, policy: JunctionPolicy) -> JunctionSet:
    """Place one junction per active pair per slot, resolving collisions."""
    pairs = policy.active_pairs(dots)
    J = policy.junctions_per_pair

    entries = []  # (pair, slot, nominal, pair_len, sort_key)
    for (a, b) in pairs:
        pa, pb = dots[a].pos, dots[b].pos
        pair_len = _dist(pa, pb)
        mid = ((pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0)
        direction, left = _canonical_axis(pa, pb)
        angle = math.atan2(direction[1], direction[0]) % math.pi
        lexlo = min((pa, pb))
        for slot in range(J):
            off = (slot - (J - 1) / 2.0) * SLOT_SPACING * pair_len
            nominal = (mid[0] + off * left[0], mid[1] + off * left[1])
            key = (angle, pair_len, off, lexlo)
            entries.append(((a, b), slot, nominal, pair_len, key))

    # Label-free processing order: cluster exactly coincident nominal spots,
    # then order clusters by position and members by geometry.
    tol = max(dots.coincidence_tol, 1e-15)
    m = len(entries)
    parent_idx = list(range(m))

    def find(i):
        while parent_idx[i] != i:
            parent_idx[i] = parent_idx[parent_idx[i]]
            i = parent_idx[i]
        return i

    for i in range(m):
        for k in range(i + 1, m):
            if _dist(entries[i][2], entries[k][2]) <= tol:
                parent_idx[find(i)] = find(k)
    clusters: dict[int, list[int]] = {}
    for i in range(m):
        clusters.setdefault(find(i), []).append(i)

    ordered: list[int] = []
    for root in sorted(clusters, key=lambda r: min(entries[i][2] for i in clusters[r])):
        ordered.extend(sorted(clusters[root], key=lambda i: entries[i][4]))

    placer = _Placer(dots)
    results: dict[int, tuple[tuple[float, float], bool, bool]] = {}
    for i in ordered:
        pair, slot, nominal, pair_len, _ = entries[i]
        results[i] = placer.place(pair, nominal, pair_len)

    # Final ids follow (pair, slot) lexicographic order.
    id_order = sorted(range(m), key=lambda i: (entries[i][0], entries[i][1]))
    junctions = []
    for jid, i in enumerate(id_order):
        pair, slot, nominal, _, _ = entries[i]
        pos, displaced, strained = results[i]
        junctions.append(Junction(
            id=jid, pair=pair, slot=slot, position=pos, nominal=nominal,
            displaced=displaced, strained=strained,
            ends=_make_ends(jid, pair, pos, dots)))
    return JunctionSet(dots, policy, tuple(junctions))


# ---------------------------------------------------------------------------
# point groups

@dataclass(frozen=True)
class GroupElement:
    kind: str                       # "rotation" | "reflection"
    angle: float                    # rotation angle, or mirror axis angle
    matrix: tuple[tuple[float, float], tuple[float, float]]
    permutation: tuple[int, ...]    # dot i maps onto dot permutation[i]

    def apply(self, p: tuple[float, float],
              center: tuple[float, float]) -> tuple[float, float]:
        x, y = p[0] - center[0], p[1] - center[1]
        (m00, m01), (m10, m11) = self.matrix
        return (center[0] + m00 * x + m01 * y, center[1] + m10 * x + m11 * y)


@dataclass(frozen=True)
class PointGroup:
    kind: str                       # "C" | "D"
    n: int
    center: tuple[float, float]
    elements: tuple[GroupElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.n}"


def _rotation_matrix(theta: float):
    c, s = math.cos(theta), math.sin(theta)
    return ((c, -s), (s, c))


def _reflection_matrix(alpha: float):
    c, s = math.cos(2 * alpha), math.sin(2 * alpha)
    return ((c, s), (s, -c))


def _permutation_under(dots: DotSet, matrix, center, tol) -> tuple[int, ...] | None:
    coords = dots.coords
    cx, cy = center
    rel = coords - np.array([cx, cy])
    m = np.array(matrix)
    image = rel @ m.T + np.array([cx, cy])
    perm = []
    used = set()
    for i in range(len(coords)):
        d = np.linalg.norm(coords - image[i], axis=1)
        k = int(np.argmin(d))
        if d[k] > tol or k in used:
            return None
        used.add(k)
        perm.append(k)
    return tuple(perm)


def detect_point_group(dots: DotSet, tol: float | None = None) -> PointGroup:
    """Largest group of plane isometries fixing the centroid and permuting dots."""
    if tol is None:
        tol = dots.symmetry_tol
    center = dots.centroid
    n_dots = len(dots)

    if n_dots == 1:
        ident = GroupElement("rotation", 0.0, _rotation_matrix(0.0), (0,))
        return PointGroup("C", 1, center, (ident,))

    valid_orders = []
    for k in range(2, n_dots + 1):
        perm = _permutation_under(dots, _rotation_matrix(2 * math.pi / k),
                                  center, tol)
        if perm is not None:
            valid_orders.append(k)
    n = 1
    for k in valid_orders:
        n = math.lcm(n, k)
    if n > 1 and _permutation_under(dots, _rotation_matrix(2 * math.pi / n),
                                    center, tol) is None:
        n = max(valid_orders)  # fp fallback; lcm composition failed

    rotations = []
    for k in range(n):
        theta = 2 * math.pi * k / n
        perm = _permutation_under(dots, _rotation_matrix(theta), center, tol)
        if perm is None:
            raise GroupActionError("rotation subgroup is not closed within tolerance")
        rotations.append(GroupElement("rotation", theta,
                                      _rotation_matrix(theta), perm))

    # Mirror axes must halve the angle between two dot directions.
    cands: list[float] = []
    angles = []
    for d in dots:
        if _dist(d.pos, center) > tol:
            angles.append(math.atan2(d.y - center[1], d.x - center[0]))
    for i in range(len(angles)):
        for k in range(i, len(angles)):
            cands.append(((angles[i] + angles[k]) / 2.0) % math.pi)
    cands.sort()
    mirrors = []
    seen: list[float] = []
    for alpha in cands:
        if any(_ang_diff(alpha, s) < 1e-9 or _ang_diff(alpha, s + math.pi) < 1e-9
               for s in seen):
            continue
        perm = _permutation_under(dots, _reflection_matrix(alpha), center, tol)
        if perm is not None:
            seen.append(alpha)
            mirrors.append(GroupElement("reflection", alpha,
                                        _reflection_matrix(alpha), perm))

    if mirrors and len(mirrors) != n:
        raise GroupActionError(
            f"inconsistent symmetry detection: {n} rotations vs {len(mirrors)} mirrors")
    kind = "D" if mirrors else "C"
    return PointGroup(kind, n, center, tuple(rotations + mirrors))


# ---------------------------------------------------------------------------
# junction symmetry classes

@dataclass(frozen=True)
class OrbitPartition:
    classes: tuple[tuple[int, ...], ...]   # junction ids, each sorted
    class_of: tuple[int, ...]              # junction id -> class index

    @property
    def g(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)


def _junction_image(junctions: JunctionSet, group: PointGroup,
                    elem: GroupElement, j: Junction, tol: float) -> int:
    a, b = elem.permutation[j.a], elem.permutation[j.b]
    pair = (a, b) if a < b else (b, a)
    target = elem.apply(j.nominal, group.center)
    best, best_d = -1, math.inf
    for k in junctions:
        if k.pair != pair:
            continue
        d = _dist(k.nominal, target)
        if d < best_d:
            best, best_d = k.id, d
    if best < 0 or best_d > tol:
        raise GroupActionError(
            f"element {elem.kind}@{elem.angle:.4f} does not map junction "
            f"{j.id} onto the junction set")
    return best


def junction_orbits(junctions: JunctionSet, group: PointGroup) -> OrbitPartition:
    """Partition junctions into symmetry classes under the group action.

    Matching uses the undisplaced bisector spots, so collision slides never
    break a true symmetry.
    """
    tol = junctions.dots.symmetry_tol
    m = len(junctions)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for elem in group.elements:
        for j in junctions:
            k = _junction_image(junctions, group, elem, j, tol)
            parent[find(j.id)] = find(k)

    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(sorted((tuple(sorted(v)) for v in groups.values()),
                           key=lambda c: c[0]))
    class_of = [0] * m
    for ci, cls in enumerate(classes):
        for j in cls:
            class_of[j] = ci
    return OrbitPartition(classes, tuple(class_of))


def junction_permutation(junctions: JunctionSet, group: PointGroup,
                         elem: GroupElement) -> tuple[int, ...]:
    """How one group element permutes junction ids."""
    tol = junctions.dots.symmetry_tol
    return tuple(_junction_image(junctions, group, elem, j, tol)
                 for j in junctions)
