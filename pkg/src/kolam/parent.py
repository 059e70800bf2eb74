"""Parent kolam: per-dot rotation systems of strand-ends and boundary arcs.

The parent is the structure every kolam of a dot set descends from: one
closed loop around each dot, with paired arms meeting at the junctions.
Tracing later alternates between junction pairings and the boundary arcs
built here, so each strand-end gets exactly one arc partner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometryError, IsolatedDotError
from .geometry import DotSet, JunctionSet, StrandEnd, _ang_diff, _bearing


@dataclass(frozen=True)
class BoundaryArc:
    """Loop section around `dot` from strand-end `src` to `dst` (CCW).

    A dot with no junctions contributes a single full-circle arc with no
    endpoints (src == dst == -1).
    """
    id: int
    dot: int
    src: int
    dst: int

    @property
    def is_circle(self) -> bool:
        return self.src < 0


class ParentKolam:
    def __init__(self, dots: DotSet, junctions: JunctionSet,
                 rotations: dict[int, tuple[int, ...]],
                 arcs: tuple[BoundaryArc, ...]):
        self.dots = dots
        self.junctions = junctions
        self.rotations = rotations
        self.arcs = arcs
        self.ends: dict[int, StrandEnd] = {e.end_id: e for e in junctions.ends}
        arc_of: dict[int, int] = {}
        for arc in arcs:
            if arc.is_circle:
                continue
            for e in (arc.src, arc.dst):
                if e in arc_of:
                    raise DegenerateGeometryError(
                        f"strand-end {e} belongs to two boundary arcs")
            arc_of[arc.src] = arc.id
            arc_of[arc.dst] = arc.id
        if set(arc_of) != set(self.ends):
            raise DegenerateGeometryError("boundary arcs do not cover all ends")
        self.arc_of_end = arc_of

    @property
    def junction_count(self) -> int:
        return len(self.junctions)

    def arc_other_end(self, arc_id: int, end_id: int) -> int:
        arc = self.arcs[arc_id]
        return arc.dst if arc.src == end_id else arc.src


def build_parent(dots: DotSet, junctions: JunctionSet) -> ParentKolam:
    """Sort each dot's strand-ends by bearing and join them into arcs."""
    if len(dots) > 1:
        for d in dots:
            if not junctions.incident[d.id]:
                raise IsolatedDotError(
                    f"dot {d.id} has no junction under this policy; "
                    "it cannot be woven into the kolam")

    rotations: dict[int, tuple[int, ...]] = {}
    arcs: list[BoundaryArc] = []
    for d in dots:
        incident = junctions.incident[d.id]
        ends = [e for jid in incident for e in junctions[jid].ends
                if e.dot_id == d.id]
        if not ends:
            rotations[d.id] = ()
            arcs.append(BoundaryArc(len(arcs), d.id, -1, -1))
            continue

        def key(e: StrandEnd):
            b = _bearing(d.pos, e.pos) % (2.0 * math.pi)
            dist = math.hypot(e.x - d.x, e.y - d.y)
            return (b, dist, e.junction_id, e.side)

        ends.sort(key=key)
        keys = [key(e) for e in ends]
        for i in range(len(ends)):
            if keys[i][:2] == keys[(i + 1) % len(ends)][:2] and \
                    ends[i].junction_id != ends[(i + 1) % len(ends)].junction_id:
                raise DegenerateGeometryError(
                    f"ends of junctions {ends[i].junction_id} and "
                    f"{ends[(i+1) % len(ends)].junction_id} leave dot {d.id} "
                    "at the same bearing")
        rotations[d.id] = tuple(e.end_id for e in ends)

        m = len(ends)
        if m == 2 and ends[0].junction_id == ends[1].junction_id:
            # Single junction: of the two gaps, the arm gap is the one that
            # spans the junction direction; the other is the boundary arc.
            jpos = junctions[ends[0].junction_id].position
            jb = _bearing(d.pos, jpos) % (2.0 * math.pi)
            b0 = _bearing(d.pos, ends[0].pos) % (2.0 * math.pi)
            b1 = _bearing(d.pos, ends[1].pos) % (2.0 * math.pi)
            span01 = (b1 - b0) % (2.0 * math.pi)
            inside01 = (jb - b0) % (2.0 * math.pi) <= span01
            if inside01:
                arcs.append(BoundaryArc(len(arcs), d.id,
                                        ends[1].end_id, ends[0].end_id))
            else:
                arcs.append(BoundaryArc(len(arcs), d.id,
                                        ends[0].end_id, ends[1].end_id))
            continue

        for i in range(m):
            e0, e1 = ends[i], ends[(i + 1) % m]
            if e0.junction_id == e1.junction_id:
                continue  # arm gap; the bond resolution owns it
            arcs.append(BoundaryArc(len(arcs), d.id, e0.end_id, e1.end_id))

    parent = ParentKolam(dots, junctions, rotations, tuple(arcs))

    # Both ends of every junction must sit side by side in the rotation,
    # otherwise the arms of different junctions would interleave.
    for d in dots:
        rot = parent.rotations[d.id]
        m = len(rot)
        by_junction: dict[int, list[int]] = {}
        for i, eid in enumerate(rot):
            by_junction.setdefault(parent.ends[eid].junction_id, []).append(i)
        for jid, idxs in by_junction.items():
            if len(idxs) != 2:
                raise DegenerateGeometryError(
                    f"junction {jid} contributes {len(idxs)} ends to dot {d.id}")
            gap = (idxs[1] - idxs[0]) % m
            if gap not in (1, m - 1):
                raise DegenerateGeometryError(
                    f"arms of junction {jid} interleave with another junction "
                    f"around dot {d.id}")
    return parent


# ---------------------------------------------------------------------------
# homotopy proxy: canonical form of the embedded structure

def _arm_cycles(parent: ParentKolam) -> dict[int, list[tuple[int, int]]]:
    """Per dot, the CCW cyclic list of (junction id, other dot id) arms."""
    cycles: dict[int, list[tuple[int, int]]] = {}
    for d in parent.dots:
        rot = parent.rotations[d.id]
        arms: list[tuple[int, int]] = []
        for eid in rot:
            e = parent.ends[eid]
            j = parent.junctions[e.junction_id]
            other = j.b if e.dot_id == j.a else j.a
            entry = (e.junction_id, other)
            if arms and arms[-1] == entry:
                continue
            arms.append(entry)
        if len(arms) > 1 and arms[0] == arms[-1]:
            arms.pop()
        cycles[d.id] = arms
    return cycles


def _encode_from(cycles: dict[int, list[tuple[int, int]]], start: int,
                 first_arm: int, direction: int) -> tuple:
    """Breadth-first canonical encoding of one connected component."""
    label = {start: 0}
    order = [start]
    entry_arm = {start: first_arm}
    out: list[tuple[int, ...]] = []
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        arms = cycles[v]
        m = len(arms)
        seq = []
        k0 = entry_arm[v]
        for step in range(m):
            idx = (k0 + direction * step) % m
            jid, other = arms[idx]
            if other not in label:
                label[other] = len(order)
                order.append(other)
                # entry arm at `other`: same junction seen from the far side
                oarms = cycles[other]
                entry_arm[other] = next(
                    i for i, (oj, od) in enumerate(oarms) if oj == jid and od == v)
            seq.append(label[other])
        out.append(tuple(seq))
    return tuple(out)


def _components(cycles: dict[int, list[tuple[int, int]]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for d in sorted(cycles):
        if d in seen:
            continue
        comp = [d]
        seen.add(d)
        stack = [d]
        while stack:
            v = stack.pop()
            for _, other in cycles[v]:
                if other not in seen:
                    seen.add(other)
                    comp.append(other)
                    stack.append(other)
        comps.append(comp)
    return comps


def parent_signature(parent: ParentKolam) -> str:
    """Canonical label of the parent's embedded structure.

    Two parents get equal signatures exactly when their junction incidence
    and per-dot cyclic arm orders are isomorphic, allowing global reflection.
    This is the computable stand-in for continuous deformability of parents.
    """
    cycles = _arm_cycles(parent)
    comp_codes = []
    for comp in _components(cycles):
        if len(comp) == 1 and not cycles[comp[0]]:
            comp_codes.append((("o",),))
            continue
        best: tuple | None = None
        for start in comp:
            m = len(cycles[start])
            for direction in (1, -1):
                for first in range(m):
                    enc = _encode_from(cycles, start, first, direction)
                    if best is None or enc < best:
                        best = enc
        assert best is not None
        comp_codes.append(best)
    comp_codes.sort()
    return "//".join(
        "|".join(",".join(str(x) for x in seq) for seq in code)
        for code in comp_codes)


def signatures_equal(p1: ParentKolam, p2: ParentKolam) -> bool:
    return parent_signature(p1) == parent_signature(p2)
