"""Counting and exhaustive generation of kolams over a parent.

With b bond kinds and one junction per active dot pair, a parent with J
junctions admits exactly b**J kolams; constraining symmetry-equivalent
junctions to share a bond reduces that to b**g where g is the number of
junction symmetry classes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .diagram import BondAssignment, BondType, Kolam, resolve, trace_orbits, validate
from .errors import AssignmentError
from .geometry import OrbitPartition, PointGroup, junction_orbits, junction_permutation
from .parent import ParentKolam
from .render import DEFAULT_STYLE, Realizer, Style

BOND_ORDER = (BondType.BROKEN, BondType.DOUBLE, BondType.CROSS)


def count_kolams(n_dots: int, junctions_per_pair: int, bond_kinds: int) -> int:
    """Exact kolam count for the everyone-pairs-with-everyone policy."""
    if n_dots < 1 or junctions_per_pair < 1 or bond_kinds < 1:
        raise ValueError("all counting inputs must be positive")
    exponent = junctions_per_pair * n_dots * (n_dots - 1) // 2
    return bond_kinds ** exponent


def count_symmetric(g: int, bond_kinds: int) -> int:
    """Kolam count when symmetry-equivalent junctions share one bond."""
    if g < 0:
        raise ValueError("class count must be >= 0")
    if bond_kinds < 1:
        raise ValueError("bond kinds must be >= 1")
    return bond_kinds ** g


def type_label(assignment: BondAssignment) -> str:
    """Bond multiset in compact notation, e.g. 2 Broken + 1 Cross -> 'B2X'."""
    counts = Counter(b.letter for b in assignment.bonds.values())
    out = []
    for bond in BOND_ORDER:
        c = counts.get(bond.letter, 0)
        if c == 0:
            continue
        out.append(bond.letter if c == 1 else f"{bond.letter}{c}")
    return "".join(out) if out else "-"


def assignment_from_index(index: int, slots: int,
                          base: tuple[BondType, ...] = BOND_ORDER) -> list[BondType]:
    """Digits of ``index`` in base len(base), most significant first."""
    b = len(base)
    letters = []
    for _ in range(slots):
        letters.append(base[index % b])
        index //= b
    letters.reverse()
    return letters


def _expand_symmetric(class_bonds: list[BondType],
                      partition: OrbitPartition) -> dict[int, BondType]:
    bonds: dict[int, BondType] = {}
    for ci, cls in enumerate(partition.classes):
        for jid in cls:
            bonds[jid] = class_bonds[ci]
    return bonds


@dataclass(frozen=True)
class EnumerationConstraints:
    symmetric_under: PointGroup | None = None
    fixed_bonds: dict[int, BondType] | None = None


def enumerate_assignments(parent: ParentKolam,
                          constraints: EnumerationConstraints | None = None,
                          *,
                          validate_mode: str = "geometric",
                          style: Style = DEFAULT_STYLE,
                          start: int = 0,
                          limit: int | None = None,
                          ) -> Iterator[tuple[BondAssignment, Kolam]]:
    """Stream (assignment, kolam) pairs in lexicographic order (B < D < X).

    ``start``/``limit`` slice the stream by assignment index without
    materializing skipped entries.
    """
    constraints = constraints or EnumerationConstraints()
    m = parent.junction_count
    fixed = dict(constraints.fixed_bonds or {})
    for jid in fixed:
        if not 0 <= jid < m:
            raise AssignmentError(f"fixed bond for unknown junction {jid}")

    partition: OrbitPartition | None = None
    if constraints.symmetric_under is not None:
        partition = junction_orbits(parent.junctions, constraints.symmetric_under)
        fixed_classes: dict[int, BondType] = {}
        for jid, bond in fixed.items():
            ci = partition.class_of[jid]
            if fixed_classes.get(ci, bond) is not bond:
                raise AssignmentError(
                    f"fixed bonds disagree within symmetry class {ci}")
            fixed_classes[ci] = bond
        free = [ci for ci in range(partition.g) if ci not in fixed_classes]
        slots = len(free)
    else:
        fixed_classes = None
        free = [jid for jid in range(m) if jid not in fixed]
        slots = len(free)

    realizer = Realizer(parent, style) if validate_mode == "geometric" else None

    total = len(BOND_ORDER) ** slots
    stop = total if limit is None else min(total, start + limit)
    for index in range(start, stop):
        digits = assignment_from_index(index, slots)
        if partition is not None:
            class_bonds: list[BondType] = [None] * partition.g  # type: ignore
            for ci, bond in (fixed_classes or {}).items():
                class_bonds[ci] = bond
            for ci, bond in zip(free, digits):
                class_bonds[ci] = bond
            bonds = _expand_symmetric(class_bonds, partition)
        else:
            bonds = dict(fixed)
            bonds.update(zip(free, digits))
        assignment = BondAssignment(bonds, m)
        diagram = resolve(parent, assignment)
        orbits = trace_orbits(diagram)
        if realizer is not None:
            realization = realizer.realization_for(diagram, orbits)
            report = validate(diagram, orbits, realization)
            kolam = Kolam(diagram, tuple(orbits), report,
                          realization.winding_numbers())
        else:
            report = validate(diagram, orbits, mode="combinatorial")
            kolam = Kolam(diagram, tuple(orbits), report)
        yield assignment, kolam


def enumeration_size(parent: ParentKolam,
                     constraints: EnumerationConstraints | None = None) -> int:
    constraints = constraints or EnumerationConstraints()
    m = parent.junction_count
    fixed = constraints.fixed_bonds or {}
    if constraints.symmetric_under is not None:
        partition = junction_orbits(parent.junctions, constraints.symmetric_under)
        fixed_cls = {partition.class_of[j] for j in fixed}
        return len(BOND_ORDER) ** (partition.g - len(fixed_cls))
    return len(BOND_ORDER) ** (m - len(fixed))


# ---------------------------------------------------------------------------
# grouping whole assignments under the symmetry action

@dataclass(frozen=True)
class KolamType:
    label: str
    multiplicity: int
    representative: str          # lexicographically smallest member
    members: tuple[str, ...]


def burnside_class_count(parent: ParentKolam, group: PointGroup,
                         bond_kinds: int = 3) -> int:
    """Independent class count: average the assignments each element fixes."""
    total = 0
    for elem in group.elements:
        perm = junction_permutation(parent.junctions, group, elem)
        seen = set()
        cycles = 0
        for j in range(len(perm)):
            if j in seen:
                continue
            cycles += 1
            k = j
            while k not in seen:
                seen.add(k)
                k = perm[k]
        total += bond_kinds ** cycles
    assert total % len(group.elements) == 0
    return total // len(group.elements)


def classify_types(enumeration: list[tuple[BondAssignment, Kolam]],
                   parent: ParentKolam, group: PointGroup) -> list[KolamType]:
    """Group a complete enumeration into symmetry classes of assignments."""
    perms = [junction_permutation(parent.junctions, group, elem)
             for elem in group.elements]
    strings = [a.to_string() for a, _ in enumeration]
    index_of = {s: i for i, s in enumerate(strings)}
    if len(index_of) != len(strings):
        raise AssignmentError("enumeration contains duplicate assignments")

    seen: set[str] = set()
    classes: list[KolamType] = []
    for s in strings:
        if s in seen:
            continue
        members = set()
        for perm in perms:
            mapped = [""] * len(s)
            for j, ch in enumerate(s):
                mapped[perm[j]] = ch
            member = "".join(mapped)
            if member not in index_of:
                raise AssignmentError(
                    "enumeration is not closed under the group action; "
                    "it must be complete and unconstrained")
            members.add(member)
        seen.update(members)
        rep = min(members)
        classes.append(KolamType(
            label=type_label(enumeration[index_of[rep]][0]),
            multiplicity=len(members),
            representative=rep,
            members=tuple(sorted(members))))

    assert sum(c.multiplicity for c in classes) == len(strings)
    expected = burnside_class_count(parent, group, len(BOND_ORDER))
    if len(classes) != expected:
        raise AssertionError(
            f"class count {len(classes)} disagrees with the cycle-count "
            f"average {expected}")
    return classes


# ---------------------------------------------------------------------------
# census rows (shared by CLI and service)

def census_rows(parent: ParentKolam,
                constraints: EnumerationConstraints | None = None,
                *, validate_mode: str = "geometric",
                style: Style = DEFAULT_STYLE,
                start: int = 0, limit: int | None = None) -> Iterator[dict]:
    for assignment, kolam in enumerate_assignments(
            parent, constraints, validate_mode=validate_mode, style=style,
            start=start, limit=limit):
        r = kolam.report
        yield {
            "assignment": assignment.to_string(),
            "orbit_count": kolam.orbit_count,
            "crossing_count": kolam.crossing_count,
            "type": type_label(assignment),
            "m1": r.m1_pass,
            "m2": r.m2_pass,
            "m3": r.m3_pass,
        }
