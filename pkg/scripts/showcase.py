#!/usr/bin/env python3
"""Build two larger kolams and write their SVGs.

* a 25-dot diamond grid (|i| + |j| <= 3 lattice) woven with all Cross
  bonds between nearest neighbors, the classic look,
* a 5-dot quincunx (center plus four arms) with alternating bonds.

Both only assert the three mandatory rules and that SVG emission works;
no golden image is kept.
"""
from __future__ import annotations

import sys
from pathlib import Path

from kolam.diagram import BondAssignment
from kolam.geometry import DotSet, JunctionPolicy, build_junctions
from kolam.render import emit_svg, generate_document


def diamond_grid_25() -> DotSet:
    coords = [(float(i), float(j))
              for j in range(-3, 4) for i in range(-3, 4)
              if abs(i) + abs(j) <= 3]
    assert len(coords) == 25
    return DotSet.from_coords(coords)


def quincunx_5() -> DotSet:
    return DotSet.from_coords(
        [(-1.0, 0.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)])


def build(out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    grid = diamond_grid_25()
    policy = JunctionPolicy(mode="nearest-neighbor")
    junction_count = len(build_junctions(grid, policy))
    doc = generate_document(
        grid, policy,
        BondAssignment.from_string("X" * junction_count, junction_count))
    if not doc.validation.all_pass:
        raise SystemExit(f"diamond grid failed validation: {doc.validation}")
    path = out_dir / "diamond25.svg"
    path.write_text(emit_svg(doc))
    written.append(path)

    quin = quincunx_5()
    policy = JunctionPolicy(mode="nearest-neighbor")
    junction_count = len(build_junctions(quin, policy))
    assert junction_count == 4
    doc = generate_document(quin, policy,
                            BondAssignment.from_string("XDXD", 4))
    if not doc.validation.all_pass:
        raise SystemExit(f"quincunx failed validation: {doc.validation}")
    path = out_dir / "quincunx5.svg"
    path.write_text(emit_svg(doc))
    written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    for p in build(target):
        print(f"wrote {p}")
