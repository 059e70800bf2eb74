"""Command-line interface: generate one kolam, enumerate a census, serve HTTP."""
from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from . import wire
from .diagram import BondAssignment
from .enumeration import (
    EnumerationConstraints,
    census_rows,
    enumeration_size,
    type_label,
)
from .errors import KolamError
from .geometry import JunctionPolicy, build_junctions, detect_point_group, junction_orbits
from .parent import build_parent
from .render import generate_document, emit_svg
from .wire import ENGINE_VERSION


def _load_dots(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read dots file {path}: {exc}")
    return wire.dots_from_json(data)


def _parse_policy(policy: str, j: int) -> JunctionPolicy:
    if policy in ("all-pairs", "all"):
        return JunctionPolicy(junctions_per_pair=j)
    if policy in ("nn", "nearest-neighbor"):
        return JunctionPolicy(mode="nearest-neighbor", junctions_per_pair=j)
    if policy.startswith("cutoff="):
        return JunctionPolicy(mode="cutoff", cutoff_distance=float(policy[7:]),
                              junctions_per_pair=j)
    raise click.ClickException(
        f"unknown policy {policy!r}; use all-pairs, nn, or cutoff=<d>")


@click.group()
@click.version_option(ENGINE_VERSION, prog_name="kolam")
def main():
    """Pulli kolam engine: construct, enumerate, render, serve."""


@main.command()
@click.option("--dots", "dots_path", required=True, type=click.Path(exists=True),
              help="JSON file with the dot configuration.")
@click.option("--policy", default="all-pairs", show_default=True,
              help="Junction policy: all-pairs | nn | cutoff=<d>.")
@click.option("--j", "junctions_per_pair", default=1, show_default=True,
              help="Junctions per active pair.")
@click.option("--assignment", "assignment_str", default=None,
              help="Bond letters (B/D/X), one per junction in id order.")
@click.option("--random", "randomize", is_flag=True,
              help="Pick a random assignment instead (see --seed).")
@click.option("--seed", default=0, show_default=True,
              help="Seed for --random; recorded in the document provenance.")
@click.option("--smooth", "smooth_iterations", default=3, show_default=True,
              help="Corner-cutting iterations applied to the curves.")
@click.option("--svg", "svg_path", type=click.Path(), default=None,
              help="Write the rendered SVG here.")
@click.option("--doc", "doc_path", type=click.Path(), default=None,
              help="Write the kolam document JSON here.")
def generate(dots_path, policy, junctions_per_pair, assignment_str, randomize,
             seed, smooth_iterations, svg_path, doc_path):
    """Build one kolam from dots, a junction policy, and a bond assignment."""
    dots = _load_dots(dots_path)
    pol = _parse_policy(policy, junctions_per_pair)
    try:
        junctions = build_junctions(dots, pol)
        m = len(junctions)
        if randomize:
            rng = random.Random(seed)
            assignment_str = "".join("BDX"[rng.randrange(3)] for _ in range(m))
            used_seed = seed
        else:
            if assignment_str is None:
                raise click.ClickException(
                    "provide --assignment or --random")
            used_seed = None
        assignment = BondAssignment.from_string(assignment_str, m)
        doc = generate_document(dots, pol, assignment,
                                smooth_iterations=smooth_iterations,
                                seed=used_seed)
    except KolamError as exc:
        raise click.ClickException(f"[{exc.code}] {exc}")
    v = doc.validation
    click.echo(
        f"assignment={assignment_str} orbits={v.orbit_count} "
        f"crossings={v.crossing_count} "
        f"m1={'pass' if v.m1_pass else 'FAIL'} "
        f"m2={'pass' if v.m2_pass else 'FAIL'} "
        f"m3={'pass' if v.m3_pass else 'FAIL'}")
    if doc_path:
        Path(doc_path).write_bytes(wire.document_bytes(doc))
        click.echo(f"document -> {doc_path}")
    if svg_path:
        Path(svg_path).write_text(emit_svg(doc))
        click.echo(f"svg -> {svg_path}")


@main.command(name="enumerate")
@click.option("--dots", "dots_path", required=True, type=click.Path(exists=True))
@click.option("--policy", default="all-pairs", show_default=True)
@click.option("--j", "junctions_per_pair", default=1, show_default=True)
@click.option("--symmetric", is_flag=True,
              help="One bond per junction symmetry class (point group of the dots).")
@click.option("--census", "census_path", type=click.Path(), default=None,
              help="Write the full census CSV here (plus a provenance sidecar).")
@click.option("--validate", "validate_mode", default="geometric",
              type=click.Choice(["geometric", "combinatorial"]), show_default=True)
def enumerate_cmd(dots_path, policy, junctions_per_pair, symmetric, census_path,
                  validate_mode):
    """Count and optionally list every kolam of a dot configuration."""
    dots = _load_dots(dots_path)
    pol = _parse_policy(policy, junctions_per_pair)
    try:
        junctions = build_junctions(dots, pol)
        parent = build_parent(dots, junctions)
        constraints = EnumerationConstraints()
        g = None
        if symmetric:
            group = detect_point_group(dots)
            constraints = EnumerationConstraints(symmetric_under=group)
            g = junction_orbits(junctions, group).g
        total = enumeration_size(parent, constraints)
        if census_path:
            rows = list(census_rows(parent, constraints,
                                    validate_mode=validate_mode))
            Path(census_path).write_text(wire.census_csv(rows))
            provenance = {
                "schema": "census-provenance/1",
                "engine_version": ENGINE_VERSION,
                "dots": wire.dots_to_json(dots)["dots"],
                "policy": wire.policy_to_json(pol),
                "symmetric": symmetric,
                "validate": validate_mode,
                "total": str(total),
            }
            if g is not None:
                provenance["g"] = g
            Path(str(census_path) + ".provenance.json").write_text(
                wire.dumps(provenance) + "\n")
    except KolamError as exc:
        raise click.ClickException(f"[{exc.code}] {exc}")
    if g is not None:
        click.echo(f"K={total}, g={g}")
    else:
        click.echo(f"K={total}")
    if census_path:
        click.echo(f"census -> {census_path}")


@main.command()
@click.option("--port", default=8750, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", "static_dir", type=click.Path(exists=True),
              default=None, help="Serve this directory at / (designer UI).")
def serve(port, host, static_dir):
    """Run the JSON HTTP service (and optionally the designer UI)."""
    from .service import run_server

    click.echo(f"kolam engine {ENGINE_VERSION} listening on {host}:{port}")
    run_server(host=host, port=port, static_dir=static_dir)


if __name__ == "__main__":
    sys.exit(main())
