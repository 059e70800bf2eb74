"""Wire formats: JSON schemas, census CSV, deterministic serialization.

All emitters build dictionaries in a fixed key order and dump them with a
fixed separator convention, so identical inputs give byte-identical output
no matter which entry point produced them.
"""
from __future__ import annotations

import io
import json

from .diagram import BondAssignment, ValidationReport
from .errors import AssignmentError, InvalidDotSetError, KolamError, PolicyError
from .geometry import Dot, DotSet, JunctionPolicy, JunctionSet
from .parent import ParentKolam
from .render import KolamDocument, Style

ENGINE_VERSION = "0.1.0"

SCHEMA_DOC = "kolam-doc/1"
SCHEMA_JUNCTIONS = "junction-set/1"
SCHEMA_CENSUS = "census-page/1"
SCHEMA_ERROR = "error/1"
SCHEMA_HEALTH = "health/1"


def dumps(payload: dict) -> str:
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=True,
                      allow_nan=False)


def dumps_bytes(payload: dict) -> bytes:
    return dumps(payload).encode("ascii")


# ---------------------------------------------------------------------------
# dots / policy

def dots_to_json(dots: DotSet) -> dict:
    return {"dots": [{"id": d.id, "x": d.x, "y": d.y} for d in dots]}


def dots_from_json(data) -> DotSet:
    if not isinstance(data, dict) or "dots" not in data:
        raise InvalidDotSetError('expected an object with a "dots" array',
                                 code="missing-field")
    raw = data["dots"]
    if not isinstance(raw, list):
        raise InvalidDotSetError('"dots" must be an array', code="bad-type")
    dots = []
    for item in raw:
        if not isinstance(item, dict):
            raise InvalidDotSetError("each dot must be an object", code="bad-type")
        try:
            dots.append(Dot(int(item["id"]), float(item["x"]), float(item["y"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDotSetError(f"bad dot entry: {exc}", code="bad-type")
    return DotSet(dots)


def policy_to_json(policy: JunctionPolicy) -> dict:
    out = {"mode": policy.mode}
    if policy.mode == "cutoff":
        out["cutoff_distance"] = policy.cutoff_distance
    out["junctions_per_pair"] = policy.junctions_per_pair
    return out


def policy_from_json(data) -> JunctionPolicy:
    if data is None:
        return JunctionPolicy()
    if not isinstance(data, dict):
        raise PolicyError("policy must be an object", code="bad-type")
    mode = data.get("mode", "all-pairs")
    if mode == "nn":
        mode = "nearest-neighbor"
    cutoff = data.get("cutoff_distance")
    j = data.get("junctions_per_pair", 1)
    try:
        cutoff = None if cutoff is None else float(cutoff)
        j = int(j)
    except (TypeError, ValueError):
        raise PolicyError("bad policy field types", code="bad-type")
    return JunctionPolicy(mode=mode, cutoff_distance=cutoff, junctions_per_pair=j)


def assignment_from_json(data, junction_count: int) -> BondAssignment:
    if isinstance(data, str):
        return BondAssignment.from_string(data, junction_count)
    if isinstance(data, dict) and "bonds" in data and isinstance(data["bonds"], dict):
        return BondAssignment.from_mapping(data["bonds"], junction_count)
    raise AssignmentError(
        'assignment must be a letter string or {"bonds": {id: letter}}',
        code="bad-type")


# ---------------------------------------------------------------------------
# junctions / parent

def junctions_to_json(junctions: JunctionSet) -> dict:
    return {
        "schema": SCHEMA_JUNCTIONS,
        "engine_version": ENGINE_VERSION,
        "policy": policy_to_json(junctions.policy),
        "junctions": [{
            "id": j.id,
            "pair": [j.a, j.b],
            "slot": j.slot,
            "position": [j.position[0], j.position[1]],
            "nominal": [j.nominal[0], j.nominal[1]],
            "displaced": j.displaced,
            "ends": [{
                "end_id": e.end_id,
                "dot": e.dot_id,
                "side": e.side,
                "position": [e.x, e.y],
            } for e in j.ends],
        } for j in junctions],
    }


def parent_to_json(parent: ParentKolam) -> dict:
    return {
        "schema": "parent/1",
        "engine_version": ENGINE_VERSION,
        "dots": dots_to_json(parent.dots)["dots"],
        "junctions": junctions_to_json(parent.junctions)["junctions"],
        "rotations": [
            {"dot": d.id, "ends": list(parent.rotations[d.id])}
            for d in parent.dots
        ],
        "arcs": [
            {"id": a.id, "dot": a.dot, "src": a.src, "dst": a.dst}
            for a in parent.arcs
        ],
    }


# ---------------------------------------------------------------------------
# documents

def document_to_json(doc: KolamDocument) -> dict:
    return {
        "schema": SCHEMA_DOC,
        "engine_version": ENGINE_VERSION,
        "dots": [{"id": i, "x": x, "y": y} for i, x, y in doc.dots],
        "junctions": doc.junction_meta,
        "curves": [{
            "orbit": c.orbit_index,
            "crossing_junctions": list(c.crossing_junctions),
            "windings": {str(k): round(v) for k, v in w.items()},
            "points": [[float(p[0]), float(p[1])] for p in c.points],
        } for c, w in zip(doc.curves, doc.curve_windings)],
        "validation": doc.validation.to_json(),
        "unit": doc.unit,
        "notes": list(doc.notes),
        "edits": list(doc.edits),
        "provenance": {
            "dots": [{"id": i, "x": x, "y": y}
                     for i, x, y in (doc.original_dots or doc.dots)],
            "policy": policy_to_json(doc.policy),
            "assignment": doc.assignment,
            "seed": doc.seed,
            "style": doc.style.to_json(),
            "smooth_iterations": doc.smooth_iterations,
            "engine_version": ENGINE_VERSION,
        },
    }


def document_from_json(data: dict) -> KolamDocument:
    import numpy as np

    from .render import Curve

    if data.get("schema") != SCHEMA_DOC:
        raise KolamError(f"unsupported document schema {data.get('schema')!r}",
                         code="bad-schema")
    prov = data["provenance"]
    curves = []
    windings = []
    for c in data["curves"]:
        curves.append(Curve(int(c["orbit"]),
                            np.array(c["points"], dtype=float),
                            tuple(c["crossing_junctions"])))
        windings.append({int(k): float(v) for k, v in c["windings"].items()})
    v = data["validation"]
    report = ValidationReport(bool(v["m1_pass"]), bool(v["m2_pass"]),
                              bool(v["m3_pass"]), int(v["orbit_count"]),
                              int(v["crossing_count"]))
    return KolamDocument(
        dots=[(int(d["id"]), float(d["x"]), float(d["y"])) for d in data["dots"]],
        policy=policy_from_json(prov["policy"]),
        assignment=prov["assignment"],
        style=Style.from_json(prov["style"]),
        smooth_iterations=int(prov["smooth_iterations"]),
        seed=prov.get("seed"),
        unit=float(data["unit"]),
        curves=curves,
        curve_windings=windings,
        junction_meta=data["junctions"],
        validation=report,
        notes=list(data.get("notes", [])),
        edits=list(data.get("edits", [])),
        original_dots=[(int(d["id"]), float(d["x"]), float(d["y"]))
                       for d in prov["dots"]],
    )


def document_bytes(doc: KolamDocument) -> bytes:
    return dumps_bytes(document_to_json(doc))


# ---------------------------------------------------------------------------
# census

CENSUS_COLUMNS = ("assignment", "orbit_count", "crossing_count", "type",
                  "m1", "m2", "m3")


def census_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CENSUS_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join([
            row["assignment"],
            str(row["orbit_count"]),
            str(row["crossing_count"]),
            row["type"],
            "1" if row["m1"] else "0",
            "1" if row["m2"] else "0",
            "1" if row["m3"] else "0",
        ]) + "\n")
    return buf.getvalue()


def census_page(rows: list[dict], *, total: int, cursor: int,
                g: int | None = None, provenance: dict | None = None) -> dict:
    next_cursor = cursor + len(rows)
    page = {
        "schema": SCHEMA_CENSUS,
        "engine_version": ENGINE_VERSION,
        "total": str(total),
        "cursor": cursor,
        "next_cursor": next_cursor if next_cursor < total else None,
        "rows": rows,
    }
    if g is not None:
        page["g"] = g
    if provenance is not None:
        page["provenance"] = provenance
    return page


def error_payload(code: str, message: str) -> dict:
    return {
        "schema": SCHEMA_ERROR,
        "engine_version": ENGINE_VERSION,
        "code": code,
        "message": message,
    }
