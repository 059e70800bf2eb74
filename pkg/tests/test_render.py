import math

import numpy as np
import pytest

from kolam.diagram import BondAssignment, resolve, trace_orbits
from kolam.errors import EditError, StyleError, TopologyRiskError
from kolam.geometry import DotSet, JunctionPolicy, build_junctions
from kolam.parent import build_parent
from kolam.render import (
    Curve,
    Realizer,
    Style,
    audit_polylines,
    chaikin_closed,
    edit_dots,
    emit_svg,
    generate_document,
    polyline_winding,
    smooth,
    smooth_curves,
)
from oracles import count_intersections, winding_number


def _realized(dots, letters, policy=None):
    policy = policy or JunctionPolicy()
    junctions = build_junctions(dots, policy)
    parent = build_parent(dots, junctions)
    d = resolve(parent, BondAssignment.from_string(letters, len(junctions)))
    orbits = trace_orbits(d)
    r = Realizer(parent)
    return r, d, orbits, r.realize(d, orbits)


class TestRealize:
    def test_single_dot_is_a_circle(self):
        ds = DotSet.from_coords([(0.0, 0.0)])
        r, d, orbits, curves = _realized(ds, "")
        assert len(curves) == 1
        radii = np.hypot(curves[0].points[:, 0], curves[0].points[:, 1])
        assert np.allclose(radii, radii[0])
        assert abs(polyline_winding(curves[0].points, (0, 0))) == \
            pytest.approx(1.0, abs=1e-9)

    def test_two_dot_cross_one_self_intersection(self, two_dots):
        r, d, orbits, curves = _realized(two_dots, "X")
        assert len(curves) == 1
        # engine audit and brute-force both see exactly one crossing
        assert audit_polylines([c.points for c in curves], r.tol, r.joints)[0] == 1
        assert count_intersections([c.points.tolist() for c in curves]) == 1

    def test_two_dot_broken_disjoint_simple_loops(self, two_dots):
        r, d, orbits, curves = _realized(two_dots, "B")
        assert len(curves) == 2
        assert audit_polylines([c.points for c in curves], r.tol, r.joints) == \
            (0, False, False)
        # ray-cast winding oracle: each loop contains its own dot only
        w00 = winding_number(curves[0].points.tolist(), (0.0, 0.0))
        w01 = winding_number(curves[0].points.tolist(), (2.0, 0.0))
        assert {abs(w00), abs(w01)} == {1, 0}

    def test_windings_match_ray_cast_oracle(self, triangle3):
        r, d, orbits, curves = _realized(triangle3, "DDX")
        for c in curves:
            for dot in triangle3:
                engine = round(polyline_winding(c.points, dot.pos))
                oracle = winding_number(c.points.tolist(), dot.pos)
                assert engine == oracle

    def test_loop_radius_too_large_raises(self, two_dots):
        junctions = build_junctions(two_dots, JunctionPolicy())
        parent = build_parent(two_dots, junctions)
        with pytest.raises(StyleError):
            Realizer(parent, Style(loop_ratio=0.52))

    def test_cached_and_polyline_audits_agree(self, line3):
        from itertools import product
        junctions = build_junctions(line3, JunctionPolicy())
        parent = build_parent(line3, junctions)
        r = Realizer(parent)
        for letters in product("BDX", repeat=3):
            d = resolve(parent, BondAssignment.from_string("".join(letters), 3))
            orbits = trace_orbits(d)
            cached = r.realization_for(d, orbits).audit()
            curves = r.realize(d, orbits)
            poly = audit_polylines([c.points for c in curves], r.tol, r.joints)
            assert cached[0] == poly[0] == "".join(letters).count("X")
            assert not cached[1] and not poly[1]


class TestSmooth:
    def test_zero_iterations_identity(self, two_dots):
        r, d, orbits, curves = _realized(two_dots, "X")
        out = smooth(curves[0], 0)
        assert out is curves[0]

    def test_square_polyline_stays_simple(self):
        square = Curve(0, np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float))
        out = smooth(square, 3)
        assert audit_polylines([out.points], 1e-9) == (0, False, False)
        assert len(out.points) == 4 * 8

    def test_cross_keeps_crossing(self, two_dots):
        r, d, orbits, curves = _realized(two_dots, "X")
        out = smooth(curves[0], 3, tol=r.tol)
        assert audit_polylines([out.points], r.tol)[0] == 1

    def test_monotone_contraction(self):
        square = Curve(0, np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float))
        pts = square.points
        prev_move = None
        for _ in range(5):
            nxt = chaikin_closed(pts, 1)
            # each new point lies on an old edge; measure the maximum hop
            move = max(
                float(np.linalg.norm(nxt[2 * i] - pts[i]))
                for i in range(len(pts)))
            if prev_move is not None:
                assert move < prev_move
            prev_move = move
            pts = nxt

    def test_topology_risk_detected(self):
        # a spiked loop whose spike pinches through the opposite side after
        # aggressive smoothing is rejected rather than silently changed
        outer = [[0, 0], [4, 0], [4, 4], [2.2, 4], [2.0, -3.0], [1.8, 4], [0, 4]]
        spiky = Curve(0, np.array(outer, float))
        before = audit_polylines([spiky.points], 1e-9)
        out = chaikin_closed(spiky.points, 2)
        after = audit_polylines([out], 1e-9)
        if after[0] != before[0]:
            with pytest.raises(TopologyRiskError):
                smooth(spiky, 2, tol=1e-9)
        else:
            smooth(spiky, 2, tol=1e-9)

    def test_smooth_curves_set_audit(self, triangle3):
        r, d, orbits, curves = _realized(triangle3, "XXX")
        out = smooth_curves(curves, 3, r.tol)
        assert len(out) == len(curves)
        assert audit_polylines([c.points for c in out], r.tol)[0] == 3


class TestDocuments:
    def test_document_validation(self, triangle3):
        doc = generate_document(triangle3, JunctionPolicy(),
                                BondAssignment.from_string("XXX", 3))
        v = doc.validation
        assert v.all_pass
        assert v.crossing_count == 3

    def test_regeneration_is_bit_identical(self, square4):
        from kolam.wire import document_bytes
        a = BondAssignment.from_string("BDXDBX", 6)
        d1 = generate_document(square4, JunctionPolicy(), a)
        d2 = generate_document(square4, JunctionPolicy(), a)
        assert document_bytes(d1) == document_bytes(d2)


class TestSvg:
    def test_single_dot_svg(self):
        ds = DotSet.from_coords([(0.0, 0.0)])
        doc = generate_document(ds, JunctionPolicy(),
                                BondAssignment.from_string("", 0))
        svg = emit_svg(doc)
        assert svg.count("<path") == 1
        assert svg.count("<circle") == 1
        assert "viewBox" in svg

    def test_triangle_all_broken_three_paths(self, triangle3):
        doc = generate_document(triangle3, JunctionPolicy(),
                                BondAssignment.from_string("BBB", 3))
        svg = emit_svg(doc)
        assert svg.count("<path") == 3
        assert svg.count("<circle") == 3

    def test_byte_identical_across_runs(self, two_dots):
        a = BondAssignment.from_string("D", 1)
        s1 = emit_svg(generate_document(two_dots, JunctionPolicy(), a))
        s2 = emit_svg(generate_document(two_dots, JunctionPolicy(), a))
        assert s1 == s2

    def test_fixed_precision(self, two_dots):
        doc = generate_document(two_dots, JunctionPolicy(),
                                BondAssignment.from_string("D", 1))
        svg = emit_svg(doc)
        import re
        for num in re.findall(r'cx="([-\d.]+)"', svg):
            assert len(num.split(".")[1]) == 6


class TestEditDots:
    def _tri_center_doc(self, tri_center4):
        # Broken outer edges, crossed spokes: petals with a center weave
        return generate_document(tri_center4, JunctionPolicy(),
                                 BondAssignment.from_string("BBXBXX", 6))

    def test_remove_center_dot_keeps_kolam(self, tri_center4):
        doc = self._tri_center_doc(tri_center4)
        out = edit_dots(doc, [{"op": "remove", "id": 3}])
        assert len(out.dots) == 3
        assert out.validation.m1_pass
        assert all((a.points == b.points).all()
                   for a, b in zip(doc.curves, out.curves))
        assert out.edits == [{"op": "remove", "id": 3}]

    def test_add_dot_inside_lobe(self, two_dots):
        doc = generate_document(two_dots, JunctionPolicy(),
                                BondAssignment.from_string("D", 1))
        # the single oval orbit winds everything between the dots
        out = edit_dots(doc, [{"op": "add", "x": 1.0, "y": 0.0}])
        assert len(out.dots) == 3
        assert out.validation.m1_pass

    def test_add_dot_outside_rejected_strict(self, two_dots):
        doc = generate_document(two_dots, JunctionPolicy(),
                                BondAssignment.from_string("D", 1))
        with pytest.raises(EditError):
            edit_dots(doc, [{"op": "add", "x": 10.0, "y": 10.0}], strict=True)
        out = edit_dots(doc, [{"op": "add", "x": 10.0, "y": 10.0}], strict=False)
        assert not out.validation.m1_pass

    def test_move_by_zero_identity(self, two_dots):
        doc = generate_document(two_dots, JunctionPolicy(),
                                BondAssignment.from_string("D", 1))
        out = edit_dots(doc, [{"op": "move", "id": 0, "x": 0.0, "y": 0.0}])
        assert out.dots == doc.dots
        assert out.validation.to_json() == doc.validation.to_json()

    def test_dot_on_curve_rejected(self, two_dots):
        doc = generate_document(two_dots, JunctionPolicy(),
                                BondAssignment.from_string("D", 1))
        # any curve sample point sits exactly on the curve
        px, py = (float(doc.curves[0].points[0][0]),
                  float(doc.curves[0].points[0][1]))
        with pytest.raises(EditError):
            edit_dots(doc, [{"op": "add", "x": px, "y": py}])

    def test_remove_last_dot_strict(self):
        ds = DotSet.from_coords([(0.0, 0.0)])
        doc = generate_document(ds, JunctionPolicy(),
                                BondAssignment.from_string("", 0))
        with pytest.raises(EditError):
            edit_dots(doc, [{"op": "remove", "id": 0}], strict=True)
