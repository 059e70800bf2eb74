"""Generative engine for pulli kolams: dot-loop drawings built from closed
loops around dots, joined pairwise at junctions by Broken, Double, or Cross
bonds, traced into closed orbits, counted, and rendered to SVG."""

from .diagram import (
    BondAssignment,
    BondType,
    Kolam,
    Orbit,
    StrandDiagram,
    ValidationReport,
    parse_bond,
    resolve,
    trace_orbits,
    validate,
)
from .enumeration import (
    EnumerationConstraints,
    KolamType,
    burnside_class_count,
    classify_types,
    count_kolams,
    count_symmetric,
    enumerate_assignments,
    enumeration_size,
    type_label,
)
from .errors import KolamError
from .geometry import (
    Dot,
    DotSet,
    Junction,
    JunctionPolicy,
    JunctionSet,
    OrbitPartition,
    PointGroup,
    build_junctions,
    detect_point_group,
    junction_orbits,
)
from .parent import ParentKolam, build_parent, parent_signature
from .render import (
    Curve,
    KolamDocument,
    Realizer,
    Style,
    build_kolam,
    edit_dots,
    emit_svg,
    generate_document,
    smooth,
    smooth_curves,
)

__version__ = "0.1.0"
