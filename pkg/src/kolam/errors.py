"""Exception types shared across the engine.

Every error carries a short machine-readable ``code`` used verbatim by the
JSON service and the CLI.
"""
from __future__ import annotations


class KolamError(Exception):
    code = "kolam-error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class InvalidDotSetError(KolamError):
    code = "invalid-dot-set"


class CoincidentDotsError(InvalidDotSetError):
    code = "coincident-dots"


class PolicyError(KolamError):
    code = "bad-policy"


class IsolatedDotError(KolamError):
    """A dot ends up with no junction under the active policy."""

    code = "isolated-dot"


class DegenerateGeometryError(KolamError):
    """Strand ends could not be angularly ordered around a dot."""

    code = "degenerate-geometry"


class GroupActionError(KolamError):
    """A symmetry element does not act on the junction set."""

    code = "group-action"


class UnknownBondError(KolamError):
    code = "unknown-bond"


class UnimplementedBondError(KolamError):
    """Reserved bond names (two-level crossings etc.) parse but are rejected."""

    code = "unimplemented-bond"


class AssignmentError(KolamError):
    code = "bad-assignment"


class RealizationRequiredError(KolamError):
    code = "realization-required"


class StyleError(KolamError):
    code = "bad-style"


class TopologyRiskError(KolamError):
    """Smoothing would change crossings or merge separate strands."""

    code = "topology-risk"


class EditError(KolamError):
    code = "bad-edit"
