"""Stateless JSON HTTP service over the engine.

Every request carries its full inputs; responses are deterministic, so the
service and the CLI produce identical bytes for identical inputs.  Schema
violations return 400 with a machine-readable code; well-formed requests
with mathematically invalid content return 422.
"""
from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import wire
from .diagram import BondAssignment
from .enumeration import EnumerationConstraints, census_rows, enumeration_size
from .errors import (
    AssignmentError,
    CoincidentDotsError,
    DegenerateGeometryError,
    EditError,
    GroupActionError,
    InvalidDotSetError,
    IsolatedDotError,
    KolamError,
    PolicyError,
    StyleError,
    TopologyRiskError,
    UnimplementedBondError,
    UnknownBondError,
)
from .geometry import build_junctions, detect_point_group, junction_orbits
from .parent import build_parent
from .render import edit_dots, generate_document
from .wire import ENGINE_VERSION

PAGE_SIZE_DEFAULT = 64
PAGE_SIZE_MAX = 1024

_SCHEMA_ERROR_CODES = {"missing-field", "bad-type", "unknown-mode", "bad-schema"}


class _RequestError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _status_for(exc: KolamError) -> int:
    if exc.code in _SCHEMA_ERROR_CODES:
        return 400
    if isinstance(exc, (CoincidentDotsError, InvalidDotSetError, IsolatedDotError,
                        AssignmentError, UnknownBondError, UnimplementedBondError,
                        DegenerateGeometryError, EditError, StyleError,
                        TopologyRiskError, GroupActionError, PolicyError)):
        return 422
    return 422


def _field(body: dict, name: str, required: bool = True, default=None):
    if name not in body:
        if required:
            raise _RequestError(400, "missing-field", f"missing field {name!r}")
        return default
    return body[name]


def _handle_health(_body) -> dict:
    return {"schema": wire.SCHEMA_HEALTH, "engine_version": ENGINE_VERSION,
            "status": "ok"}


def _handle_junctions(body: dict) -> dict:
    dots = wire.dots_from_json({"dots": _field(body, "dots")})
    policy = wire.policy_from_json(_field(body, "policy", required=False))
    junctions = build_junctions(dots, policy)
    return wire.junctions_to_json(junctions)


def _handle_kolam(body: dict) -> dict:
    dots = wire.dots_from_json({"dots": _field(body, "dots")})
    policy = wire.policy_from_json(_field(body, "policy", required=False))
    junctions = build_junctions(dots, policy)
    assignment = wire.assignment_from_json(_field(body, "assignment"),
                                           len(junctions))
    smooth_iterations = _field(body, "smooth_iterations", required=False, default=3)
    if not isinstance(smooth_iterations, int) or smooth_iterations < 0:
        raise _RequestError(400, "bad-type", "smooth_iterations must be a "
                            "non-negative integer")
    doc = generate_document(dots, policy, assignment,
                            smooth_iterations=smooth_iterations)
    return wire.document_to_json(doc)


def _handle_enumerate(body: dict) -> dict:
    dots = wire.dots_from_json({"dots": _field(body, "dots")})
    policy = wire.policy_from_json(_field(body, "policy", required=False))
    symmetric = bool(_field(body, "symmetric", required=False, default=False))
    cursor = _field(body, "cursor", required=False, default=0)
    page_size = _field(body, "page_size", required=False, default=PAGE_SIZE_DEFAULT)
    validate_mode = _field(body, "validate", required=False, default="geometric")
    if not isinstance(cursor, int) or cursor < 0:
        raise _RequestError(400, "bad-type", "cursor must be a non-negative integer")
    if not isinstance(page_size, int) or page_size < 1:
        raise _RequestError(400, "bad-type", "page_size must be a positive integer")
    if validate_mode not in ("geometric", "combinatorial"):
        raise _RequestError(400, "bad-type",
                            "validate must be geometric or combinatorial")
    page_size = min(page_size, PAGE_SIZE_MAX)

    junctions = build_junctions(dots, policy)
    parent = build_parent(dots, junctions)
    constraints = EnumerationConstraints()
    g = None
    if symmetric:
        group = detect_point_group(dots)
        constraints = EnumerationConstraints(symmetric_under=group)
        g = junction_orbits(junctions, group).g
    total = enumeration_size(parent, constraints)
    rows = list(census_rows(parent, constraints, validate_mode=validate_mode,
                            start=cursor, limit=page_size))
    provenance = {
        "policy": wire.policy_to_json(policy),
        "symmetric": symmetric,
        "validate": validate_mode,
    }
    return wire.census_page(rows, total=total, cursor=cursor, g=g,
                            provenance=provenance)


def _handle_edit_dots(body: dict) -> dict:
    doc = wire.document_from_json(_field(body, "document"))
    edits = _field(body, "edits")
    if not isinstance(edits, list):
        raise _RequestError(400, "bad-type", "edits must be an array")
    strict = bool(_field(body, "strict", required=False, default=True))
    return wire.document_to_json(edit_dots(doc, edits, strict=strict))


_POST_ROUTES = {
    "/v1/junctions": _handle_junctions,
    "/v1/kolam": _handle_kolam,
    "/v1/enumerate": _handle_enumerate,
    "/v1/edit-dots": _handle_edit_dots,
}


def handle_api(method: str, path: str, body: bytes) -> tuple[int, bytes]:
    """Pure request handler: (status, response bytes). Shared with tests."""
    try:
        if method == "GET" and path == "/v1/health":
            return 200, wire.dumps_bytes(_handle_health(None))
        if method == "POST" and path in _POST_ROUTES:
            try:
                parsed = json.loads(body.decode("utf-8")) if body else {}
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise _RequestError(400, "bad-json", f"request body is not JSON: {exc}")
            if not isinstance(parsed, dict):
                raise _RequestError(400, "bad-type", "request body must be an object")
            return 200, wire.dumps_bytes(_POST_ROUTES[path](parsed))
        return 404, wire.dumps_bytes(
            wire.error_payload("not-found", f"no route {method} {path}"))
    except _RequestError as exc:
        return exc.status, wire.dumps_bytes(
            wire.error_payload(exc.code, str(exc)))
    except KolamError as exc:
        return _status_for(exc), wire.dumps_bytes(
            wire.error_payload(exc.code, str(exc)))


class KolamRequestHandler(BaseHTTPRequestHandler):
    server_version = f"kolam/{ENGINE_VERSION}"
    static_dir: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: bytes,
              content_type: str = "application/json"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        if self.path.startswith("/v1/"):
            status, payload = handle_api("GET", self.path, b"")
            self._send(status, payload)
            return
        if self.static_dir is not None:
            rel = self.path.lstrip("/") or "index.html"
            target = (self.static_dir / rel).resolve()
            if target.is_dir():
                target = target / "index.html"
            if str(target).startswith(str(self.static_dir.resolve())) \
                    and target.is_file():
                ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                self._send(200, target.read_bytes(), ctype)
                return
        status, payload = handle_api("GET", self.path, b"")
        self._send(status, payload)

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        status, payload = handle_api("POST", self.path, body)
        self._send(status, payload)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()


def make_server(host: str = "127.0.0.1", port: int = 0,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("Handler", (KolamRequestHandler,), {
        "static_dir": Path(static_dir) if static_dir else None})
    return ThreadingHTTPServer((host, port), handler)


def run_server(host: str = "127.0.0.1", port: int = 8750,
               static_dir: str | None = None):
    server = make_server(host, port, static_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def start_background(host: str = "127.0.0.1", port: int = 0,
                     static_dir: str | None = None):
    """Start a server thread; returns (server, base_url). Used by tests."""
    server = make_server(host, port, static_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, f"http://{server.server_address[0]}:{server.server_address[1]}"
