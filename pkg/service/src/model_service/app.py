"""HTTP layer: one multiplexed service for the four provider protocols.

POST /embed    {"texts": [str, ...]}                        -> {"vectors": [[float, ...], ...]}
POST /generate {"hypothesis", "template", "forced_premise",
                "num_samples", "nucleus_p"}                 -> {"candidates": [{"f1","f2"}, ...]}
POST /entail   {"mode", "items": [{"premises","hypothesis"}]} -> {"scores": [float, ...]}
POST /qa2d     {"question", "answer"}                       -> {"hypothesis": str}

Malformed requests get a 400 with {"error": ...}; unexpected backend
failures get a 500 with the same shape. Handling is stateless, so
concurrent requests need no coordination.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .backends import ONE_PREMISE, TWO_PREMISE, ServiceConfig, make_backend


class SchemaError(ValueError):
    """Request does not match the endpoint's schema."""


def _require(doc: dict, key: str, kind, allow_none: bool = False):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    value = doc[key]
    if value is None and allow_none:
        return None
    if not isinstance(value, kind):
        raise SchemaError(f"field {key!r} has wrong type")
    return value


def handle_embed(backend, doc: dict) -> dict:
    texts = _require(doc, "texts", list)
    if not all(isinstance(t, str) for t in texts):
        raise SchemaError("texts must all be strings")
    return {"vectors": backend.embed(texts)}


def handle_generate(backend, doc: dict) -> dict:
    hypothesis = _require(doc, "hypothesis", str)
    template = _require(doc, "template", str)
    forced = _require(doc, "forced_premise", str, allow_none=True)
    num_samples = _require(doc, "num_samples", int)
    if isinstance(num_samples, bool) or num_samples < 0:
        raise SchemaError("num_samples must be a non-negative integer")
    nucleus_p = _require(doc, "nucleus_p", (int, float))
    if not 0.0 < float(nucleus_p) <= 1.0:
        raise SchemaError("nucleus_p must be in (0, 1]")
    candidates = backend.generate(hypothesis, template, forced, num_samples, float(nucleus_p))
    return {"candidates": candidates}


def handle_entail(backend, doc: dict) -> dict:
    mode = _require(doc, "mode", str)
    if mode not in (ONE_PREMISE, TWO_PREMISE):
        raise SchemaError(f"mode must be {ONE_PREMISE!r} or {TWO_PREMISE!r}")
    items = _require(doc, "items", list)
    arity = 1 if mode == ONE_PREMISE else 2
    cleaned = []
    for item in items:
        if not isinstance(item, dict):
            raise SchemaError("items must be objects")
        premises = _require(item, "premises", list)
        hypothesis = _require(item, "hypothesis", str)
        if len(premises) != arity or not all(isinstance(p, str) for p in premises):
            raise SchemaError(f"{mode} items need exactly {arity} string premise(s)")
        cleaned.append({"premises": premises, "hypothesis": hypothesis})
    return {"scores": backend.entail(mode, cleaned)}


def handle_qa2d(backend, doc: dict) -> dict:
    question = _require(doc, "question", str)
    answer = _require(doc, "answer", str)
    return {"hypothesis": backend.qa2d(question, answer)}


ROUTES = {
    "/embed": handle_embed,
    "/generate": handle_generate,
    "/entail": handle_entail,
    "/qa2d": handle_qa2d,
}


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        handler = ROUTES.get(self.path.rstrip("/") or self.path)
        if handler is None:
            self._reply(404, {"error": f"unknown endpoint {self.path!r}"})
            return
        try:
            length = int(self.headers.get("Content-Length") or 0)
            doc = json.loads(self.rfile.read(length).decode("utf-8"))
            if not isinstance(doc, dict):
                raise SchemaError("request body must be a JSON object")
        except (ValueError, UnicodeDecodeError):
            self._reply(400, {"error": "request body is not valid JSON"})
            return
        try:
            response = handler(self.server.backend, doc)
        except SchemaError as exc:
            self._reply(400, {"error": str(exc)})
            return
        except Exception as exc:  # backend failure
            self._reply(500, {"error": f"{type(exc).__name__}: {exc}"})
            return
        self._reply(200, response)

    def _reply(self, status: int, doc: dict):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        pass  # keep test output quiet


class ServiceServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.backend = make_backend(config)
        super().__init__((config.host, config.port), _Handler)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"


def serve(config: ServiceConfig) -> ServiceServer:
    """Bind and return the server; caller runs serve_forever()."""
    return ServiceServer(config)
