"""One HTTP service for the four model provider protocols
(embed, generate, entail, qa2d) with deterministic stub and
real-model backends."""

from .app import ServiceServer, serve
from .backends import REAL, STUB, ServiceConfig, StubBackend

__version__ = "0.1.0"

__all__ = ["REAL", "STUB", "ServiceConfig", "ServiceServer", "StubBackend", "serve"]
