"""Pytest fixtures; the HTTP client helpers live in service_runner.py."""

import pytest

from service_runner import start_service


@pytest.fixture
def service():
    running = start_service(seed=0)
    yield running
    running.stop()
