"""Pytest fixtures; the shared provider fakes live in fakes.py."""

import pytest


@pytest.fixture
def kindof_table_text() -> str:
    return (
        "[HYPONYM]\t<is a kind of>\t[HYPERNYM]\n"
        "a bird\tis\tan animal\n"
        "a seed\tis a kind of\tfood for birds\n"
    )
