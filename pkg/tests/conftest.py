import os

import pytest

from soda.config import Config
from soda.engine import EngineSession
from soda.rdf import parse_ntriples

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(name: str) -> str:
    return os.path.abspath(os.path.join(FIXTURES, name))


@pytest.fixture(scope="session")
def qald_store():
    with open(fixture_path("micro-qald.nt"), "rb") as fh:
        return parse_ntriples(fh)


@pytest.fixture(scope="session")
def cordis_store():
    with open(fixture_path("micro-cordis.nt"), "rb") as fh:
        return parse_ntriples(fh)


@pytest.fixture(scope="session")
def qald_session():
    return EngineSession.build(fixture_path("micro-qald.nt"), Config())


@pytest.fixture(scope="session")
def cordis_session():
    return EngineSession.build(fixture_path("micro-cordis.nt"), Config())
