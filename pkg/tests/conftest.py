from __future__ import annotations

import pathlib

import pytest

from bpabis.consistency import CONSISTENT
from bpabis.grammar import parse_system
from bpabis.search import certify, propose_base

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(name: str):
    return parse_system((DATA / name).read_text())


@pytest.fixture(scope="session")
def example1():
    return load("example1.bpa")


@pytest.fixture(scope="session")
def xy_norm():
    return load("xy_norm.bpa")


@pytest.fixture(scope="session")
def aprime():
    return load("aprime.bpa")


@pytest.fixture(scope="session")
def inflate():
    return load("inflate.bpa")


@pytest.fixture(scope="session")
def irregular():
    return load("irregular.bpa")


@pytest.fixture(scope="session")
def example1_base(example1):
    """The certified intended base of the running system."""
    result = propose_base(example1)
    assert result.complete, result.notes
    report, problems = certify(example1, result.prebase)
    assert not problems and report.status == CONSISTENT
    return result.prebase
