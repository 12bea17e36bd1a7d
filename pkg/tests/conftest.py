import os

import pytest

from src.config import Config
from src.services.algebra import IntMatrix
from src.services.diagram import parse_pd

CATALOG = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'data', 'catalog.jsonl'))

TREFOIL_PD = 'X[1,5,2,4];X[3,1,4,6];X[5,3,6,2]'
HOPF_PD = 'X[1,3,2,4];X[3,1,4,2]'
BORROMEAN_PD = 'X[6,1,7,2],X[12,8,9,7],X[4,12,1,11],X[10,5,11,6],X[8,4,5,3],X[2,9,3,10]'


@pytest.fixture(autouse=True)
def pinned_config(monkeypatch):
    """Run services single-process against the shipped catalog."""
    monkeypatch.setattr(Config, 'WORKERS', 1)
    monkeypatch.setattr(Config, 'CATALOG_PATH', CATALOG)
    yield


@pytest.fixture
def catalog_copy(tmp_path):
    """A writable copy of the shipped catalog."""
    target = tmp_path / 'catalog.jsonl'
    with open(CATALOG, encoding='utf-8') as source:
        target.write_text(source.read(), encoding='utf-8')
    return str(target)


@pytest.fixture
def trefoil_seifert():
    return IntMatrix.from_rows([[-1, 1], [0, -1]])


@pytest.fixture
def trefoil_pd():
    return parse_pd(TREFOIL_PD)


@pytest.fixture
def hopf_pd():
    return parse_pd(HOPF_PD)


@pytest.fixture
def borromean_pd():
    return parse_pd(BORROMEAN_PD)
