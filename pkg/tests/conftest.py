# tests/conftest.py
import json
import os
import sys

import numpy as np
import pytest
from _pytest.config import Config
from fastapi.testclient import TestClient

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

# Pas de console : stderr reste réservé aux erreurs JSON de la CLI
os.environ.setdefault("LOG_ENABLE_CONSOLE", "false")
os.environ.setdefault("LOG_TO_FILE", "false")

from icdiag.main import app
from icdiag.schemas.files import FrameFile, MatrixPayload, PovmFile
from icdiag.services import quantum


def pytest_configure(config: Config):
    """
    Déclare les marqueurs personnalisés pour éviter les warnings 'Unknown mark'
    """
    config.addinivalue_line("markers", "unit: tests unitaires")
    config.addinivalue_line("markers", "integration: tests d'intégration")
    config.addinivalue_line("markers", "acceptance: tests de recette (balayages complets)")


@pytest.fixture()
def client():
    """TestClient sur l'application FastAPI."""
    with TestClient(app) as c:
        yield c


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sic_frame_file(tmp_path):
    """Fichier JSON d'une frame SIC en dimension 2."""
    path = tmp_path / "sic2.json"
    path.write_text(FrameFile.from_array(quantum.sic_frame(2)).model_dump_json(), encoding="utf-8")
    return path


@pytest.fixture
def bad_frame_file(tmp_path):
    """Trois vecteurs non équiangulaires en dimension 2."""
    path = tmp_path / "bad.json"
    payload = {"d": 2, "vectors": [{"re": [1, 0]}, {"re": [0, 1]}, {"re": [0.6, 0.8]}]}
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def custom_povm_file(tmp_path):
    """POVM custom (base de calcul en d = 2) sans paramètres de famille."""
    path = tmp_path / "povm.json"
    elements = [MatrixPayload(re=[[1, 0], [0, 0]]), MatrixPayload(re=[[0, 0], [0, 1]])]
    path.write_text(PovmFile(d=2, elements=elements).model_dump_json(), encoding="utf-8")
    return path
