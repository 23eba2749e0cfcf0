import json

import numpy as np
import pytest

from icdiag.models.quantum import Family
from icdiag.repositories import files
from icdiag.schemas.reports import DiagramPoint
from icdiag.services import quantum
from icdiag.services.errors import DomainError

pytestmark = pytest.mark.unit


# ---------- entrées ----------

@pytest.mark.parametrize("text", ["0.5,0.3,0.2", "[0.5, 0.3, 0.2]", " 0.5, 0.3 ,0.2 "])
def test_parse_distribution_formats(text):
    assert files.parse_distribution(text).tolist() == pytest.approx([0.5, 0.3, 0.2])


@pytest.mark.parametrize("text", ["a,b", "{\"p\": 1}", "0.5,0.6", ""])
def test_parse_distribution_errors(text):
    with pytest.raises(DomainError):
        files.parse_distribution(text)


def test_state_round_trip(tmp_path):
    rho = quantum.random_state(3, "mixed", seed=4)
    path = tmp_path / "rho.json"
    files.save_state(rho, path)
    back = files.load_state(path)
    np.testing.assert_allclose(back.mat, rho.mat, atol=1e-15)


def test_load_state_errors(tmp_path):
    with pytest.raises(DomainError):
        files.load_state(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "re": [[1, 0], [0, 1]]}), encoding="utf-8")
    # trace 2
    with pytest.raises(DomainError):
        files.load_state(bad)
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(DomainError):
        files.load_state(broken)


def test_load_frame_and_povm(sic_frame_file, custom_povm_file):
    frame = files.load_frame(sic_frame_file)
    assert frame.shape == (4, 2)
    povm = files.load_povm(custom_povm_file)
    assert povm.family is Family.CUSTOM
    assert povm.size == 2


# ---------- sorties ----------

def test_round_sig_recursive():
    out = files.round_sig({"a": [1.0 / 3.0, 2], "b": None, "c": True})
    assert out["a"][0] == 0.333333333333
    assert out["a"][1] == 2
    assert out["b"] is None and out["c"] is True


def test_dump_json_sorted_and_rounded():
    text = files.dump_json({"z": 2.0 / 3.0, "a": 1})
    assert text == '{"a": 1, "z": 0.666666666667}'


def test_diagram_csv_columns():
    points = [
        DiagramPoint(ic=0.5, value=0.69, tag="sample", alpha=1.0, smooth_bound=0.69, polygonal_bound=0.69),
        DiagramPoint(ic=1.0, value=0.0, tag="breakpoint", alpha=1.0, smooth_bound=0.0, polygonal_bound=0.0),
    ]
    text = files.diagram_csv(points, "entropy")
    lines = text.splitlines()
    assert lines[0] == ",".join(files.ENTROPY_COLUMNS)
    assert lines[1] == "0.5,0.69,1,0.69,0.69,sample"
    with pytest.raises(DomainError):
        files.diagram_csv(points, "other")


def test_write_diagram_csv(tmp_path):
    points = [DiagramPoint(ic=0.5, value=0.75, tag="sample", lower=0.5, upper=0.85)]
    path = tmp_path / "maxp.csv"
    assert files.write_diagram_csv(points, "maxp", path) == 1
    assert path.read_text(encoding="utf-8").splitlines() == ["ic,maxp,lower,upper,tag", "0.5,0.75,0.5,0.85,sample"]
