from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from icdiag.models.distribution import Distribution
from icdiag.models.quantum import DensityMatrix, Povm
from icdiag.schemas.files import FrameFile, MatrixPayload, PovmFile, StateFile
from icdiag.schemas.reports import DiagramPoint
from icdiag.services.errors import DomainError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)

SIGNIFICANT_DIGITS = 12

ENTROPY_COLUMNS = ("ic", "entropy", "alpha", "smooth_bound", "polygonal_bound", "tag")
MAXP_COLUMNS = ("ic", "maxp", "lower", "upper", "tag")


def parse_distribution(text: str) -> Distribution:
    """'0.5,0.3,0.2' ou '[0.5, 0.3, 0.2]'."""
    raw = text.strip()
    try:
        if raw.startswith("["):
            values = json.loads(raw)
            if not isinstance(values, list):
                raise ValueError("expected a JSON array")
        else:
            values = [v for v in raw.split(",") if v.strip()]
        probs = [float(v) for v in values]
    except (ValueError, TypeError) as e:
        raise DomainError(f"cannot parse distribution {text!r}: {e}") from e
    return Distribution(np.asarray(probs, dtype=float))


def _read_model(path: str | Path, model: Type[M]) -> M:
    try:
        text = Path(path).read_text(encoding="utf-8")
        return model.model_validate_json(text)
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror or e}") from e
    except ValidationError as e:
        first = e.errors()[0]
        raise DomainError(f"invalid {model.__name__} in {path}: {first['msg']}") from e


def load_state(path: str | Path) -> DensityMatrix:
    payload = _read_model(path, StateFile)
    rho = DensityMatrix(payload.to_array())
    logger.debug("state loaded", extra={"d": rho.d})
    return rho


def load_frame(path: str | Path) -> np.ndarray:
    return _read_model(path, FrameFile).to_array()


def load_povm(path: str | Path) -> Povm:
    payload = _read_model(path, PovmFile)
    return Povm(payload.to_array(), family=payload.family, meta=payload.meta)


def state_payload(rho: DensityMatrix) -> StateFile:
    m = MatrixPayload.from_array(rho.mat)
    return StateFile(d=rho.d, re=m.re, im=m.im)


def save_state(rho: DensityMatrix, path: str | Path) -> None:
    try:
        Path(path).write_text(state_payload(rho).model_dump_json(), encoding="utf-8")
    except OSError as e:
        raise DomainError(f"cannot write {path}: {e.strerror or e}") from e


# ---------- sortie ----------

def round_sig(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Arrondit récursivement les flottants à `digits` chiffres significatifs."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value) or value == 0.0:
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_sig(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v, digits) for v in value]
    return value


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(o) for o in obj]
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    return obj


def dump_json(obj: Any) -> str:
    """JSON stable octet par octet : clés triées, flottants à 12 chiffres significatifs."""
    return json.dumps(round_sig(to_jsonable(obj)), sort_keys=True)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIGNIFICANT_DIGITS}g}"
    return str(v)


def diagram_csv(points: Iterable[DiagramPoint], kind: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if kind == "entropy":
        writer.writerow(ENTROPY_COLUMNS)
        for p in points:
            writer.writerow([_cell(c) for c in (p.ic, p.value, p.alpha, p.smooth_bound, p.polygonal_bound, p.tag)])
    elif kind == "maxp":
        writer.writerow(MAXP_COLUMNS)
        for p in points:
            writer.writerow([_cell(c) for c in (p.ic, p.value, p.lower, p.upper, p.tag)])
    else:
        raise DomainError(f"diagram kind must be 'entropy' or 'maxp', got {kind!r}")
    return buf.getvalue()


def write_diagram_csv(points: Iterable[DiagramPoint], kind: str, path: str | Path) -> int:
    text = diagram_csv(points, kind)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DomainError(f"cannot write {path}: {e.strerror or e}") from e
    rows = text.count("\n") - 1
    logger.info("diagram written", extra={"diagram": kind, "points": rows})
    return rows
