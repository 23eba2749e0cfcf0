from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from icdiag.models.quantum import Family


class MatrixPayload(BaseModel):
    re: List[List[float]]
    im: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _same_shape(self):
        rows = len(self.re)
        if rows == 0 or any(len(r) != len(self.re[0]) for r in self.re):
            raise ValueError("'re' must be a non-empty rectangular matrix")
        if self.im is not None and (len(self.im) != rows or any(len(r) != len(self.re[0]) for r in self.im)):
            raise ValueError("'im' must have the shape of 're'")
        return self

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float)
        im = np.zeros_like(re) if self.im is None else np.asarray(self.im, dtype=float)
        return re + 1j * im

    @classmethod
    def from_array(cls, mat: np.ndarray) -> "MatrixPayload":
        return cls(re=np.real(mat).tolist(), im=np.imag(mat).tolist())


class StateFile(MatrixPayload):
    """{"d": int, "re": [[...]], "im": [[...]]}"""
    d: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _square_d(self):
        if len(self.re) != self.d or len(self.re[0]) != self.d:
            raise ValueError(f"state matrix must be {self.d}x{self.d}")
        return self


class VectorPayload(BaseModel):
    re: List[float]
    im: Optional[List[float]] = None

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float)
        im = np.zeros_like(re) if self.im is None else np.asarray(self.im, dtype=float)
        return re + 1j * im


class FrameFile(BaseModel):
    """{"d": int, "vectors": [{"re": [...], "im": [...]}, ...]}"""
    d: int = Field(..., ge=1)
    vectors: List[VectorPayload] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _lengths(self):
        for j, v in enumerate(self.vectors):
            if len(v.re) != self.d or (v.im is not None and len(v.im) != self.d):
                raise ValueError(f"vector {j} must have {self.d} components")
        return self

    def to_array(self) -> np.ndarray:
        return np.stack([v.to_array() for v in self.vectors])

    @classmethod
    def from_array(cls, vectors: np.ndarray) -> "FrameFile":
        return cls(
            d=int(vectors.shape[1]),
            vectors=[VectorPayload(re=np.real(v).tolist(), im=np.imag(v).tolist()) for v in vectors],
        )


class PovmFile(BaseModel):
    """{"d": int, "elements": [matrix objects]} ; family/meta optionnels pour la certification."""
    model_config = ConfigDict(use_enum_values=False)

    d: int = Field(..., ge=1)
    elements: List[MatrixPayload] = Field(..., min_length=1)
    family: Family = Family.CUSTOM
    meta: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _square_d(self):
        for j, m in enumerate(self.elements):
            if len(m.re) != self.d or len(m.re[0]) != self.d:
                raise ValueError(f"element {j} must be {self.d}x{self.d}")
        return self

    def to_array(self) -> np.ndarray:
        return np.stack([m.to_array() for m in self.elements])
