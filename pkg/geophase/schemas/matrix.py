"""
Matrix, state and ket JSON schemas.

Matrices use the repo-wide encoding {"dim", "re", "im"} with row-major
flattened real and imaginary parts; states add "dims".
"""

from typing import List

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..models.state import DensityMatrix, Ket


class MatrixPayload(BaseModel):
    """Square complex matrix in the repo-wide encoding."""

    dim: int = Field(..., ge=1, le=64, description="Matrix dimension")

    re: List[float] = Field(..., description="Row-major real parts, dim^2 entries")

    im: List[float] = Field(..., description="Row-major imaginary parts, dim^2 entries")

    @model_validator(mode="after")
    def validate_lengths(self):
        """Ensure both parts hold dim^2 entries."""
        expected = self.dim * self.dim
        if len(self.re) != expected or len(self.im) != expected:
            raise ValueError(f"re and im must each hold dim^2 = {expected} entries")
        return self

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> "MatrixPayload":
        matrix = np.asarray(matrix)
        return cls(
            dim=matrix.shape[0],
            re=[float(x) for x in np.real(matrix).reshape(-1)],
            im=[float(x) for x in np.imag(matrix).reshape(-1)],
        )

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float).reshape(self.dim, self.dim)
        im = np.asarray(self.im, dtype=float).reshape(self.dim, self.dim)
        return re + 1j * im


class StatePayload(MatrixPayload):
    """Density matrix with subsystem dimensions."""

    dims: List[int] = Field(..., min_length=1, description="Subsystem dimensions")

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, v):
        """Ensure every subsystem has dimension at least 2."""
        if any(d < 2 for d in v):
            raise ValueError("Subsystem dimensions must be >= 2")
        return v

    @classmethod
    def from_state(cls, rho: DensityMatrix) -> "StatePayload":
        payload = MatrixPayload.from_array(rho.matrix)
        return cls(dims=list(rho.dims), **payload.model_dump())

    def to_state(self) -> DensityMatrix:
        return DensityMatrix(self.to_array(), tuple(self.dims))


class KetPayload(BaseModel):
    """Pure state vector with subsystem dimensions."""

    dims: List[int] = Field(..., min_length=1, description="Subsystem dimensions")

    re: List[float] = Field(..., description="Real parts of the amplitudes")

    im: List[float] = Field(..., description="Imaginary parts of the amplitudes")

    @model_validator(mode="after")
    def validate_lengths(self):
        """Ensure the vector length matches the dims product."""
        expected = int(np.prod(self.dims))
        if len(self.re) != expected or len(self.im) != expected:
            raise ValueError(f"re and im must each hold {expected} entries")
        return self

    @classmethod
    def from_ket(cls, psi: Ket) -> "KetPayload":
        return cls(
            dims=list(psi.dims),
            re=[float(x) for x in psi.amplitudes.real],
            im=[float(x) for x in psi.amplitudes.imag],
        )

    def to_ket(self) -> Ket:
        amplitudes = np.asarray(self.re) + 1j * np.asarray(self.im)
        return Ket(amplitudes, tuple(self.dims))
