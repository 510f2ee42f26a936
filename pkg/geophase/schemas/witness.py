"""
Witness JSON schema.
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from ..models.witness import Witness
from .matrix import MatrixPayload


class CertificatePayload(BaseModel):
    """Dual-cone decomposition of a witness."""

    mode: str = Field(..., description="per_partition or summed")

    bipartitions: List[str] = Field(..., description="Cut labels such as A|BC")

    p: List[MatrixPayload] = Field(..., description="PSD components P")

    q: List[MatrixPayload] = Field(..., description="PSD components Q (partially transposed in W)")


class WitnessPayload(BaseModel):
    """Witness matrix with normalization and certificate."""

    matrix: MatrixPayload

    dims: List[int] = Field(..., description="Subsystem dimensions")

    normalization: str = Field(..., description="trace_d or bounded_by_identity")

    model: Optional[str] = Field(None, description="Separability model tag")

    provenance: str = Field(..., description="dual-sdp or pure-overlap")

    trace: float = Field(..., description="Tr W")

    max_eigenvalue: float = Field(..., description="Largest eigenvalue of W")

    overlap_bound: Optional[float] = Field(
        None, description="lambda for pure-overlap witnesses"
    )

    certificate: Optional[CertificatePayload] = None

    @classmethod
    def from_witness(cls, witness: Witness, overlap_bound: Optional[float] = None) -> "WitnessPayload":
        import numpy as np

        cert = witness.certificate
        return cls(
            matrix=MatrixPayload.from_array(witness.matrix),
            dims=list(witness.dims),
            normalization=witness.normalization.value,
            model=witness.model,
            provenance=witness.provenance,
            trace=float(np.real(np.trace(witness.matrix))),
            max_eigenvalue=float(np.linalg.eigvalsh(witness.matrix)[-1]),
            overlap_bound=overlap_bound,
            certificate=None
            if cert is None
            else CertificatePayload(
                mode=cert.mode.value,
                bipartitions=[cut.label for cut in cert.bipartitions],
                p=[MatrixPayload.from_array(p) for p in cert.p],
                q=[MatrixPayload.from_array(q) for q in cert.q],
            ),
        )
