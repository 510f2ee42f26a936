"""
Separability model and witness types.

A separability model is a computable outer relaxation of a k-separable set;
witnesses carry the dual-cone decomposition proving they are nonnegative on it.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .base import GeophaseError, HermitianMatrix
from .state import Bipartition


class SeparabilityError(GeophaseError):
    """Exception raised for invalid models or mismatched programs."""

    pass


class CertificateError(SeparabilityError):
    """Exception raised when a witness certificate fails re-verification."""

    pass


class ModelKind(str, Enum):
    """Relaxation families for the k-separable sets."""

    INTERSECT_PPT = "ppt-intersect"
    MIXTURE_PPT = "ppt-mixture"
    EXACT_TWO_QUBIT = "exact2q"


class CertificateMode(str, Enum):
    """How certificate components recombine into the witness."""

    PER_PARTITION = "per_partition"
    SUMMED = "summed"


class Normalization(str, Enum):
    """Witness normalization attached to each robustness quantifier."""

    TRACE_D = "trace_d"
    BOUNDED_BY_IDENTITY = "bounded_by_identity"


@dataclass(frozen=True)
class SeparabilityModel:
    """Outer relaxation of S_k over an explicit list of bipartitions."""

    kind: ModelKind
    dims: Tuple[int, ...]
    bipartitions: Tuple[Bipartition, ...]

    def __post_init__(self):
        if not self.bipartitions:
            raise SeparabilityError("A separability model needs at least one cut")
        for cut in self.bipartitions:
            if cut.party_count != len(self.dims):
                raise SeparabilityError(
                    f"Cut {cut.label} does not match {len(self.dims)} parties"
                )
        if self.kind is ModelKind.EXACT_TWO_QUBIT and sorted(self.dims) not in (
            [2, 2],
            [2, 3],
        ):
            raise SeparabilityError(
                f"PPT is only exact for 2x2 and 2x3 systems, got dims {self.dims}"
            )

    @property
    def party_count(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def tag(self) -> str:
        return self.kind.value


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    """
    Dual-cone membership proof.

    PER_PARTITION: W = p[M] + q[M]^{T_M} for every cut M.
    SUMMED:        W = p[0] + sum_M q[M]^{T_M}.
    """

    mode: CertificateMode
    bipartitions: Tuple[Bipartition, ...]
    p: Tuple[HermitianMatrix, ...]
    q: Tuple[HermitianMatrix, ...]


@dataclass(frozen=True, eq=False)
class Witness:
    """Hermitian witness with its normalization tag and certificate."""

    matrix: HermitianMatrix
    normalization: Normalization
    dims: Tuple[int, ...]
    certificate: Optional[WitnessCertificate] = None
    model: Optional[str] = None
    provenance: str = "dual-sdp"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, rho_matrix: np.ndarray) -> float:
        """Return Tr(W rho)."""
        return float(np.real(np.sum(self.matrix * rho_matrix.T)))


@dataclass(frozen=True)
class Membership:
    """Result of a membership test: inside flag and most negative violation."""

    inside: bool
    violation: float
