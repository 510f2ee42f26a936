"""
Services package.

Business logic: numerics, states, the SDP solver, separability programs,
robustness, scans, tomography and output writers.
"""

from .robustness import RobustnessService, robustness_service
from .scan import ScanService, scan_service
from .sdp_solver import InteriorPointSolver, sdp_solver
from .tomography import TomographyService, tomography_service

__all__ = [
    "RobustnessService",
    "robustness_service",
    "ScanService",
    "scan_service",
    "InteriorPointSolver",
    "sdp_solver",
    "TomographyService",
    "tomography_service",
]
