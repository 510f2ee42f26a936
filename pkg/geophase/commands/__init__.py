"""
CLI command implementations.
"""

from .robustness import cmd_robustness
from .scan import cmd_scan
from .tomo import cmd_tomo
from .witness import cmd_witness

__all__ = ["cmd_robustness", "cmd_scan", "cmd_tomo", "cmd_witness"]
