"""
geophase: certified entanglement robustness and geometric phase transitions.
"""

__version__ = "1.0.0"
