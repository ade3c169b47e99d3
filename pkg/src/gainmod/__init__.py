"""Modulation-phase-space analysis of oscillators with gain or linear modulation."""

__version__ = "0.1.0"
