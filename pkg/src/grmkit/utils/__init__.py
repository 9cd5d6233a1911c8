"""Utility modules for grmkit."""

from grmkit.utils.units import Annualizer, Frequency
from grmkit.utils.validation import PanelValidator

__all__ = ["Annualizer", "Frequency", "PanelValidator"]
