"""grmkit: graphical representation models of asset returns."""

__version__ = "0.1.0"
