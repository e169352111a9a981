"""echo2d - third-order 2D electronic spectroscopy simulator."""

__version__ = "0.1.0"
