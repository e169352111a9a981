"""Computational services for echo2d."""
