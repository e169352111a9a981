"""Tests for echo2d."""
