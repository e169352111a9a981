"""HTTP route modules for echo2d."""
