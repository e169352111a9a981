"""Pydantic schemas for echo2d configuration and API payloads."""
