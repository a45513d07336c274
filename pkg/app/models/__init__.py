"""Pydantic models package."""

