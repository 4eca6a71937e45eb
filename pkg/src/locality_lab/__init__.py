"""Partial groups, localities and fusion systems over small p-groups."""

__version__ = "0.1.0"
