"""Shared pytest configuration; makes tests/ importable (see helpers.py)."""
