"""Bundled scenario configurations (YAML package data)."""
