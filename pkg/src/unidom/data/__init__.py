"""Bundled generator files (see README for their provenance)."""
