"""Decomposition complexity of ternary Boolean functions."""
