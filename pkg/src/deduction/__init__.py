"""Deduction games, entropy-driven search agents and a benchmark harness."""

__version__ = "0.1.0"
