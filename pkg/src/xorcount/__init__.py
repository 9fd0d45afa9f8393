"""Approximate model counting with sparse XOR constraints."""

__version__ = "0.1.0"
