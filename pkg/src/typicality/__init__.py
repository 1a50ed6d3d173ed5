"""Typicality as a randomness notion: exact decision procedures and checks."""

__version__ = "0.1.0"
