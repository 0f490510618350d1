"""Finite-stage machinery for pro-N completions of finitely generated groups."""

__version__ = "0.1.0"
