"""Numerical toolkit for the seasonally forced Owen-Smith herbivore-vegetation model."""

__version__ = "0.1.0"
