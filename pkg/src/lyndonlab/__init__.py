"""Lyndon factorizations of random words and their limit laws."""

__version__ = "0.1.0"
