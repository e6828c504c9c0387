"""Lifted-product quantum LDPC codes from quasi-cyclic base matrices."""

__version__ = "0.1.0"
