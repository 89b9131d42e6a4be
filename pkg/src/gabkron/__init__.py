"""Gabidulin-Kronecker product codes and the GabKron public-key scheme."""

__version__ = "0.1.0"
