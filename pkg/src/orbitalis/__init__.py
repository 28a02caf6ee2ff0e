"""Random poset, generic automorphisms and their orbital structure."""

__version__ = "0.1.0"
