"""coralg: exact computational algebra for corings, entwining structures,
strong connections, relative cyclic homology and Chern-Galois characters."""

__version__ = "0.1.0"
