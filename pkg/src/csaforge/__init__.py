"""csaforge: exact constructions and certificates for central simple algebras
in positive characteristic."""

__version__ = "0.1.0"
FORMAT_HEADER = "csa-forge/1"
