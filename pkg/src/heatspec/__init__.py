"""Heat trace coefficients, model spectra and Hermitian torsion invariants."""

__version__ = "0.1.0"
