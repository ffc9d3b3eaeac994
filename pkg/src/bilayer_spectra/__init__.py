"""bilayer-spectra: numerical spectral theory for bilayer-graphene operators."""

__version__ = "0.1.0"
