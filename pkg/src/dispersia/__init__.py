"""Multipolar and dispersion interaction energies of rigid molecule pairs."""

__version__ = "0.1.0"
