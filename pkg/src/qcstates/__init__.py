"""Spectrum, collision states and two-step excitation pathways of a confined
two-heavy, one-light Coulomb system."""

__version__ = "0.1.0"
