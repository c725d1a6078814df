"""Low-term exact sequences of Grothendieck spectral sequences, computed exactly."""

__version__ = "0.1.0"
