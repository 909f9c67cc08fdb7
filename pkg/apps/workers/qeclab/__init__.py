"""qeclab: discrete and continuous-time error-correction cycle simulator."""

__version__ = "0.1.0"
