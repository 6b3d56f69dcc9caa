"""Acoustic-inertial-optical docking simulator for an underwater helicopter."""

__all__ = [
    "__version__",
]

__version__ = "0.1.0"
