"""Point-spread cover analysis by winning-percentage position."""

__version__ = "0.1.0"
