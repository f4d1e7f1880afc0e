"""parahn: exact slope stability for parabolic bundles on the projective line."""

__version__ = "0.1.0"
