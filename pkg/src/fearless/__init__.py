"""A reference implementation of the Fearless object calculus and its
reference-capability extension."""

__version__ = "0.1.0"
