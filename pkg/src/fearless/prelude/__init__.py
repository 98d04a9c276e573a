"""Prelude sources loaded before user code."""
