"""Typed errors shared across the package."""


class SloppyModelError(Exception):
    """Raised when a quantity is requested that a singular information
    matrix cannot support (quantumness, scalar bounds).

    The refusal is deliberate: silently pseudo-inverting would hide the
    very degeneracy this package is built to diagnose. Callers should
    drop or combine parameters and retry.
    """
