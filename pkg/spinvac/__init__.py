"""spinvac: spin-1/2 precession in the quantized vacuum, closed forms and exact oracle."""

__version__ = "0.1.0"
