"""Desk-scale verification toolkit for weight sequences, Gelfand-Shilov norms,
STFT reconstruction and convolution structure of translation-modulation
invariant Banach spaces."""

__version__ = "0.1.0"
