"""Perceptual image hashing and Hamming-distance benchmarking."""

__version__ = "0.1.0"
