"""Unit tests for the kreinlab package's operators, kernels and measures."""
