"""Test package for sphcov."""
