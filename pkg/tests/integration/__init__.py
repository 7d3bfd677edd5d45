"""Integration tests that drive the sphcov CLI end to end."""
