"""Typed domain and provider models."""
