"""
Tests for the surrogate toolkit.
"""
