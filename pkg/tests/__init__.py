"""
Tests for revocable-abe.
"""
