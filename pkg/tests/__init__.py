"""Tests for trilattice."""
