"""Galerkin solver and verification harness for double-phase inclusion systems."""
