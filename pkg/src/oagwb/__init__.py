"""Exact workbench for concrete ordered abelian groups."""
