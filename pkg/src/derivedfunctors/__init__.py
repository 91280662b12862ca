"""Canonical left derived functors over finitely presented abelian groups."""
