"""Abelian link invariants and double-sliceness obstruction toolkit."""
