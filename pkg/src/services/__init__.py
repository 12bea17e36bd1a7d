"""Computational services: exact algebra, diagrams, invariants and the obstruction pipeline."""

__all__ = [
    'algebra',
    'laurent',
    'diagram',
    'constructions',
    'invariants',
    'isotropy',
    'obstruct'
]
