"""Finite-scale constructions on binary-string trees.

Functional tables with a use principle, splitting and thin subtrees,
colour extractions on bushy shapes, stagewise pruning constructions,
Kraft-style trace packing, and a scenario-driven command line for
running it all deterministically.
"""

__version__ = "0.1.0"
