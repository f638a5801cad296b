"""Combinatorial calculus for framed flow categories of width at most 3.

The package represents such a category as a decorated graded graph (a
"score"), applies certified moves to it, and normalizes to Smith, Chang
and Baues-Hennes style forms, which decides move equivalence.
"""

__version__ = "0.1.0"
