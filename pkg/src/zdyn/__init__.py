"""Combinatorics of zero-dimensional dynamical systems.

The toolkit models such systems through two interchangeable finite
presentations: sequences of weighted-graph covers, and ordered Bratteli
diagrams carrying a lexicographic successor (Vershik) map.  Conversions,
property checkers (closing, periodicity regulation, nesting, continuity,
overlap), marker constructions, array systems, and substitution reads are
all computed exactly at a caller-chosen finite depth.
"""

__version__ = "0.1.0"
