"""Locality-based first-order model checking on sparse and structurally
sparse graphs.

Subpackages by topic: graph primitives (graph), FO formulas and the naive
evaluator (formulas), Ehrenfeucht-Fraisse games and type trees (ef_games),
a dense simplex LP solver (lp), weak coloring numbers (wcol), the weak
neighborhood cover pipeline (covers), quasi-bush contractions (bush), and
the recursive model checker (mc).
"""

__version__ = "0.1.0"
