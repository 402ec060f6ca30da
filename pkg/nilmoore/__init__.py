# Version: v1.0
"""
nilmoore — Exact multiplicity computations on compact nilmanifolds G/Γ.

Sub-modules
-----------
config           : Environment defaults, logging, shared logger.
errors           : Exception hierarchy mapped onto CLI exit codes.
metrics          : Timing history for computations.
exactlin         : Exact rational/integer linear algebra and Z-lattices.
nilpotent        : Nilpotent Lie algebras, Ad/coAd actions, truncated BCH.
lattice_subgroup : Lattice subgroups, integral duals, Malcev bases.
multiplicity     : Skew forms, A_l, Corwin–Greenleaf sums, Moore verdicts.
orbits           : Coadjoint orbits, Γ-orbit counting, the filiform fixture.
problem          : Problem-file model and parser.
report           : Report models, exact serialization, table rendering.
cli              : argparse front end.
"""

__version__ = "1.0.0"
