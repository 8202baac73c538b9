"""CHSH optimisation in regular polygon theories.

Modules
-------
theory     polygon state and effect spaces, symmetries
bipartite  states of the maximal tensor product, assemblages
chsh       probability tables and CHSH values
lp         dense simplex solver and certificate checks
analytic   closed-form bounds
search     LP sweeps, maximally entangled optima, certificates
cli        command-line interface
"""
from .theory import Theory, build_theory

__all__ = ["Theory", "build_theory"]
__version__ = "0.1.0"
