"""Walk through the triangle, square and hexagon.

The triangle behaves classically, the square allows a PR-box-like value of 4
and the hexagon lands in between at 3.  In each case the best state found by
the LP is checked against the maximally entangled family.
"""
from polygon_chsh.bipartite import enumerate_max_entangled, in_max_tensor
from polygon_chsh.search import global_optimum, me_optimum
from polygon_chsh.theory import build_theory

for n in (3, 4, 6):
    th = build_theory(n)
    glob = global_optimum(th)
    me = me_optimum(th)
    print(f"n={n}: {len(enumerate_max_entangled(th))} maximally entangled states")
    print(f"  LP optimum |C| = {glob.best_value:.6f} at observables {glob.quadruple} ({glob.sense})")
    print(f"  best maximally entangled |C| = {me.best_value:.6f}")
    print(f"  LP state lies in the max tensor product: {in_max_tensor(th, glob.state.map)}")
    print(f"  attained by a maximally entangled state: {glob.is_max_entangled}")
