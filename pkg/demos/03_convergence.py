"""How the optimum approaches 2*sqrt(2) as the polygon gets rounder.

Even polygons stay above the quantum bound and odd polygons stay below it.
Writes the series as CSV (n, value, method), which is the plotting format.
"""
import sys

import numpy as np

from polygon_chsh.search import sweep

tsirelson = 2 * np.sqrt(2)
rows = sweep("both", 41, lp=False, n_min=4)
out = sys.stdout
out.write("n,optimum,method,gap\n")
for n, v, method in rows:
    out.write(f"{n},{v:.6f},{method},{v - tsirelson:+.6f}\n")
