from functools import lru_cache

import numpy as np
from hypothesis import HealthCheck, settings

from polygon_chsh.bipartite import positivity_values, state_from_map
from polygon_chsh.theory import build_theory

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_state_point(theory, rng):
    """A point of the polygon as a random convex combination of vertices."""
    w = rng.dirichlet(np.ones(theory.n) * 0.5)
    return w @ theory.pure_states


def random_max_tensor_state(theory, rng, boundary=False):
    """Random state of the max tensor product.

    Walks from the product of maximally mixed states in a random direction
    and stops at a random fraction of the distance to the boundary.
    """
    centre = np.zeros((3, 3))
    centre[2, 2] = 1.0
    D = rng.normal(size=(3, 3))
    D[2, 2] = 0.0
    base = positivity_values(theory, centre)
    step = positivity_values(theory, D)
    neg = step < 0
    tmax = np.min(-base[neg] / step[neg]) if neg.any() else 1.0
    t = tmax * (1.0 if boundary else rng.uniform(0, 1))
    return state_from_map(theory, centre + t * D, tol=1e-9)


@lru_cache(maxsize=None)
def cached_verify(n):
    """Theorem check per ``n``, shared by every test module in a session."""
    from polygon_chsh.search import verify_theorem
    return verify_theorem(build_theory(n))


@lru_cache(maxsize=None)
def cached_global(n, reduce=True):
    from polygon_chsh.search import global_optimum
    return global_optimum(build_theory(n), reduce=reduce)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
