"""Shared helpers for the test suite."""

import math
from dataclasses import replace

import numpy as np

from fujitalab.exponents import ProblemParams, critical_forced


def sample_supercritical_tuples(seed, count):
    """Random parameter tuples in the small-data global-existence regime.

    Samples N in {2..6}, -2 < sigma2 < sigma1 <= 0, -1 < rho < 0 and p
    strictly above the forced critical power.  With rho < 0 that power is
    always finite, so no rejection loop is needed.
    """
    rng = np.random.default_rng(seed)
    n = rng.integers(2, 7, size=count)
    s1 = rng.uniform(-1.9, 0.0, size=count)
    s2 = rng.uniform(-1.95, s1)
    rho = rng.uniform(-0.95, -0.05, size=count)
    out = []
    for i in range(count):
        base = ProblemParams(N=int(n[i]), sigma1=float(s1[i]),
                             sigma2=float(s2[i]), rho=float(rho[i]), p=2.0)
        p_star = critical_forced(base)
        assert math.isfinite(p_star)
        p = p_star * float(rng.uniform(1.02, 3.0))
        out.append(replace(base, p=p))
    return out
