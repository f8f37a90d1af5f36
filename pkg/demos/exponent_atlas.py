"""Walk the exponent landscape of the weighted forced reaction-diffusion
problem for a few parameter tuples and print the full derived report.

The problem family is

    |x|^s1 du/dt = Lap u + |x|^s2 |u|^p + t^rho w(|x|)

and everything printed here is closed-form arithmetic: no grids involved.
"""

import math

from fujitalab import ProblemParams, build_report, report_text
from fujitalab.exponents import critical_forced

# ---------------------------------------------------------------------------
# reference tuples: unweighted, degenerate, and strongly forced
# ---------------------------------------------------------------------------

CASES = [
    ("classical Laplacian, decaying forcing",
     ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=-0.5, p=3.0)),
    ("degenerate time weight",
     ProblemParams(N=3, sigma1=-1.0, sigma2=-0.5, rho=-0.5, p=2.5)),
    ("growing forcing, no global solutions expected",
     ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=1.0, p=2.0)),
    ("subcritical power",
     ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=-0.5, p=1.5)),
]

for title, params in CASES:
    print("=" * 72)
    print(title)
    print("-" * 72)
    print(report_text(build_report(params)))
    print()

# ---------------------------------------------------------------------------
# the critical power as the forcing fades: rho -> 0 recovers the
# unforced threshold N/(N-2), independently of the time weight
# ---------------------------------------------------------------------------

print("=" * 72)
print("critical power vs forcing decay (N=3, sigma2=0)")
print("%8s %12s %12s" % ("rho", "s1=0", "s1=-1"))
for rho in (-0.9, -0.5, -0.1, -0.01, 0.0):
    row = []
    for s1 in (0.0, -1.0):
        ps = critical_forced(
            ProblemParams(N=3, sigma1=s1, sigma2=0.0, rho=rho, p=2.0))
        row.append("inf" if math.isinf(ps) else "%.6f" % ps)
    print("%8.2f %12s %12s" % (rho, row[0], row[1]))
print("unforced limit N/(N-2) = %.6f" % 3.0)
