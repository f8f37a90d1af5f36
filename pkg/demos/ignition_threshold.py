"""Hunt the blow-up/global threshold in the nonlinearity power by direct
time integration.

Theory predicts the forced problem with rho in (-1, 0) has no global
solutions below the critical power and admits small global solutions
above it.  On a finite horizon with a fixed forcing amplitude, the
dichotomy appears as a sign change in the run outcome as p grows; the
scan calibrates the amplitude, bisects p, and reports the bracket with
an honest finite-horizon caveat.
"""

from fujitalab import (BlowupConfig, ProblemParams, calibrate_amplitude,
                       critical_forced, scan_threshold)

params = ProblemParams(N=3, sigma1=0.0, sigma2=0.0, rho=-0.5, p=2.0)
cfg = BlowupConfig(dt_init=5e-3, t_max=50.0)

print("predicted critical power: %.4f" % critical_forced(params))

amp = calibrate_amplitude(params, cfg)
print("calibrated forcing amplitude: %g" % amp)
print()

report = scan_threshold(params, (1.25, 3.0), amp, cfg)
print("%8s %14s %16s %12s" % ("p", "outcome", "t*/T_max", "max norm"))
for row in sorted(report.rows, key=lambda r: r.p):
    print("%8.5f %14s %16.4f %12.4e"
          % (row.p, row.outcome, row.t_star_or_tmax, row.max_norm))
print()
lo, hi = report.bracket
print("threshold bracket: (%.5f, %.5f), width %.5f" % (lo, hi, hi - lo))
print(report.note)
