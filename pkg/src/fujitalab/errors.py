"""Exception hierarchy shared by all fujitalab modules.

Two broad families matter to callers: hypothesis-level failures (the
requested computation is outside the regime where the formulas or
estimates apply) and numerical failures (the computation was attempted
and did not meet its own quality gates).  The CLI maps these families
to distinct exit codes.
"""


class FujitaLabError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# hypothesis-level failures: wrong regime, inadmissible arguments
# ---------------------------------------------------------------------------

class HypothesisViolation(FujitaLabError):
    """Parameters violate a structural hypothesis (N >= 2, sigma > -2, ...)."""


class EmptyWindow(HypothesisViolation):
    """The admissible Lebesgue-exponent window is empty (subcritical p)."""


class WindowViolation(HypothesisViolation):
    """A requested integrability exponent lies outside the admissible window."""


class Inadmissible(HypothesisViolation):
    """A local-theory exponent q fails one of its admissibility inequalities."""


class DegenerateTransform(HypothesisViolation):
    """The radial change of variables is singular for these weights."""


class ConditionViolation(HypothesisViolation):
    """Smoothing-estimate exponents fall outside the validity conditions."""


# ---------------------------------------------------------------------------
# numerical failures: the computation ran but did not certify
# ---------------------------------------------------------------------------

class NumericalFailure(FujitaLabError):
    """Base class for quality-gate failures of numerical routines."""


class StepFailure(NumericalFailure):
    """An implicit solve produced non-finite values."""


class Overflow(NumericalFailure):
    """A field exceeded the overflow guard during iteration."""


class NotContracting(NumericalFailure):
    """Picard iteration shows non-contracting difference ratios."""


class NoValidT(NumericalFailure):
    """No existence horizon satisfies the closure inequality."""


class InsufficientResolution(NumericalFailure):
    """Too few interior nodes to form the requested discrete residual."""


class QuadratureFailure(NumericalFailure):
    """A capacity quadrature failed its internal consistency check."""


class PoorFit(NumericalFailure):
    """A log-log regression fell below the required R^2 quality gate."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoBracket(NumericalFailure):
    """Threshold scan endpoints do not bracket an outcome change."""


class ConfigError(FujitaLabError):
    """Malformed configuration file or unknown/invalid keys."""
