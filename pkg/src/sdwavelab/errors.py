"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, scenario/parameter validation problems with 3, and numerical
failures (tolerance, escalation, quadrature) with 4.
"""


class SdwaveError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SdwaveError):
    """Malformed or unreadable configuration input."""


class ScenarioError(SdwaveError):
    """Scenario or parameter validation failure."""


class NumericalError(SdwaveError):
    """A numerical procedure could not meet its contract."""


class StepSizeUnderflow(NumericalError):
    """Adaptive integrator drove the step size below representable size."""


class StepBudgetExceeded(NumericalError):
    """Adaptive integrator hit its step budget before reaching the horizon."""


class ZoneConstantTooSmall(NumericalError):
    """A diagonalization smallness condition failed; the zone constant N must grow."""


class EscalationFailed(NumericalError):
    """Zone-constant escalation hit its cap with a smallness condition still failing."""


class DerivativeBudgetExhausted(NumericalError):
    """A chain construction requested more time-derivatives than the profile provides."""


class QuadratureError(NumericalError):
    """A quadrature did not converge to the requested accuracy."""
