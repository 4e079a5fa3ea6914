"""Exception types shared across the package."""


class SairsError(Exception):
    """Base class for all errors raised by sairs_lab."""


class InvalidInputError(SairsError, ValueError):
    """Non-finite, malformed, or out-of-contract input."""


class DomainError(SairsError, ValueError):
    """Input outside the mathematical domain of an evaluator (e.g. log of 0)."""


class DegenerateParameterError(SairsError, ValueError):
    """Parameter combination for which a closed form is undefined."""


class WrongModelError(SairsError, ValueError):
    """Parameters violate the restriction a specialized result requires."""


class NoEndemicEquilibriumError(SairsError):
    """Operation requires R0 > 1 but no endemic equilibrium exists."""


class CertificateParameterError(SairsError, ValueError):
    """Tuning constant outside the admissible interval of a certificate."""


class InvarianceViolationError(SairsError, RuntimeError):
    """A state left the probability simplex beyond tolerance (integrator bug)."""


class StiffnessError(SairsError, RuntimeError):
    """Adaptive step size underflowed; the problem is too stiff for the pair."""


class ConfigError(SairsError, ValueError):
    """Unparseable or inconsistent run configuration."""
