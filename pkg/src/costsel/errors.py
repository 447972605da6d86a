"""Exception hierarchy shared by all costsel modules."""


class CostselError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(CostselError, ValueError):
    """Array shapes or feature indices do not fit together."""


class SingularDesign(CostselError, ArithmeticError):
    """The Gram matrix of a design is not numerically positive definite."""


class NonPositiveCost(CostselError, ValueError):
    """A feature cost is zero, negative or not finite."""


class EmptyCandidates(CostselError, ValueError):
    """A selection step was asked to choose from no candidates."""


class ConfigError(CostselError):
    """Base class for configuration problems (CLI exit code 2)."""


class ParseError(ConfigError):
    """The configuration file could not be read or decoded."""


class ValidationError(ConfigError):
    """The configuration decoded but violates the schema.

    All violations found are collected in ``violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ReplicateError(CostselError):
    """A single Monte-Carlo replicate failed numerically."""

    def __init__(self, setting_id, replicate_id, cause):
        self.setting_id = setting_id
        self.replicate_id = replicate_id
        self.cause = cause
        super().__init__(
            f"setting {setting_id}, replicate {replicate_id}: "
            f"{type(cause).__name__}: {cause}"
        )
