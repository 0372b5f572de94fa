"""Exception types shared across the package."""


class BuoyquadError(Exception):
    """Base class for all package errors."""


class DomainError(BuoyquadError, ValueError):
    """An input violates a physical or numerical precondition."""


class ConfigError(BuoyquadError, ValueError):
    """A scenario/config file is malformed, incomplete, or has unknown keys."""


class SchemaError(BuoyquadError, ValueError):
    """A CSV file does not match the expected schema.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SimulationDiverged(BuoyquadError, RuntimeError):
    """A state field exceeded the blow-up guard during integration.

    ``record_index`` is the index of the step at which divergence was caught.
    """

    def __init__(self, record_index: int, field: str, value: float):
        super().__init__(
            f"simulation diverged at record {record_index}: |{field}|={value:.3g} exceeds guard"
        )
        self.record_index = record_index
        self.field = field
        self.value = value


class UnrecoverableFault(BuoyquadError, RuntimeError):
    """More than one rotor is failed; only buoyancy-drag descent remains."""
