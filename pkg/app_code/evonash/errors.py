"""Exception hierarchy shared by every evonash module.

Each error carries the process exit code the CLI reports for it.
"""


class EvoNashError(Exception):
    """Base class for all engine errors"""

    exit_code = 4


class ConfigurationError(EvoNashError, ValueError):
    """Invalid or unresolvable run configuration"""

    exit_code = 2


class DataError(EvoNashError, ValueError):
    """Input data cannot support the requested operation"""

    exit_code = 3


class ParseError(DataError):
    """Malformed input file; ``line`` is 1-based and counts the header"""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractError(EvoNashError, ValueError):
    """A caller violated an operation's preconditions"""


class LookaheadError(ContractError):
    """Access to a sealed (not yet released) slice of data"""


class SolverError(EvoNashError, RuntimeError):
    """A numerical solve failed (singular system and similar)"""


class StatisticalTestError(EvoNashError, ValueError):
    """A statistical test is undefined for its input"""
