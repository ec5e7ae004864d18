"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: configuration errors exit with 2,
numerical-convergence failures with 3, I/O problems with 4.
"""


class ConfigError(ValueError):
    """Invalid configuration or a parameter outside its domain."""


class NumericError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""
