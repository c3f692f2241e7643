"""Exception hierarchy. Each family maps onto one CLI exit code."""


class SMLPError(Exception):
    exit_code = 3


class ConfigError(SMLPError, ValueError):
    exit_code = 1


class DataError(SMLPError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ComputeError(SMLPError, RuntimeError):
    exit_code = 3


class ConvergenceError(ComputeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
