"""Exception hierarchy shared by every module."""


class GainModError(Exception):
    """Base class for all package errors."""


class ConfigError(GainModError):
    """Bad user input: unknown names, malformed options, missing files."""


class NumericError(GainModError):
    """A computation produced non-finite values or failed to converge."""


# dsl

class DslSyntaxError(ConfigError):
    def __init__(self, message, offset=0, expected=(), source="", line=None, column=None):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.source = source
        self.line = line
        self.column = column
        super().__init__(message)

    def caret(self):
        """Source line with a caret under the offending column."""
        if self.line is not None:
            text = self.source.splitlines()[self.line - 1] if self.source else ""
            col = (self.column or 1) - 1
        else:
            text = self.source
            col = self.offset
        return f"{text}\n{' ' * col}^"

    def __str__(self):
        where = (f"line {self.line}, column {self.column}" if self.line is not None
                 else f"offset {self.offset}")
        msg = f"{self.args[0]} at {where}"
        if self.expected:
            msg += f" (expected one of: {', '.join(self.expected)})"
        return msg


class UnknownFunction(DslSyntaxError):
    pass


class UnknownSymbol(ConfigError):
    pass


class UnboundVariable(ConfigError):
    pass


class NonFiniteResult(NumericError):
    pass


class DegenerateTerm(ConfigError):
    pass


# systems

class UnknownSystem(ConfigError):
    pass


class UnknownParameter(ConfigError):
    pass


# ode

class NonFiniteState(NumericError):
    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message)


class StepUnderflow(NumericError):
    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message)


class NoPeriod(NumericError):
    pass


# analysis

class MissingTerm(ConfigError):
    pass


class TooShort(NumericError):
    pass


class NotOscillatory(NumericError):
    pass


class GridMismatch(NumericError):
    pass


class EmptyBins(NumericError):
    pass


class IncompatibleReports(NumericError):
    pass


class TooFewSamples(NumericError):
    pass
