"""Exception hierarchy shared by all podeval modules.

Every exception carries a machine-readable ``code`` (used as the CLI exit
status) and a short ``name`` printed in error reports.
"""


class PodError(Exception):
    """Base class for all podeval errors."""

    code = 1
    name = "error"


class DomainError(PodError, ValueError):
    """Argument outside the mathematical domain of a function."""

    code = 2
    name = "domain"


class ParseError(PodError):
    """Malformed input file. ``line`` is 1-based when known."""

    code = 2
    name = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInput(PodError):
    code = 2
    name = "empty-input"


class NonPositiveAxis(DomainError):
    """Logarithmic axis requested for a non-positive process parameter."""

    name = "non-positive-axis"


class DegenerateData(PodError):
    """All hits, all misses, or (quasi-)complete separation."""

    code = 3
    name = "degenerate"


class FlatModel(PodError):
    """Zero slope: the POD curve never crosses the requested level."""

    code = 3
    name = "flat-model"


class AllExperimentsDegenerate(DegenerateData):
    name = "all-experiments-degenerate"


class NoValidModel(PodError):
    code = 4
    name = "no-valid-model"


class MisalignedTrace(PodError, UserWarning):
    """A trace covers too little of the analysis window; it is skipped."""

    code = 2
    name = "misaligned-trace"


class KeyMismatch(PodError):
    code = 2
    name = "key-mismatch"

    def __init__(self, message, keys=()):
        super().__init__(message)
        self.keys = tuple(keys)
