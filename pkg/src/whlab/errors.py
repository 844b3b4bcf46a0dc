"""Exception hierarchy for whlab."""


class WhlabError(Exception):
    """Base class for all whlab errors."""


class InvalidInputError(WhlabError):
    """Input values are non-finite or structurally malformed."""


class TwistOverflowError(WhlabError):
    """An exponential twist would overflow at a specific sample.

    Carries the sample index and position so the caller can shrink the
    grid or the twist level.
    """

    def __init__(self, message, index=None, position=None):
        super().__init__(message)
        self.index = index
        self.position = position


class AlignmentError(WhlabError):
    """A translation amount or grid offset is not a multiple of the step."""


class GridSpanError(WhlabError):
    """The grid is too small for the requested construction.

    ``required_span`` gives the span that would have been sufficient.
    """

    def __init__(self, message, required_span=None):
        super().__init__(message)
        self.required_span = required_span


class StripError(WhlabError):
    """A strip level lies outside the admissible interval."""


class WeightError(WhlabError):
    """A weight evaluator is non-positive or fails admissibility."""


class BracketError(WhlabError):
    """A root bracket could not be established.

    ``lo`` and ``hi`` report the endpoints of the range that was searched.
    """

    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi


class WindowError(WhlabError):
    """An operator window is empty or escapes the grid."""


class SupportError(WhlabError):
    """Function support escapes the working grid; enlarge and retry."""


class ScaleError(WhlabError):
    """Mollifier scale leaves no usable deconvolution band; increase it."""


class ProbeError(WhlabError):
    """A probe function violates the support preconditions."""


class ConvergenceError(WhlabError):
    """An iterative estimate failed to settle; carries the trend so far."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class ConfigError(WhlabError):
    """An experiment configuration fails schema validation.

    ``pointer`` is a JSON pointer to the offending field.
    """

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer
