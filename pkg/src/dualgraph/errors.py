"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: :class:`InputError` and subclasses exit
with 2, :class:`NumericalError` and subclasses with 3.
"""


class DualGraphError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DualGraphError):
    """Invalid graph, argument, or configuration supplied by the caller."""


class GraphFormatError(InputError):
    """A graph file failed to parse or violated the format contract."""

    def __init__(self, message: str, *, path=None, line=None, field=None):
        parts = [message]
        if path is not None:
            parts.append(f"path={path}")
        if line is not None:
            parts.append(f"line={line}")
        if field is not None:
            parts.append(f"field={field}")
        super().__init__("; ".join(str(p) for p in parts))
        self.path = path
        self.line = line
        self.field = field


class NumericalError(DualGraphError):
    """A numerical routine could not produce a trustworthy result."""


class TrialCapExceeded(NumericalError):
    """A sampling run hit its trial budget before reaching the success target.

    Carries the partial counts so callers can report how far the run got.
    """

    def __init__(self, successes: int, trials: int, cap: int):
        super().__init__(
            f"trial cap {cap} exceeded with {successes} successes in {trials} trials"
        )
        self.successes = successes
        self.trials = trials
        self.cap = cap
