"""Exception types shared across the package."""


class MmqaError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MmqaError):
    """A corpus record, CSV row, or wire payload could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IntegrityError(MmqaError):
    """Loaded data violates an invariant: duplicate ids, dangling
    references, dimension mismatches, or malformed answers."""


class TransportError(MmqaError):
    """A provider call failed in a retryable way (network error, HTTP 5xx,
    malformed provider response)."""


class UnembeddableItemError(MmqaError):
    """An item has no text content at all to embed."""


class ContextOverflowError(MmqaError):
    """A single retrieved snippet alone exceeds the prompt length limit."""


class EmptyAnswerError(MmqaError):
    """The completion provider returned an empty answer."""


class NoCorpusError(MmqaError):
    """Retrieval was attempted against an index with no snippets."""


class UndefinedAgreementError(MmqaError):
    """An agreement coefficient is undefined for the given ratings."""


class TreatmentError(MmqaError):
    """A records treatment left nothing to evaluate."""
