"""Exception hierarchy shared by all mathmoi modules."""


class MoiError(Exception):
    """Base class for every error raised by mathmoi."""


class MathMLParseError(MoiError):
    """Markup is not well-formed XML or has no ``<math>`` root."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EmptyExpressionError(MoiError):
    """The ``<math>`` element has no content."""


class KeyDecodeError(MoiError):
    """A serialized key does not conform to the key grammar."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DuplicateDocumentError(MoiError):
    pass


class IndexFormatError(MoiError):
    """An index file cannot be read."""


class TruncatedIndexError(IndexFormatError):
    pass


class ChecksumError(IndexFormatError):
    pass


class VersionMismatchError(IndexFormatError):
    pass


class InsufficientDataError(MoiError):
    pass


class AbsentTermError(MoiError):
    """The term does not occur in any document of the evaluated set."""


class EmptyQueryError(MoiError):
    """The text query contains no indexable tokens."""


class PatternError(MoiError):
    """An autocomplete pattern cannot be parsed."""


class CorpusFormatError(MoiError):
    """A corpus line is not a valid document record."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
