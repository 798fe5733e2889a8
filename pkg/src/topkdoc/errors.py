class TopKError(Exception):
    """Base class for errors raised by topkdoc."""


class InvalidInputError(TopKError, ValueError):
    """Rejected input: bad symbols, empty documents, negative k, ..."""


class MissingMeasureError(TopKError, KeyError):
    """A query named a measure or parameter the index was not built with."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class CorruptIndexError(TopKError):
    """An index file failed its checksum or structural checks."""
