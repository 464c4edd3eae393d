"""Exception hierarchy shared across the toolkit.

Every error raised by docspan derives from DocspanError so callers can
catch the whole family at pipeline boundaries. The CLI maps subfamilies
onto exit codes (config -> 2, input -> 3, backend -> 4).
"""

from __future__ import annotations


class DocspanError(Exception):
    """Base class for all docspan errors."""


class ConfigError(DocspanError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class InputError(DocspanError):
    """Unreadable or malformed input artifact (CLI exit code 3)."""


class BackendError(DocspanError):
    """Translator backend failure (CLI exit code 4)."""


class SeparatorCollision(InputError):
    """A sentence contains the configured separator token."""


class CorpusFormatError(InputError):
    """A corpus file violates its declared format."""


class LengthMismatch(InputError):
    """Source and target corpora have different document counts."""


class SentenceCountMismatch(InputError):
    """Paired documents (or per-sentence files) disagree on sentence counts."""

    def __init__(self, message: str, doc_id: str | None = None):
        super().__init__(message)
        self.doc_id = doc_id


class MalformedPair(InputError):
    """An alignment file token is not a valid `i-j` index pair."""

    def __init__(self, message: str, line_no: int, token: str):
        super().__init__(message)
        self.line_no = line_no
        self.token = token


class IndexOutOfRange(InputError):
    """An alignment link points past the end of a lemma/token sentence."""


class TranslatorUnavailable(BackendError):
    """The backend cannot be reached at all (connection-level failure)."""


class PerRequestFailure(BackendError):
    """A single translation request failed after bounded retries."""


class BindFailure(BackendError):
    """The mock server could not bind its listen address."""


class NoValidCandidate(DocspanError):
    """No cascade entry produced a valid translation for a sentence."""

    def __init__(self, message: str, sentence_index: int | None = None):
        super().__init__(message)
        self.sentence_index = sentence_index
