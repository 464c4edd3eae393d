"""Document-delimited corpus model and ingestion.

The atomic unit is a pre-split sentence; documents are ordered sentence
lists with an identity, and parallel documents pair equally long source
and target sides. Character accounting is defined here once
(span_char_length) and used by every downstream budget: counts are
Unicode scalar values, separator tokens are never counted, and adjacent
sentences cost one joining space.

Two interchange formats are supported:

- blank-line-delimited: one sentence per line, one or more blank lines
  between documents (doc ids are generated positionally);
- docid-TSV: ``doc_id<TAB>sentence`` per line, documents contiguous.

All values are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    CorpusFormatError,
    LengthMismatch,
    SentenceCountMismatch,
    SeparatorCollision,
)

logger = logging.getLogger(__name__)

BLANK_LINE = "blank-line"
DOCID_TSV = "docid-tsv"
FORMATS = (BLANK_LINE, DOCID_TSV)


@dataclass(frozen=True)
class Sentence:
    """One sentence of running text; never contains a newline."""

    text: str

    def __post_init__(self):
        if "\n" in self.text or "\r" in self.text:
            raise ValueError(f"sentence text contains a newline: {self.text!r}")

    @property
    def char_len(self) -> int:
        """Length in Unicode scalar values (not bytes)."""
        return len(self.text)


@dataclass(frozen=True)
class SeparatorToken:
    """Reserved token inserted between sentences inside encoded sequences.

    Must never occur inside ingested sentence text; ingestion rejects
    colliding corpora so that splitting decoded output on the token
    always recovers sentence alignment.
    """

    token: str = "<SEP>"

    def __post_init__(self):
        if not self.token:
            raise ValueError("separator token must be non-empty")
        if any(ch.isspace() for ch in self.token):
            raise ValueError(f"separator token contains whitespace: {self.token!r}")


DEFAULT_SEPARATOR = SeparatorToken()


@dataclass(frozen=True)
class Document:
    """An ordered, non-empty list of sentences with a corpus-unique id."""

    doc_id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.sentences:
            raise ValueError(f"document {self.doc_id!r} has no sentences")

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]


@dataclass(frozen=True)
class ParallelDocument:
    """Sentence-aligned source/target document pair."""

    doc_id: str
    source: tuple[Sentence, ...]
    target: tuple[Sentence, ...]

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise ValueError(
                f"document {self.doc_id!r}: source has {len(self.source)} "
                f"sentences, target has {len(self.target)}"
            )
        if not self.source:
            raise ValueError(f"document {self.doc_id!r} is empty")

    def __len__(self) -> int:
        return len(self.source)


def make_document(doc_id: str, texts: Iterable[str]) -> Document:
    return Document(doc_id, tuple(Sentence(t) for t in texts))


def join_with_separator(parts: Sequence[str], sep: SeparatorToken = DEFAULT_SEPARATOR) -> str:
    """Join parts into one line: ``part1 <tok> part2 <tok> part3``."""
    return f" {sep.token} ".join(parts)


def split_on_separator(line: str, sep: SeparatorToken = DEFAULT_SEPARATOR) -> list[str]:
    """Inverse of join_with_separator, tolerant of missing join spaces.

    Splits on the bare token and removes at most one adjacent space on
    each side of every boundary, so ``split(join(parts)) == parts`` holds
    exactly while decoded model output with irregular spacing still
    yields clean sentences.
    """
    parts = line.split(sep.token)
    last = len(parts) - 1
    out = []
    for i, part in enumerate(parts):
        if i > 0 and part.startswith(" "):
            part = part[1:]
        if i < last and part.endswith(" "):
            part = part[:-1]
        out.append(part)
    return out


def span_char_length(sentences: Sequence[Sentence]) -> int:
    """Character budget of a contiguous sentence span.

    Sum of per-sentence scalar counts plus one per inter-sentence join.
    Separator tokens are an encoding artifact and are not counted.
    An empty span measures 0.
    """
    if not sentences:
        return 0
    return sum(s.char_len for s in sentences) + len(sentences) - 1


def _check_separator(text: str, separator: SeparatorToken | None, where: str) -> None:
    if separator is not None and separator.token in text:
        raise SeparatorCollision(
            f"{where}: sentence contains separator token {separator.token!r}: {text!r}"
        )


def parse_document_corpus(
    lines: Iterable[str],
    format: str = BLANK_LINE,
    *,
    separator: SeparatorToken | None = None,
) -> list[Document]:
    """Parse a corpus stream into documents.

    Lines may carry trailing newlines; only trailing CR/LF characters are
    trimmed, never other whitespace. Zero-sentence documents (from runs
    of blank lines) are skipped with a warning. A sentence containing
    `separator` is fatal.
    """
    if format == BLANK_LINE:
        return _parse_blank_line(lines, separator)
    if format == DOCID_TSV:
        return _parse_docid_tsv(lines, separator)
    raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")


def _iter_clean_lines(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        yield line.rstrip("\r\n")


def _parse_blank_line(lines: Iterable[str], separator: SeparatorToken | None) -> list[Document]:
    docs: list[Document] = []
    current: list[Sentence] = []
    position = 0

    def flush() -> None:
        nonlocal current, position
        position += 1
        if current:
            docs.append(Document(f"doc{len(docs) + 1}", tuple(current)))
        else:
            logger.warning("skipping empty document at block %d", position)
        current = []

    saw_any = False
    for lineno, text in enumerate(_iter_clean_lines(lines), start=1):
        saw_any = True
        if text == "":
            flush()
            continue
        _check_separator(text, separator, f"line {lineno}")
        current.append(Sentence(text))
    if saw_any and current:
        docs.append(Document(f"doc{len(docs) + 1}", tuple(current)))
    return docs


def _parse_docid_tsv(lines: Iterable[str], separator: SeparatorToken | None) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    current_id: str | None = None
    current: list[Sentence] = []

    def flush() -> None:
        nonlocal current_id, current
        if current_id is not None:
            docs.append(Document(current_id, tuple(current)))
        current_id, current = None, []

    for lineno, text in enumerate(_iter_clean_lines(lines), start=1):
        if text == "":
            continue
        if "\t" not in text:
            raise CorpusFormatError(f"line {lineno}: expected doc_id<TAB>sentence, got {text!r}")
        doc_id, sentence = text.split("\t", 1)
        if not doc_id:
            raise CorpusFormatError(f"line {lineno}: empty doc_id")
        _check_separator(sentence, separator, f"line {lineno}")
        if doc_id != current_id:
            if doc_id in seen:
                raise CorpusFormatError(
                    f"line {lineno}: doc_id {doc_id!r} reappears non-contiguously"
                )
            flush()
            current_id = doc_id
            seen.add(doc_id)
        current.append(Sentence(sentence))
    flush()
    return docs


def serialize_document_corpus(docs: Sequence[Document], format: str = BLANK_LINE) -> str:
    """Render documents back to their interchange format (round-trips with parse)."""
    if format == BLANK_LINE:
        blocks = ["\n".join(d.texts) for d in docs]
        return "\n\n".join(blocks) + ("\n" if blocks else "")
    if format == DOCID_TSV:
        lines = [f"{d.doc_id}\t{s.text}" for d in docs for s in d.sentences]
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")


def pair_documents(src: Sequence[Document], tgt: Sequence[Document]) -> list[ParallelDocument]:
    """Pair source and target corpora positionally.

    Pairs take the source document id. Raises LengthMismatch when corpus
    lengths differ and SentenceCountMismatch (with the offending doc_id)
    when a pair disagrees on sentence counts.
    """
    if len(src) != len(tgt):
        raise LengthMismatch(
            f"source corpus has {len(src)} documents, target has {len(tgt)}"
        )
    pairs = []
    for s, t in zip(src, tgt):
        if len(s) != len(t):
            raise SentenceCountMismatch(
                f"document {s.doc_id!r}: source has {len(s)} sentences, "
                f"target ({t.doc_id!r}) has {len(t)}",
                doc_id=s.doc_id,
            )
        pairs.append(ParallelDocument(s.doc_id, s.sentences, t.sentences))
    return pairs
