"""Context-augmented training corpus production.

Rewrites a sentence-aligned parallel corpus into all consecutive-sentence
sequence pairs that fit a character budget, encodes each pair as one line
per side with a reserved separator token between sentences, optionally
filters by an estimated subword length, upsamples, and shuffles
deterministically. Authentic and synthetic (backtranslated) streams are
kept strictly separate so the training pipeline can weight them
independently.

The budget is measured on the source side by default (``side="source"``);
``side="max"`` bounds whichever side is longer. Budgets never count
separator tokens; see corpus.span_char_length.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import (
    DEFAULT_SEPARATOR,
    ParallelDocument,
    Sentence,
    SeparatorToken,
    join_with_separator,
    span_char_length,
)
from .errors import SeparatorCollision

AUTHENTIC = "authentic"
SYNTHETIC = "synthetic"

CHARS = "chars"
EST_SUBWORDS = "est_subwords"

#: Average subwords produced per whitespace word by a 32k joint vocabulary;
#: used to estimate subword lengths without a trained subword model.
SUBWORDS_PER_WORD_NUM = 3
SUBWORDS_PER_WORD_DEN = 2


@dataclass(frozen=True)
class SequencePair:
    """A consecutive-sentence span taken from both sides of one document."""

    doc_id: str
    start: int
    length: int
    src_sentences: tuple[Sentence, ...]
    tgt_sentences: tuple[Sentence, ...]
    origin: str = AUTHENTIC

    def __post_init__(self):
        if self.length < 1 or len(self.src_sentences) != self.length:
            raise ValueError(
                f"{self.doc_id}@{self.start}: span length {self.length} does not "
                f"match {len(self.src_sentences)} source sentences"
            )
        if len(self.tgt_sentences) != len(self.src_sentences):
            raise ValueError(
                f"{self.doc_id}@{self.start}: source and target sentence counts differ"
            )
        if self.origin not in (AUTHENTIC, SYNTHETIC):
            raise ValueError(f"unknown origin {self.origin!r}")


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs for the augmentation pipeline."""

    char_budget: int = 1000
    separator: SeparatorToken = DEFAULT_SEPARATOR
    seed: int = 0
    upsample_factor: int = 1
    max_units: int | None = None
    unit_mode: str = EST_SUBWORDS
    budget_side: str = "source"

    def __post_init__(self):
        if self.char_budget < 1:
            raise ValueError("char_budget must be >= 1")
        if self.upsample_factor < 1:
            raise ValueError("upsample_factor must be >= 1")
        if self.max_units is not None and self.max_units < 1:
            raise ValueError("max_units must be >= 1")
        if self.unit_mode not in (CHARS, EST_SUBWORDS):
            raise ValueError(f"unknown unit_mode {self.unit_mode!r}")
        if self.budget_side not in ("source", "max"):
            raise ValueError(f"unknown budget_side {self.budget_side!r}")


def _span_measure(doc: ParallelDocument, start: int, length: int, side: str) -> int:
    src = span_char_length(doc.source[start : start + length])
    if side == "source":
        return src
    return max(src, span_char_length(doc.target[start : start + length]))


def enumerate_sequences(
    doc: ParallelDocument,
    budget: int,
    *,
    side: str = "source",
    origin: str = AUTHENTIC,
) -> list[SequencePair]:
    """All consecutive-sentence spans of `doc` within `budget` characters.

    Emits exactly the spans whose measured side fits the budget, in
    (start, length) lexicographic order. Single sentences longer than the
    budget are omitted. Because span length grows strictly with each
    added sentence, each start index stops at its first overflow.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    pairs = []
    n = len(doc)
    for start in range(n):
        for length in range(1, n - start + 1):
            if _span_measure(doc, start, length, side) > budget:
                break
            pairs.append(
                SequencePair(
                    doc_id=doc.doc_id,
                    start=start,
                    length=length,
                    src_sentences=doc.source[start : start + length],
                    tgt_sentences=doc.target[start : start + length],
                    origin=origin,
                )
            )
    return pairs


def encode_sequence(seq: SequencePair, sep: SeparatorToken = DEFAULT_SEPARATOR) -> tuple[str, str]:
    """Encode one pair as (source line, target line), separator-joined."""
    for sentence in (*seq.src_sentences, *seq.tgt_sentences):
        if sep.token in sentence.text:
            raise SeparatorCollision(
                f"{seq.doc_id}@{seq.start}: sentence contains separator "
                f"{sep.token!r}: {sentence.text!r}"
            )
    src = join_with_separator([s.text for s in seq.src_sentences], sep)
    tgt = join_with_separator([s.text for s in seq.tgt_sentences], sep)
    return src, tgt


def estimate_subwords(sentences: Sequence[Sentence]) -> int:
    """ceil(1.5 x whitespace-word count), in exact integer arithmetic."""
    words = sum(len(s.text.split()) for s in sentences)
    return (words * SUBWORDS_PER_WORD_NUM + SUBWORDS_PER_WORD_DEN - 1) // SUBWORDS_PER_WORD_DEN


def _side_units(sentences: Sequence[Sentence], mode: str) -> int:
    if mode == CHARS:
        return span_char_length(sentences)
    return estimate_subwords(sentences)


def filter_by_length(
    pairs: Iterable[SequencePair], max_units: int, mode: str = EST_SUBWORDS
) -> list[SequencePair]:
    """Keep pairs whose longer side measures at most `max_units`.

    ``chars`` measures span_char_length; ``est_subwords`` estimates
    subword counts from whitespace words (see estimate_subwords).
    """
    if max_units < 1:
        raise ValueError("max_units must be >= 1")
    if mode not in (CHARS, EST_SUBWORDS):
        raise ValueError(f"unknown unit mode {mode!r}")
    return [
        p
        for p in pairs
        if max(_side_units(p.src_sentences, mode), _side_units(p.tgt_sentences, mode))
        <= max_units
    ]


def upsample(pairs: Sequence[SequencePair], factor: int) -> list[SequencePair]:
    """Repeat the whole list `factor` times (apply before shuffling)."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    return list(pairs) * factor


def _stream_seed(seed: int, stream: str) -> int:
    # Stable across platforms and runs; never touches the global RNG.
    digest = hashlib.sha256(f"{seed}:{stream}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def shuffle_corpus(pairs: Sequence[SequencePair], seed: int) -> list[SequencePair]:
    """Deterministic Fisher-Yates permutation driven by `seed`.

    The permutation algorithm is fixed here (not delegated to
    random.shuffle) so corpora reproduce bit-for-bit across Python
    versions and machines.
    """
    rng = random.Random(seed)
    out = list(pairs)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def upsampling_report(
    docs: Sequence[ParallelDocument], budget: int, *, side: str = "source"
) -> dict[str, list[int]]:
    """Per-sentence occurrence counts across all emitted sequence pairs.

    Enumerating every in-budget span makes sentences from long documents
    appear in more pairs than sentences from short documents; this
    quantifies that implicit upsampling. Returns, per doc_id, one count
    per sentence index.
    """
    report: dict[str, list[int]] = {}
    for doc in docs:
        counts = [0] * len(doc)
        for pair in enumerate_sequences(doc, budget, side=side):
            for i in range(pair.start, pair.start + pair.length):
                counts[i] += 1
        report[doc.doc_id] = counts
    return report


def augment_documents(
    docs: Sequence[ParallelDocument],
    config: AugmentConfig,
    origin: str = AUTHENTIC,
) -> list[tuple[str, str]]:
    """Run the full pipeline for one stream: enumerate, filter, upsample, shuffle, encode.

    Documents are processed in corpus order and spans in (start, length)
    order before the seeded shuffle, so output is a pure function of
    (docs, config, origin). Each stream gets its own sub-seed derived
    from the config seed and the stream name.
    """
    pairs: list[SequencePair] = []
    for doc in docs:
        pairs.extend(
            enumerate_sequences(doc, config.char_budget, side=config.budget_side, origin=origin)
        )
    if config.max_units is not None:
        pairs = filter_by_length(pairs, config.max_units, config.unit_mode)
    pairs = upsample(pairs, config.upsample_factor)
    pairs = shuffle_corpus(pairs, _stream_seed(config.seed, origin))
    return [encode_sequence(p, config.separator) for p in pairs]
