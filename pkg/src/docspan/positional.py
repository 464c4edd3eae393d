"""Positional-context decoding with a validity cascade.

Every sentence is translated inside short contexts of one to three
consecutive sentences, occupying each feasible position: label "2nd/3"
means the sentence sits second in a 3-sentence context. Each decoded
context is checked for validity (separator count preserved, no degenerate
word loops, no absurdly long words) and the final translation is the
sentence extracted from the first cascade entry that is both feasible and
valid. The default cascade is 2nd/3, 1st/3, 2nd/2, 1st/2, 1st/1; 3rd/3 is
enumerated for analysis but never selected by default because trailing
positions decode worst.

Identical context spans shared between adjacent sentences are translated
once per backend and reused, which cannot change results for a
deterministic backend.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import (
    DEFAULT_SEPARATOR,
    Document,
    SeparatorToken,
    join_with_separator,
    split_on_separator,
)
from .errors import NoValidCandidate

logger = logging.getLogger(__name__)

_ORDINALS = {1: "1st", 2: "2nd", 3: "3rd"}

MAX_CONTEXT_SENTENCES = 3

VALID = "valid"
REASON_SENTENCE_COUNT = "sentence_count"
REASON_WORD_REPEAT = "word_repeat"
REASON_WORD_LENGTH = "word_length"
REASON_REQUEST_FAILED = "request_failed"


@dataclass(frozen=True)
class PositionLabel:
    """Position of the translated sentence within its context window."""

    position: int
    context_size: int

    def __post_init__(self):
        if not 1 <= self.position <= self.context_size <= MAX_CONTEXT_SENTENCES:
            raise ValueError(
                f"need 1 <= position <= context_size <= {MAX_CONTEXT_SENTENCES}, "
                f"got {self.position}/{self.context_size}"
            )

    def __str__(self) -> str:
        return f"{_ORDINALS[self.position]}/{self.context_size}"

    @classmethod
    def parse(cls, text: str) -> "PositionLabel":
        """Accepts "2/3" and "2nd/3" forms."""
        try:
            pos_text, size_text = text.strip().split("/")
            pos = int(pos_text.rstrip("stndrdh"))
            size = int(size_text)
        except (ValueError, AttributeError):
            raise ValueError(f"cannot parse position label {text!r}") from None
        return cls(pos, size)


DEFAULT_CASCADE: tuple[PositionLabel, ...] = (
    PositionLabel(2, 3),
    PositionLabel(1, 3),
    PositionLabel(2, 2),
    PositionLabel(1, 2),
    PositionLabel(1, 1),
)


def parse_cascade(text: str) -> tuple[PositionLabel, ...]:
    """Parse a comma-separated cascade such as "2/3,1/3,2/2,1/2,1/1"."""
    labels = tuple(PositionLabel.parse(part) for part in text.split(",") if part.strip())
    if not labels:
        raise ValueError("cascade is empty")
    return labels


@dataclass(frozen=True)
class ValidityRules:
    """Thresholds for rejecting degenerate decoder output."""

    max_word_repeats: int = 20
    max_word_len: int = 49

    def __post_init__(self):
        if self.max_word_repeats < 1 or self.max_word_len < 1:
            raise ValueError("validity thresholds must be >= 1")


@dataclass(frozen=True)
class Verdict:
    valid: bool
    reason: str | None = None


@dataclass(frozen=True)
class CandidateTranslation:
    """One positional decode of one sentence, with its validity verdict."""

    sentence_index: int
    label: PositionLabel
    span: tuple[int, int]
    decoded: str
    extracted: str | None
    verdict: Verdict

    def __post_init__(self):
        if (self.extracted is not None) != self.verdict.valid:
            raise ValueError("extracted text must be present exactly when valid")


def build_candidates(doc: Document, sentence_index: int) -> list[tuple[PositionLabel, tuple[int, int]]]:
    """Every feasible (label, context span) for one sentence.

    The span for position p in a c-sentence context starts p-1 sentences
    before the target sentence; a label is feasible when that span lies
    inside the document. 3rd/3 is included here for analysis even though
    the default cascade never picks it. Spans are (start, length).
    """
    if not 0 <= sentence_index < len(doc):
        raise IndexError(f"sentence index {sentence_index} out of range")
    out = []
    for size in range(MAX_CONTEXT_SENTENCES, 0, -1):
        for position in range(1, size + 1):
            start = sentence_index - (position - 1)
            if start >= 0 and start + size <= len(doc):
                out.append((PositionLabel(position, size), (start, size)))
    return out


def check_validity(
    decoded: str,
    expected_sentences: int,
    rules: ValidityRules = ValidityRules(),
    sep: SeparatorToken = DEFAULT_SEPARATOR,
) -> Verdict:
    """Validity verdict for a decoded context.

    Checks, in order: (a) splitting on the separator yields exactly the
    expected number of sentences, (b) no whitespace token occurs more than
    max_word_repeats times in the whole decoded string, (c) no token is
    longer than max_word_len characters. The first failing check names the
    reason.
    """
    if len(split_on_separator(decoded, sep)) != expected_sentences:
        return Verdict(False, REASON_SENTENCE_COUNT)
    words = decoded.split()
    counts = Counter(words)
    if counts and max(counts.values()) > rules.max_word_repeats:
        return Verdict(False, REASON_WORD_REPEAT)
    if any(len(w) > rules.max_word_len for w in words):
        return Verdict(False, REASON_WORD_LENGTH)
    return Verdict(True)


def select_final(
    candidates: Sequence[CandidateTranslation],
    cascade: Sequence[PositionLabel] = DEFAULT_CASCADE,
) -> tuple[str, PositionLabel]:
    """First cascade entry that is feasible (present) and valid.

    Raises NoValidCandidate when the cascade is exhausted, which with the
    default cascade means even the context-free 1st/1 decode was invalid.
    """
    by_label = {c.label: c for c in candidates}
    for label in cascade:
        candidate = by_label.get(label)
        if candidate is not None and candidate.verdict.valid:
            assert candidate.extracted is not None
            return candidate.extracted, label
    index = candidates[0].sentence_index if candidates else -1
    raise NoValidCandidate(
        f"sentence {index}: no cascade entry was feasible and valid", sentence_index=index
    )


@dataclass
class PositionalStats:
    """Per-label usage accounting for one decoding run."""

    chosen: Counter = field(default_factory=Counter)
    invalid: Counter = field(default_factory=Counter)
    no_valid_sentences: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chosen": dict(sorted(self.chosen.items())),
            "invalid": dict(sorted(self.invalid.items())),
            "no_valid_sentences": list(self.no_valid_sentences),
        }

    def render_table(self) -> str:
        lines = ["label      chosen", "-----------------"]
        for label, count in sorted(self.chosen.items()):
            lines.append(f"{label:<10} {count:>6}")
        if self.invalid:
            lines.append("")
            lines.append("invalid candidates (label, reason):")
            for key, count in sorted(self.invalid.items()):
                lines.append(f"  {key:<22} {count:>6}")
        if self.no_valid_sentences:
            lines.append("")
            lines.append(f"sentences with no valid candidate: {self.no_valid_sentences}")
        return "\n".join(lines)


def _encode_span(doc: Document, span: tuple[int, int], sep: SeparatorToken) -> str:
    start, length = span
    return join_with_separator([s.text for s in doc.sentences[start : start + length]], sep)


def run_document_positional(
    doc: Document,
    backend,
    rules: ValidityRules = ValidityRules(),
    cascade: Sequence[PositionLabel] = DEFAULT_CASCADE,
    sep: SeparatorToken = DEFAULT_SEPARATOR,
    per_label_backends: Mapping[PositionLabel, object] | None = None,
) -> tuple[list[str], PositionalStats]:
    """Translate a document via positional contexts and the cascade.

    Context spans are deduplicated per backend before translation.
    per_label_backends routes individual labels to dedicated backends
    (falling back to `backend`). A sentence whose candidates are all
    invalid is surfaced in the stats and falls back to its context-free
    decode (or the source text when even that request failed).
    """
    per_label = dict(per_label_backends or {})

    def backend_for(label: PositionLabel):
        return per_label.get(label, backend)

    candidate_spans = [build_candidates(doc, i) for i in range(len(doc))]

    # Batch unique spans per backend, in first-seen order.
    span_lines: dict[int, dict[tuple[int, int], str]] = {}
    backends_in_order: list = []
    for feasible in candidate_spans:
        for label, span in feasible:
            chosen_backend = backend_for(label)
            key = id(chosen_backend)
            if key not in span_lines:
                span_lines[key] = {}
                backends_in_order.append(chosen_backend)
            span_lines[key].setdefault(span, "")
    decoded_by_backend: dict[int, dict[tuple[int, int], str | None]] = {}
    for chosen_backend in backends_in_order:
        spans = list(span_lines[id(chosen_backend)])
        lines = [_encode_span(doc, span, sep) for span in spans]
        results = chosen_backend.translate_lines(lines)
        decoded_by_backend[id(chosen_backend)] = dict(zip(spans, results))

    stats = PositionalStats()
    translated: list[str] = []
    for i, feasible in enumerate(candidate_spans):
        candidates = []
        for label, span in feasible:
            decoded = decoded_by_backend[id(backend_for(label))][span]
            if decoded is None:
                verdict = Verdict(False, REASON_REQUEST_FAILED)
                candidates.append(CandidateTranslation(i, label, span, "", None, verdict))
                continue
            verdict = check_validity(decoded, span[1], rules, sep)
            extracted = None
            if verdict.valid:
                parts = split_on_separator(decoded, sep)
                extracted = parts[label.position - 1]
            else:
                stats.invalid[f"{label}:{verdict.reason}"] += 1
            candidates.append(CandidateTranslation(i, label, span, decoded, extracted, verdict))
        try:
            text, label = select_final(candidates, cascade)
            stats.chosen[str(label)] += 1
            translated.append(text)
        except NoValidCandidate:
            stats.no_valid_sentences.append(i)
            fallback = _bare_fallback(candidates, doc, i)
            logger.warning(
                "%s sentence %d: no valid candidate, using bare decode", doc.doc_id, i
            )
            translated.append(fallback)
    return translated, stats


def _bare_fallback(candidates, doc: Document, index: int) -> str:
    for c in candidates:
        if c.label == PositionLabel(1, 1) and c.decoded:
            return c.decoded
    return doc.sentences[index].text
