"""Overlapping-window document decoding.

A document is split into windows of three regions:

- pre-context: a word-boundary suffix of the text before the window,
  translated but discarded; it only conditions the model;
- main content: whole sentences whose translations are kept;
- post-context: whole sentences after the main content, also discarded.

Main spans are packed greedily left to right and partition the document;
the pre-context fills up to its own budget, and the post-context gets
whatever remains of the total budget after pre and main. Decoded windows
are split on the separator token; when a window yields too few parts to
locate its main content, every sentence of that main span is re-translated
alone as a backup, so the stitched output always has one translation per
source sentence.

plan_nonoverlapping covers the simpler baseline of disjoint spans with no
context regions; its spans run through the same stitch/backup machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .corpus import (
    DEFAULT_SEPARATOR,
    Document,
    Sentence,
    SeparatorToken,
    join_with_separator,
    span_char_length,
    split_on_separator,
)


@dataclass(frozen=True)
class WindowLimits:
    """Character budgets for the three window regions."""

    pre_max: int = 200
    main_max: int = 500
    total_max: int = 900

    def __post_init__(self):
        if self.pre_max < 0 or self.total_max < 0:
            raise ValueError("window limits must be >= 0")
        if self.main_max < 1:
            raise ValueError("main_max must be >= 1")


@dataclass(frozen=True)
class WindowPlan:
    """One planned decoding window.

    pre_parts holds the pre-context split at the sentence boundaries it
    fully contains: a leading (possibly partial) fragment followed by
    whole sentences. Each part becomes one separator-delimited segment of
    the encoded line, which is how stitch knows that main-content
    translations start at part index ``len(pre_parts)``.
    """

    doc_id: str
    window_index: int
    pre_parts: tuple[str, ...]
    main_start: int
    main_len: int
    post_start: int
    post_len: int
    oversized: bool = False

    def __post_init__(self):
        if self.main_len < 1 or self.post_len < 0:
            raise ValueError("main_len must be >= 1 and post_len >= 0")
        if self.post_start != self.main_start + self.main_len:
            raise ValueError("post span must immediately follow the main span")

    @property
    def pre_text(self) -> str:
        return " ".join(self.pre_parts)

    @property
    def pre_part_count(self) -> int:
        return len(self.pre_parts)

    @property
    def main_indices(self) -> range:
        return range(self.main_start, self.main_start + self.main_len)


@dataclass
class StitchedTranslation:
    """Document translation assembled from window main contents."""

    doc_id: str
    sentences: list[str]
    backup_indices: frozenset[int] = field(default_factory=frozenset)


def _pre_context_parts(preceding: Sequence[Sentence], pre_max: int) -> tuple[str, ...]:
    """Longest word-boundary suffix of the preceding text, split at the
    sentence boundaries it fully contains."""
    if not preceding or pre_max <= 0:
        return ()
    texts = [s.text for s in preceding]
    joined = " ".join(texts)
    cut = len(joined) - pre_max
    if cut > 0:
        # Move forward to the first word start at or after the raw cut.
        while cut < len(joined) and not joined[cut - 1].isspace():
            cut += 1
        while cut < len(joined) and joined[cut].isspace():
            cut += 1
        if cut >= len(joined):
            return ()
    else:
        cut = 0
    parts = []
    offset = 0
    for text in texts:
        end = offset + len(text)
        if end > cut:
            parts.append(joined[max(offset, cut) : end])
        offset = end + 1
    return tuple(parts)


def plan_windows(doc: Document, limits: WindowLimits = WindowLimits()) -> list[WindowPlan]:
    """Plan overlapping windows whose main spans partition the document.

    Main spans are greedy maximal whole-sentence runs within main_max; a
    single sentence over the limit still forms its own span (flagged
    oversized) because dropping test sentences is not an option at decode
    time. The post-context budget is total_max minus the actual pre and
    main lengths.
    """
    plans: list[WindowPlan] = []
    sentences = doc.sentences
    n = len(sentences)
    i = 0
    while i < n:
        main_chars = sentences[i].char_len
        oversized = main_chars > limits.main_max
        length = 1
        if not oversized:
            while i + length < n:
                grown = main_chars + 1 + sentences[i + length].char_len
                if grown > limits.main_max:
                    break
                main_chars = grown
                length += 1

        pre_parts = _pre_context_parts(sentences[:i], limits.pre_max)
        pre_chars = len(" ".join(pre_parts))

        post_budget = limits.total_max - pre_chars - main_chars
        post_start = i + length
        post_len = 0
        post_chars = 0
        while post_start + post_len < n:
            nxt = sentences[post_start + post_len].char_len
            grown = nxt if post_len == 0 else post_chars + 1 + nxt
            if grown > post_budget:
                break
            post_chars = grown
            post_len += 1

        plans.append(
            WindowPlan(
                doc_id=doc.doc_id,
                window_index=len(plans),
                pre_parts=pre_parts,
                main_start=i,
                main_len=length,
                post_start=post_start,
                post_len=post_len,
                oversized=oversized,
            )
        )
        i += length
    return plans


def plan_nonoverlapping(doc: Document, limit: int) -> list[tuple[int, int]]:
    """Greedy disjoint (start, length) spans, each within `limit` characters.

    Spans partition the document; an oversized single sentence becomes its
    own span.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    spans = []
    sentences = doc.sentences
    n = len(sentences)
    i = 0
    while i < n:
        chars = sentences[i].char_len
        length = 1
        while i + length < n:
            grown = chars + 1 + sentences[i + length].char_len
            if grown > limit:
                break
            chars = grown
            length += 1
        spans.append((i, length))
        i += length
    return spans


def plan_nonoverlapping_windows(doc: Document, limit: int) -> list[WindowPlan]:
    """Non-overlapping spans wrapped as context-free WindowPlans."""
    plans = []
    for k, (start, length) in enumerate(plan_nonoverlapping(doc, limit)):
        plans.append(
            WindowPlan(
                doc_id=doc.doc_id,
                window_index=k,
                pre_parts=(),
                main_start=start,
                main_len=length,
                post_start=start + length,
                post_len=0,
                oversized=span_char_length(doc.sentences[start : start + length]) > limit,
            )
        )
    return plans


def encode_window(plan: WindowPlan, doc: Document, sep: SeparatorToken = DEFAULT_SEPARATOR) -> str:
    """Render one window as a single separator-joined request line."""
    parts = list(plan.pre_parts)
    parts.extend(s.text for s in doc.sentences[plan.main_start : plan.post_start])
    parts.extend(s.text for s in doc.sentences[plan.post_start : plan.post_start + plan.post_len])
    return join_with_separator(parts, sep)


def stitch(
    plans: Sequence[WindowPlan],
    translations: Sequence[str | None],
    sep: SeparatorToken = DEFAULT_SEPARATOR,
) -> StitchedTranslation:
    """Assemble main-content translations across windows.

    A window contributes its main translations when its decoded line
    splits into at least pre_part_count + main_len parts; otherwise (too
    few parts, empty output, or a failed request) every sentence of the
    main span is marked for single-sentence backup and left blank.
    """
    if len(plans) != len(translations):
        raise ValueError(f"{len(plans)} plans but {len(translations)} translations")
    if not plans:
        raise ValueError("no plans to stitch")
    total = max(p.main_start + p.main_len for p in plans)
    out: list[str] = [""] * total
    backup: set[int] = set()
    for plan, decoded in zip(plans, translations):
        if decoded is None or not decoded.strip():
            backup.update(plan.main_indices)
            continue
        parts = split_on_separator(decoded, sep)
        needed = plan.pre_part_count + plan.main_len
        if len(parts) < needed:
            backup.update(plan.main_indices)
            continue
        for k, sentence_index in enumerate(plan.main_indices):
            out[sentence_index] = parts[plan.pre_part_count + k]
    return StitchedTranslation(plans[0].doc_id, out, frozenset(backup))


def run_plans(plans, doc, backend, sep=DEFAULT_SEPARATOR):
    """Translate planned windows, stitch, and fill backups one sentence at a time.

    The output always has exactly one translation per source sentence: a
    backup request that itself fails falls back to the source text.
    """
    lines = [encode_window(p, doc, sep) for p in plans]
    decoded = backend.translate_lines(lines)
    result = stitch(plans, decoded, sep)
    if result.backup_indices:
        indices = sorted(result.backup_indices)
        singles = backend.translate_lines([doc.sentences[i].text for i in indices])
        for i, text in zip(indices, singles):
            result.sentences[i] = text if text is not None else doc.sentences[i].text
    return result


def run_document(
    doc: Document,
    limits: WindowLimits,
    backend,
    sep: SeparatorToken = DEFAULT_SEPARATOR,
) -> StitchedTranslation:
    """Overlapping-window translation of one document."""
    return run_plans(plan_windows(doc, limits), doc, backend, sep)


def run_document_nonoverlapping(
    doc: Document,
    limit: int,
    backend,
    sep: SeparatorToken = DEFAULT_SEPARATOR,
) -> StitchedTranslation:
    """Baseline translation over disjoint spans with no context regions."""
    return run_plans(plan_nonoverlapping_windows(doc, limit), doc, backend, sep)
