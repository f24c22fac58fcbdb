"""Transcript parsing, deterministic preprocessing, labeling, and chunking.

Tokens are whitespace-delimited words throughout; chunk sizes are therefore
model-independent and reproducible. All functions here are pure.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .config import PreprocessSettings
from .errors import MalformedRowError, ValidationError


@dataclass(frozen=True)
class TranscriptSegment:
    sequence: int
    episode: int
    episode_title: str
    start_time: float
    end_time: float
    text: str
    speaker: str


@dataclass(frozen=True, order=True)
class SegmentLabel:
    episode: int
    ordinal: int

    @property
    def rendered(self) -> str:
        return f"{self.episode}_{self.ordinal}"

    @classmethod
    def parse(cls, rendered: str) -> "SegmentLabel":
        m = re.fullmatch(r"(\d+)_(\d+)", rendered)
        if not m:
            raise ValidationError(f"not a segment label: {rendered!r}")
        return cls(episode=int(m.group(1)), ordinal=int(m.group(2)))


@dataclass(frozen=True)
class Chunk:
    id: str
    text: str
    token_count: int
    source_labels: tuple[SegmentLabel, ...]


def tokenize(text: str) -> list[str]:
    return text.split()


def token_count(text: str) -> int:
    return len(text.split())


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_transcript(path: str | Path, columns: dict[str, str]) -> list[TranscriptSegment]:
    """Parse a transcript CSV into segments, in file order.

    `columns` maps segment fields to CSV column names. Any malformed row
    fails the whole parse with the row number and offending column.
    """
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"transcript file not found: {p}")
    segments: list[TranscriptSegment] = []
    seen_sequences: set[int] = set()
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"transcript file is empty: {p}")
        missing = [c for c in columns.values() if c not in reader.fieldnames]
        if missing:
            raise ValidationError(
                f"transcript file {p} is missing columns: {', '.join(missing)}"
            )
        for row_no, row in enumerate(reader, start=2):  # header is line 1
            segments.append(_parse_row(row, row_no, columns, seen_sequences))
    if not segments:
        raise ValidationError(f"transcript file has no data rows: {p}")
    return segments


def _parse_row(
    row: dict[str, str],
    row_no: int,
    columns: dict[str, str],
    seen_sequences: set[int],
) -> TranscriptSegment:
    def cell(field: str) -> str:
        col = columns[field]
        value = row.get(col)
        if value is None or value == "":
            raise MalformedRowError(f"row {row_no}: missing value in column '{col}'")
        return value

    def intcell(field: str, minimum: int) -> int:
        col = columns[field]
        raw = cell(field)
        try:
            value = int(raw)
        except ValueError:
            raise MalformedRowError(
                f"row {row_no}: column '{col}' is not an integer: {raw!r}"
            ) from None
        if value < minimum:
            raise MalformedRowError(f"row {row_no}: column '{col}' must be >= {minimum}")
        return value

    def floatcell(field: str) -> float:
        col = columns[field]
        raw = cell(field)
        try:
            value = float(raw)
        except ValueError:
            raise MalformedRowError(
                f"row {row_no}: column '{col}' is not a number: {raw!r}"
            ) from None
        if value < 0:
            raise MalformedRowError(f"row {row_no}: column '{col}' must be >= 0")
        return value

    seq = intcell("sequence", 0)
    if seq in seen_sequences:
        raise MalformedRowError(
            f"row {row_no}: duplicate sequence number {seq} in column "
            f"'{columns['sequence']}'"
        )
    seen_sequences.add(seq)
    start = floatcell("start_time")
    end = floatcell("end_time")
    if end < start:
        raise MalformedRowError(
            f"row {row_no}: column '{columns['end_time']}' is before the start time"
        )
    return TranscriptSegment(
        sequence=seq,
        episode=intcell("episode", 1),
        episode_title=cell("episode_title"),
        start_time=start,
        end_time=end,
        text=cell("text"),
        speaker=cell("speaker"),
    )


# ---------------------------------------------------------------------------
# preprocessing
# ---------------------------------------------------------------------------

_APOSTROPHE = "['’]"


def _contraction_re(contraction: str) -> re.Pattern[str]:
    # straight and curly apostrophes both match; word-boundary anchored
    pattern = re.escape(contraction).replace("'", _APOSTROPHE)
    return re.compile(rf"\b{pattern}\b", re.IGNORECASE)


def _match_case(replacement: str, matched: str) -> str:
    if matched[:1].isupper() and replacement[:1].islower():
        return replacement[0].upper() + replacement[1:]
    return replacement


def preprocess_segment(
    segment: TranscriptSegment, settings: PreprocessSettings
) -> TranscriptSegment:
    """Apply the deterministic text rewrites; everything else stays byte-identical.

    Order matters: contractions are rewritten first so forms like "I'd"
    surface a standalone "I" before the speaker substitution, and proper
    nouns are joined last so the inserted speaker name is joined too.
    """
    text = segment.text
    rules = sorted(
        list(settings.clitic_removals.items()) + list(settings.negative_expansions.items()),
        key=lambda kv: len(kv[0]),
        reverse=True,
    )
    for contraction, expanded in rules:
        text = _contraction_re(contraction).sub(
            lambda m, repl=expanded: _match_case(repl, m.group(0)), text
        )
    if settings.speaker_pronoun_rewrite:
        text = re.sub(r"\bI\b", segment.speaker, text)
    for name in sorted(settings.proper_nouns, key=len, reverse=True):
        joined = name.replace(" ", "")
        text = re.sub(re.escape(name), joined, text)
    if text == segment.text:
        return segment
    return replace(segment, text=text)


def strip_fillers(text: str, fillers: Sequence[str]) -> str:
    """Remove filler words/markers and tidy the leftover punctuation."""
    for filler in sorted(fillers, key=len, reverse=True):
        text = re.sub(rf"\b{re.escape(filler)}\b", "", text, flags=re.IGNORECASE)
    text = re.sub(r"\s+([,.;:?!])", r"\1", text)
    text = re.sub(r"([,.;:?!])\1+", r"\1", text)
    text = re.sub(r"\s{2,}", " ", text).strip()
    text = re.sub(r"^[\s,.;:]+", "", text)
    return text


def label_and_filter(
    segments: Iterable[TranscriptSegment], settings: PreprocessSettings
) -> list[tuple[SegmentLabel, TranscriptSegment]]:
    """Drop configured noise segments and label the survivors.

    Ordinals are assigned per episode after filtering, consecutively from 1
    in timestamp order, so every label parses back and no gaps appear.
    """
    opening = [re.compile(p) for p in settings.opening_patterns]
    retained: list[TranscriptSegment] = []
    for segment in segments:
        if any(p.search(segment.text) for p in opening):
            continue
        if settings.filler_removal:
            stripped = strip_fillers(segment.text, settings.fillers)
            if not re.search(r"\w", stripped):
                continue
            if stripped != segment.text:
                segment = replace(segment, text=stripped)
        retained.append(segment)
    retained.sort(key=lambda s: (s.episode, s.start_time, s.sequence))
    labeled: list[tuple[SegmentLabel, TranscriptSegment]] = []
    ordinal = 0
    current_episode: int | None = None
    for segment in retained:
        if segment.episode != current_episode:
            current_episode = segment.episode
            ordinal = 0
        ordinal += 1
        labeled.append((SegmentLabel(segment.episode, ordinal), segment))
    return labeled


# ---------------------------------------------------------------------------
# chunking
# ---------------------------------------------------------------------------

def chunk_segments(
    labeled: Sequence[tuple[SegmentLabel, TranscriptSegment]], chunk_size: int
) -> list[Chunk]:
    """Greedily pack consecutive segments into chunks of at most `chunk_size` tokens.

    Segments are atomic unless a single segment alone exceeds the chunk size,
    in which case it is split at token boundaries. Every input token lands in
    exactly one chunk.
    """
    if chunk_size <= 0:
        raise ValidationError(f"chunk_size must be > 0, got {chunk_size}")
    chunks: list[Chunk] = []
    parts: list[str] = []
    labels: list[SegmentLabel] = []
    count = 0

    def close() -> None:
        nonlocal parts, labels, count
        if parts:
            text = " ".join(parts)
            chunks.append(
                Chunk(
                    id=f"chunk-{len(chunks) + 1:04d}",
                    text=text,
                    token_count=count,
                    source_labels=tuple(labels),
                )
            )
        parts, labels, count = [], [], 0

    for label, segment in labeled:
        tokens = tokenize(segment.text)
        if not tokens:
            continue
        if len(tokens) > chunk_size:
            close()
            for start in range(0, len(tokens), chunk_size):
                piece = tokens[start : start + chunk_size]
                parts, labels, count = [" ".join(piece)], [label], len(piece)
                if count == chunk_size:
                    close()
            # a final short piece stays open so following segments pack onto it
            continue
        if count + len(tokens) > chunk_size:
            close()
        parts.append(segment.text)
        labels.append(label)
        count += len(tokens)
    close()
    return chunks


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

PREPROCESSED_FIELDS = (
    "label",
    "sequence",
    "episode",
    "episode_title",
    "start_time",
    "end_time",
    "speaker",
    "text",
)


def write_preprocessed_csv(
    labeled: Sequence[tuple[SegmentLabel, TranscriptSegment]], path: str | Path
) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREPROCESSED_FIELDS)
        for label, s in labeled:
            writer.writerow(
                [
                    label.rendered,
                    s.sequence,
                    s.episode,
                    s.episode_title,
                    f"{s.start_time:g}",
                    f"{s.end_time:g}",
                    s.speaker,
                    s.text,
                ]
            )


def read_preprocessed_csv(path: str | Path) -> list[tuple[SegmentLabel, TranscriptSegment]]:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"preprocessed transcript not found: {p}")
    out: list[tuple[SegmentLabel, TranscriptSegment]] = []
    with p.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                (
                    SegmentLabel.parse(row["label"]),
                    TranscriptSegment(
                        sequence=int(row["sequence"]),
                        episode=int(row["episode"]),
                        episode_title=row["episode_title"],
                        start_time=float(row["start_time"]),
                        end_time=float(row["end_time"]),
                        text=row["text"],
                        speaker=row["speaker"],
                    ),
                )
            )
    return out


def write_chunks(chunks: Sequence[Chunk], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for chunk in chunks:
            fh.write(
                json.dumps(
                    {
                        "id": chunk.id,
                        "text": chunk.text,
                        "token_count": chunk.token_count,
                        "source_labels": [l.rendered for l in chunk.source_labels],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_chunks(path: str | Path) -> list[Chunk]:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"chunk store not found: {p}")
    chunks: list[Chunk] = []
    with p.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            chunks.append(
                Chunk(
                    id=rec["id"],
                    text=rec["text"],
                    token_count=rec["token_count"],
                    source_labels=tuple(
                        SegmentLabel.parse(l) for l in rec["source_labels"]
                    ),
                )
            )
    return chunks
