"""Narrative analytics: sentiment, smoothing, hearsay, keywords, cross-tabs.

Sentiment scoring is lexicon-and-rule based: word valences from an editable
data file, a 3-word negation window, booster words, punctuation and caps
emphasis, squashed into [-1, 1] by x / sqrt(x^2 + alpha) with alpha = 15.
The rule set is a documented subset of the classic valence-lexicon approach;
the constants are exposed through configuration.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .changepoint import ChangePointSet
from .errors import ConfigError, StructuredOutputError, ValidationError
from .ingest import SegmentLabel

NEGATION_WINDOW = 3
NEGATION_SCALAR = -0.74
BOOSTER_INCREMENT = 0.293
BOOSTER_DAMPING = (1.0, 0.95, 0.9)
CAPS_EMPHASIS = 0.733
EXCLAMATION_EMPHASIS = 0.292
MAX_EXCLAMATIONS = 4

NEGATIONS = frozenset(
    "not no never neither nor cannot nothing nowhere none without hardly barely".split()
)
INTENSIFIERS = frozenset(
    """very really extremely absolutely completely deeply totally incredibly
    utterly especially particularly so remarkably truly highly""".split()
)
DAMPENERS = frozenset("slightly somewhat kinda sorta marginally".split())

SENTIMENT_CLASSES = (
    "very_negative",
    "negative",
    "neutral",
    "positive",
    "very_positive",
)


@dataclass(frozen=True)
class Lexicon:
    valence: dict[str, float]


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Load the valence lexicon; bundled file when no path is given."""
    if path is None:
        raw = resources.files("storykg.data").joinpath("sentiment_lexicon.txt").read_text("utf-8")
    else:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"sentiment lexicon not found: {p}")
        raw = p.read_text("utf-8")
    valence: dict[str, float] = {}
    for line_no, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"lexicon line {line_no} is not 'word<TAB>valence': {line!r}")
        try:
            valence[parts[0].lower()] = float(parts[1])
        except ValueError:
            raise ConfigError(f"lexicon line {line_no} has a bad valence: {line!r}") from None
    return Lexicon(valence=valence)


_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'\-]*")


def sentiment_score(text: str, lexicon: Lexicon, alpha: float = 15.0) -> float:
    """Score text into [-1, 1]; empty or all-neutral text scores exactly 0."""
    words = _WORD_RE.findall(text)
    if not words:
        return 0.0
    alpha = alpha if alpha > 0 else 15.0
    cased = [w for w in words if any(c.isalpha() for c in w)]
    mixed_case = not all(w.isupper() for w in cased) if cased else False
    total = 0.0
    for i, word in enumerate(words):
        low = word.lower()
        if low in INTENSIFIERS or low in DAMPENERS or low in NEGATIONS:
            continue
        valence = lexicon.valence.get(low)
        if not valence:
            continue
        if word.isupper() and mixed_case and len(word) > 1:
            valence += CAPS_EMPHASIS if valence > 0 else -CAPS_EMPHASIS
        for back in range(1, NEGATION_WINDOW + 1):
            j = i - back
            if j < 0:
                break
            prior = words[j].lower()
            if prior in NEGATIONS:
                valence *= NEGATION_SCALAR
            elif prior in INTENSIFIERS or prior in DAMPENERS:
                boost = BOOSTER_INCREMENT if prior in INTENSIFIERS else -BOOSTER_INCREMENT
                boost *= BOOSTER_DAMPING[back - 1]
                valence += boost if valence > 0 else -boost
        total += valence
    if total != 0.0:
        emphasis = min(text.count("!"), MAX_EXCLAMATIONS) * EXCLAMATION_EMPHASIS
        total += emphasis if total > 0 else -emphasis
    if total == 0.0:
        return 0.0
    score = total / math.sqrt(total * total + alpha)
    return max(-1.0, min(1.0, score))


@dataclass(frozen=True)
class SentimentSeries:
    points: tuple[tuple[SegmentLabel, float], ...]
    smoothed: Optional[tuple[float, ...]] = None

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(score for _, score in self.points)


def score_segments(
    labeled_texts: Sequence[tuple[SegmentLabel, str]],
    lexicon: Lexicon,
    alpha: float = 15.0,
) -> SentimentSeries:
    return SentimentSeries(
        points=tuple(
            (label, sentiment_score(text, lexicon, alpha)) for label, text in labeled_texts
        )
    )


def rolling_average(values: Sequence[float], window: int = 10) -> list[float]:
    """Centered moving average with windows shrinking at the boundaries.

    Index i averages values[max(0, i - (w-1)//2) : min(n, i + w//2 + 1)], so
    output length equals input length and a constant series is unchanged.
    """
    if window < 1:
        raise ValidationError(f"window must be >= 1, got {window}")
    n = len(values)
    if window > n:
        raise ValidationError(f"window {window} exceeds series length {n}")
    left = (window - 1) // 2
    right = window // 2
    out: list[float] = []
    for i in range(n):
        lo = max(0, i - left)
        hi = min(n, i + right + 1)
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def smooth_series(series: SentimentSeries, window: int = 10) -> SentimentSeries:
    return SentimentSeries(
        points=series.points,
        smoothed=tuple(rolling_average(series.scores, window)),
    )


# ---------------------------------------------------------------------------
# LLM classifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HearsayRecord:
    chunk_id: str
    is_hearsay: bool
    explanation: str
    sentiment_class: str


_HEARSAY_STRICT_RE = re.compile(r'"\s*(true|false)\s*"\s*,\s*"(.*)"', re.IGNORECASE | re.DOTALL)
_HEARSAY_LOOSE_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


def parse_hearsay_response(response: str) -> tuple[bool, str]:
    """Parse «"true", "explanation"»; falls back to a bare true/false scan."""
    m = _HEARSAY_STRICT_RE.search(response)
    if m:
        return m.group(1).lower() == "true", m.group(2).strip()
    m = _HEARSAY_LOOSE_RE.search(response)
    if m:
        explanation = (response[: m.start()] + response[m.end() :]).strip().strip('",. ')
        return m.group(1).lower() == "true", explanation or response.strip()
    raise StructuredOutputError(
        "hearsay response contains no true/false classification", raw=response
    )


def classify_hearsay(chunk_id: str, text: str, gateway) -> tuple[bool, str]:
    response = gateway.complete("hearsay_classification", {"text": text})
    return parse_hearsay_response(response)


def parse_sentiment_class(response: str) -> str:
    cleaned = re.sub(r"[^a-z ]", "", response.strip().lower()).strip()
    cleaned = re.sub(r"\s+", "_", cleaned)
    if cleaned not in SENTIMENT_CLASSES:
        raise StructuredOutputError(
            f"unrecognized sentiment class {response!r}", raw=response
        )
    return cleaned


def classify_sentiment_5(text: str, gateway) -> str:
    response = gateway.complete("sentiment_5class", {"text": text})
    return parse_sentiment_class(response)


def classify_chunks(chunks, gateway) -> list[HearsayRecord]:
    """Hearsay + 5-class sentiment per chunk, in chunk-id order."""
    records = []
    for chunk in sorted(chunks, key=lambda c: c.id):
        is_hearsay, explanation = classify_hearsay(chunk.id, chunk.text, gateway)
        sentiment = classify_sentiment_5(chunk.text, gateway)
        records.append(
            HearsayRecord(
                chunk_id=chunk.id,
                is_hearsay=is_hearsay,
                explanation=explanation,
                sentiment_class=sentiment,
            )
        )
    return records


# ---------------------------------------------------------------------------
# cross-tabulation
# ---------------------------------------------------------------------------

CROSSTAB_ROWS = ("hearsay", "not_hearsay")


@dataclass(frozen=True)
class Crosstab:
    counts: dict[str, dict[str, int]]

    def row_total(self, row: str) -> int:
        return sum(self.counts[row].values())

    def percentages(self, row: str) -> dict[str, float]:
        total = self.row_total(row)
        if total == 0:
            return {cls: 0.0 for cls in SENTIMENT_CLASSES}
        return {cls: 100.0 * self.counts[row][cls] / total for cls in SENTIMENT_CLASSES}

    def render_text(self) -> str:
        header = ["", *[c.replace("_", " ") for c in SENTIMENT_CLASSES], "n"]
        lines = ["  ".join(f"{h:>14}" for h in header)]
        for row in CROSSTAB_ROWS:
            pct = self.percentages(row)
            cells = [row.replace("_", " ")]
            cells += [f"{pct[c]:.1f}%" for c in SENTIMENT_CLASSES]
            cells.append(str(self.row_total(row)))
            lines.append("  ".join(f"{c:>14}" for c in cells))
        return "\n".join(lines)

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["group", *SENTIMENT_CLASSES, "count"])
            for row in CROSSTAB_ROWS:
                pct = self.percentages(row)
                writer.writerow(
                    [row, *[f"{pct[c]:.1f}" for c in SENTIMENT_CLASSES], self.row_total(row)]
                )


def crosstab_hearsay_sentiment(records: Sequence[HearsayRecord]) -> Crosstab:
    counts = {row: {cls: 0 for cls in SENTIMENT_CLASSES} for row in CROSSTAB_ROWS}
    for record in records:
        row = "hearsay" if record.is_hearsay else "not_hearsay"
        counts[row][record.sentiment_class] += 1
    return Crosstab(counts=counts)


# ---------------------------------------------------------------------------
# keywords
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeywordReport:
    community_id: str
    keywords: tuple[str, ...]
    uniqueness_note: str


_NUMBERED_ITEM_RE = re.compile(r"\b\d{1,2}\.\s*([^\n]+?)(?=\s+\d{1,2}\.|\n|$)")


def _parse_keyword_response(response: str) -> tuple[list[str], str] | None:
    items = [m.group(1).strip().rstrip(".,;") for m in _NUMBERED_ITEM_RE.finditer(response)]
    items = [i for i in items if i]
    if len(items) >= 10:
        keywords = items[:10]
        last = list(_NUMBERED_ITEM_RE.finditer(response))[9]
        note = response[last.end() :].strip()
        note = re.sub(r"^[\s:.,-]+", "", note)
    else:
        comma_lines = [l for l in response.splitlines() if l.count(",") >= 9]
        if not comma_lines:
            return None
        keywords = [k.strip().rstrip(".") for k in comma_lines[0].split(",")][:10]
        after = response.split(comma_lines[0], 1)[1]
        note = after.strip()
    keywords = [k for k in keywords if k]
    if len(keywords) != 10 or len({k.lower() for k in keywords}) != 10:
        return None
    return keywords, note


def extract_keywords(report, gateway) -> KeywordReport:
    """Exactly 10 distinct keywords plus a uniqueness note for one community.

    A malformed response earns one corrective reprompt, then an error.
    """
    text = report.summary
    if report.key_findings:
        text += "\n" + "\n".join(f"- {f}" for f in report.key_findings)
    response = gateway.complete("community_keywords", {"text": text})
    parsed = _parse_keyword_response(response)
    if parsed is None:
        response = gateway.complete("keyword_reprompt", {"text": text})
        parsed = _parse_keyword_response(response)
        if parsed is None:
            raise StructuredOutputError(
                f"keyword response for community {report.community_id} did not "
                "contain exactly 10 distinct keywords after one reprompt",
                raw=response,
            )
    keywords, note = parsed
    return KeywordReport(
        community_id=report.community_id,
        keywords=tuple(keywords),
        uniqueness_note=note,
    )


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def write_sentiment_csv(
    series: SentimentSeries, changepoints: ChangePointSet, path: str | Path
) -> None:
    boundary = set(changepoints.indices)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "raw", "smoothed", "is_changepoint"])
        smoothed = series.smoothed or tuple(series.scores)
        for i, (label, score) in enumerate(series.points):
            writer.writerow(
                [label.rendered, f"{score:.6f}", f"{smoothed[i]:.6f}", int(i in boundary)]
            )


def write_sentiment_svg(
    series: SentimentSeries, changepoints: ChangePointSet, path: str | Path,
    width: int = 900, height: int = 260,
) -> None:
    """Minimal, deterministic SVG line plot of smoothed sentiment."""
    values = list(series.smoothed or series.scores)
    n = len(values)
    pad = 30
    span_x = width - 2 * pad
    span_y = height - 2 * pad

    def x(i: int) -> float:
        return pad + (span_x * i / max(n - 1, 1))

    def y(v: float) -> float:
        return pad + span_y * (1.0 - (v + 1.0) / 2.0)

    points = " ".join(f"{x(i):.1f},{y(v):.1f}" for i, v in enumerate(values))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{y(0.0):.1f}" x2="{width - pad}" y2="{y(0.0):.1f}" '
        'stroke="#999" stroke-dasharray="4 3"/>',
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>',
    ]
    for idx in changepoints.indices:
        parts.append(
            f'<line x1="{x(idx):.1f}" y1="{pad}" x2="{x(idx):.1f}" y2="{height - pad}" '
            'stroke="#d62728" stroke-width="1.2"/>'
        )
    parts.append(
        f'<text x="{pad}" y="{pad - 10}" font-family="sans-serif" font-size="12">'
        f"smoothed sentiment with {len(changepoints.indices)} change-point(s)</text>"
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
