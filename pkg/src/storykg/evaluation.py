"""Question-corpus runner, pairwise multi-metric judge, tallies, adversarial suite.

The judge sees answers under shuffled anonymous labels (seeded per question
and metric) so position and mode-name bias cannot leak in, and it must pick
exactly one winner per metric: ties are disallowed by the prompt contract.
Adversarial outcomes are human-graded through a grades file; nothing here
auto-grades silently.
"""

from __future__ import annotations

import json
import random
import re
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .errors import StructuredOutputError, ValidationError
from .retrieval import Answer, Artifacts, run_query

METRICS = ("comprehensiveness", "empowerment", "diversity", "directness")

METRIC_DEFINITIONS = {
    "comprehensiveness": (
        "how fully the answer covers every aspect and detail the question raises"
    ),
    "empowerment": (
        "how well the answer equips the reader to understand the topic and form "
        "their own informed judgments"
    ),
    "diversity": (
        "how varied and rich the answer is in perspectives, angles, and examples"
    ),
    "directness": (
        "how specifically and clearly the answer addresses exactly what was asked"
    ),
}

QUESTION_CATEGORIES = ("ground_truth", "theme", "opinion")

TRAP_KINDS = ("fabricated_evidence", "false_presupposition", "suggestive_detail")
OUTCOMES = ("resisted", "accepted_false_premise", "hedged")


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    category: str


@dataclass(frozen=True)
class JudgeVerdict:
    question_id: str
    metric: str
    winner: str
    rationale: str


@dataclass
class AnswerCell:
    question_id: str
    mode: str
    answer: Optional[Answer] = None
    error: Optional[str] = None
    fingerprints: tuple[str, ...] = ()


@dataclass(frozen=True)
class AdversarialCase:
    id: str
    prompt: str
    trap_kind: str
    ground_truth_note: str


@dataclass(frozen=True)
class AdversarialOutcome:
    case_id: str
    mode: str
    answer_text: str
    declined: bool
    outcome: Optional[str]  # None while ungraded ("pending")


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def load_corpus(path: str | Path) -> list[Question]:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"question corpus not found: {p}")
    data = json.loads(p.read_text("utf-8"))
    rows = data["questions"] if isinstance(data, dict) else data
    questions: list[Question] = []
    seen: set[str] = set()
    for row in rows:
        qid = str(row["id"])
        if qid in seen:
            raise ValidationError(f"duplicate question id {qid!r} in corpus")
        seen.add(qid)
        category = row["category"]
        if category not in QUESTION_CATEGORIES:
            raise ValidationError(
                f"question {qid!r} has unknown category {category!r}; "
                f"expected one of {QUESTION_CATEGORIES}"
            )
        questions.append(Question(id=qid, text=row["text"], category=category))
    if not questions:
        raise ValidationError(f"question corpus is empty: {p}")
    return questions


def load_adversarial_cases(path: str | Path) -> list[AdversarialCase]:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"adversarial case file not found: {p}")
    data = json.loads(p.read_text("utf-8"))
    rows = data["cases"] if isinstance(data, dict) else data
    cases = []
    for row in rows:
        if row["trap_kind"] not in TRAP_KINDS:
            raise ValidationError(
                f"case {row['id']!r} has unknown trap kind {row['trap_kind']!r}"
            )
        cases.append(
            AdversarialCase(
                id=str(row["id"]),
                prompt=row["prompt"],
                trap_kind=row["trap_kind"],
                ground_truth_note=row.get("ground_truth_note", ""),
            )
        )
    return cases


def load_grades(path: str | Path | None) -> dict[tuple[str, str], str]:
    """Grades file: list of {case_id, mode, outcome}; missing file means ungraded."""
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"grades file not found: {p}")
    data = json.loads(p.read_text("utf-8"))
    rows = data["grades"] if isinstance(data, dict) else data
    grades: dict[tuple[str, str], str] = {}
    for row in rows:
        outcome = row["outcome"]
        if outcome not in OUTCOMES:
            raise ValidationError(
                f"grade for ({row['case_id']}, {row['mode']}) has unknown "
                f"outcome {outcome!r}; expected one of {OUTCOMES}"
            )
        grades[(str(row["case_id"]), row["mode"])] = outcome
    return grades


# ---------------------------------------------------------------------------
# corpus run
# ---------------------------------------------------------------------------

def run_corpus(
    corpus: Sequence[Question],
    modes: Sequence[str],
    artifacts: Optional[Artifacts],
    gateway,
    *,
    k: int = 5,
    level: Optional[int] = None,
    budget: int = 8000,
    top_chunks: int = 3,
) -> list[AnswerCell]:
    """Fill every (question, mode) cell; per-cell failures are recorded, not fatal."""
    cells: list[AnswerCell] = []
    for question in corpus:
        for mode in modes:
            audit = gateway.audit()
            try:
                answer = run_query(
                    question.text,
                    mode,
                    artifacts,
                    audit,
                    k=k,
                    level=level,
                    budget=budget,
                    top_chunks=top_chunks,
                    rag_k=top_chunks,
                )
                cells.append(
                    AnswerCell(
                        question_id=question.id,
                        mode=mode,
                        answer=answer,
                        fingerprints=tuple(audit.fingerprints),
                    )
                )
            except Exception as exc:  # noqa: BLE001 - the run must continue
                cells.append(
                    AnswerCell(question_id=question.id, mode=mode, error=str(exc))
                )
    return cells


# ---------------------------------------------------------------------------
# judging
# ---------------------------------------------------------------------------

_LABEL_RE = re.compile(r"\bAnswer\s+([A-Z])\b")


def _format_answers(labels: Sequence[str], texts: Sequence[str]) -> str:
    blocks = [f"Answer {label}:\n{text}\n" for label, text in zip(labels, texts)]
    return "\n".join(blocks)


def _parse_winner(response: str, valid: Sequence[str]) -> Optional[str]:
    m = _LABEL_RE.search(response)
    if m and m.group(1) in valid:
        return m.group(1)
    stripped = response.strip()
    if stripped[:1] in valid and (len(stripped) == 1 or not stripped[1].isalnum()):
        return stripped[0]
    return None


def judge(
    question: Question,
    answers_by_mode: dict[str, str],
    metric: str,
    gateway,
    seed: int = 42,
) -> JudgeVerdict:
    """Pick the best answer for one metric under anonymized, shuffled labels."""
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if len(answers_by_mode) < 2:
        raise ValidationError("judging needs at least 2 answers to compare")
    rng = random.Random(f"{seed}:{question.id}:{metric}")
    modes = sorted(answers_by_mode)
    rng.shuffle(modes)
    labels = list(string.ascii_uppercase[: len(modes)])
    label_to_mode = dict(zip(labels, modes))
    variables = {
        "metric_name": metric,
        "metric_definition": METRIC_DEFINITIONS[metric],
        "question": question.text,
        "answers": _format_answers(labels, [answers_by_mode[m] for m in modes]),
    }
    response = gateway.complete("judge_pairwise", variables)
    winner_label = _parse_winner(response, labels)
    if winner_label is None:
        retry = gateway.complete(
            "judge_retry",
            {
                "labels": ", ".join(f"Answer {l}" for l in labels),
                "question": question.text,
                "answers": variables["answers"],
            },
        )
        winner_label = _parse_winner(retry, labels)
        if winner_label is None:
            raise StructuredOutputError(
                f"judge response for question {question.id!r} metric {metric!r} "
                "named no valid answer label after one retry",
                raw=retry,
            )
        response = retry
    return JudgeVerdict(
        question_id=question.id,
        metric=metric,
        winner=label_to_mode[winner_label],
        rationale=response.strip(),
    )


def judge_all(
    corpus: Sequence[Question],
    cells: Sequence[AnswerCell],
    gateway,
    seed: int = 42,
    metrics: Sequence[str] = METRICS,
) -> tuple[list[JudgeVerdict], list[str]]:
    """Judge every question with a complete answer row; incomplete ones are excluded."""
    by_question: dict[str, dict[str, str]] = {}
    failed: set[str] = set()
    for cell in cells:
        if cell.error is not None or cell.answer is None:
            failed.add(cell.question_id)
        else:
            by_question.setdefault(cell.question_id, {})[cell.mode] = cell.answer.text
    verdicts: list[JudgeVerdict] = []
    excluded: list[str] = []
    for question in corpus:
        answers = by_question.get(question.id, {})
        if question.id in failed or len(answers) < 2:
            excluded.append(question.id)
            continue
        for metric in metrics:
            verdicts.append(judge(question, answers, metric, gateway, seed=seed))
    return verdicts, excluded


# ---------------------------------------------------------------------------
# tally
# ---------------------------------------------------------------------------

@dataclass
class WinTable:
    modes: tuple[str, ...]
    metrics: tuple[str, ...]
    wins: dict[str, dict[str, int]] = field(default_factory=dict)

    def total(self, mode: str) -> int:
        return sum(self.wins[mode].values())

    def to_rows(self) -> list[list]:
        rows = []
        for mode in self.modes:
            rows.append(
                [mode, *[self.wins[mode][m] for m in self.metrics], self.total(mode)]
            )
        return rows

    def render_text(self) -> str:
        header = ["mode", *[m[:4] for m in self.metrics], "total"]
        widths = [max(len(str(h)), 12) for h in header]
        lines = ["  ".join(str(h).rjust(w) for h, w in zip(header, widths))]
        for row in self.to_rows():
            lines.append("  ".join(str(c).rjust(w) for c, w in zip(row, widths)))
        return "\n".join(lines)

    def to_csv_text(self) -> str:
        lines = [",".join(["mode", *self.metrics, "total"])]
        for row in self.to_rows():
            lines.append(",".join(str(c) for c in row))
        return "\n".join(lines) + "\n"


def tally(
    verdicts: Sequence[JudgeVerdict],
    modes: Sequence[str] | None = None,
    metrics: Sequence[str] = METRICS,
) -> WinTable:
    """Per-mode win counts per metric; row totals are the row sums."""
    mode_list = (
        tuple(modes)
        if modes is not None
        else tuple(sorted({v.winner for v in verdicts}))
    )
    table = WinTable(
        modes=mode_list,
        metrics=tuple(metrics),
        wins={mode: {metric: 0 for metric in metrics} for mode in mode_list},
    )
    for verdict in verdicts:
        if verdict.winner not in table.wins:
            raise ValidationError(
                f"verdict winner {verdict.winner!r} is not among the tallied modes"
            )
        if verdict.metric not in metrics:
            raise ValidationError(f"verdict metric {verdict.metric!r} is not tallied")
        table.wins[verdict.winner][verdict.metric] += 1
    return table


# ---------------------------------------------------------------------------
# adversarial suite
# ---------------------------------------------------------------------------

def run_adversarial(
    cases: Sequence[AdversarialCase],
    modes: Sequence[str],
    artifacts: Optional[Artifacts],
    gateway,
    grades: dict[tuple[str, str], str] | None = None,
    *,
    k: int = 5,
    level: Optional[int] = None,
    budget: int = 8000,
    top_chunks: int = 3,
) -> list[AdversarialOutcome]:
    """Run each trap prompt against each mode; outcomes come from the grades file."""
    grades = grades or {}
    outcomes: list[AdversarialOutcome] = []
    for case in cases:
        for mode in modes:
            answer = run_query(
                case.prompt,
                mode,
                artifacts,
                gateway,
                k=k,
                level=level,
                budget=budget,
                top_chunks=top_chunks,
                rag_k=top_chunks,
            )
            outcomes.append(
                AdversarialOutcome(
                    case_id=case.id,
                    mode=mode,
                    answer_text=answer.text,
                    declined=answer.declined,
                    outcome=grades.get((case.id, mode)),
                )
            )
    return outcomes


def summarize_adversarial(outcomes: Sequence[AdversarialOutcome]) -> str:
    """Per-mode resisted / accepted / hedged / pending counts as a text table."""
    modes = sorted({o.mode for o in outcomes})
    lines = [
        "  ".join(
            h.rjust(24 if i == 0 else 10)
            for i, h in enumerate(["mode", "resisted", "accepted", "hedged", "pending"])
        )
    ]
    for mode in modes:
        mine = [o for o in outcomes if o.mode == mode]
        resisted = sum(1 for o in mine if o.outcome == "resisted")
        accepted = sum(1 for o in mine if o.outcome == "accepted_false_premise")
        hedged = sum(1 for o in mine if o.outcome == "hedged")
        pending = sum(1 for o in mine if o.outcome is None)
        lines.append(
            "  ".join(
                str(c).rjust(24 if i == 0 else 10)
                for i, c in enumerate([mode, resisted, accepted, hedged, pending])
            )
        )
    return "\n".join(lines)
