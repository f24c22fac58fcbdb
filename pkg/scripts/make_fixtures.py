"""Write the demo fixture files from fixture_data.py.

Regenerate with:  python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import yaml

from fixture_data import (
    ADVERSARIAL_CASES,
    ADVERSARIAL_GRADES,
    EPISODES,
    PROPER_NOUNS,
    QUESTIONS,
)

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def write_transcript() -> int:
    rows = []
    sequence = 1
    for episode_no, (title, utterances) in enumerate(EPISODES, start=1):
        for i, (speaker, text) in enumerate(utterances):
            start = round(i * 18.0, 1)
            rows.append(
                {
                    "sequence": sequence,
                    "episode": episode_no,
                    "episode_title": title,
                    "start_time": f"{start:.1f}",
                    "end_time": f"{start + 15.0:.1f}",
                    "text": text,
                    "speaker": speaker,
                }
            )
            sequence += 1
    path = FIXTURES / "transcript.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "sequence",
                "episode",
                "episode_title",
                "start_time",
                "end_time",
                "text",
                "speaker",
            ],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
    return len(rows)


def write_config() -> None:
    config = {
        "seed": 42,
        "preprocess": {
            "proper_nouns": PROPER_NOUNS,
            "opening_patterns": ["^This is Crosswire"],
        },
        # the demo corpus is small; shorter chunks keep retrieval meaningful
        "ingest": {"chunk_size": 200},
    }
    (FIXTURES / "fixture_config.yaml").write_text(
        "# Demo corpus configuration: proper nouns and the repeated-opening filter.\n"
        + yaml.safe_dump(config, sort_keys=False),
        encoding="utf-8",
    )


def write_eval_files() -> None:
    (FIXTURES / "question_corpus.json").write_text(
        json.dumps(
            {
                "questions": [
                    {"id": qid, "text": text, "category": category}
                    for qid, text, category in QUESTIONS
                ]
            },
            indent=2,
            ensure_ascii=False,
        )
        + "\n",
        encoding="utf-8",
    )
    (FIXTURES / "adversarial_cases.json").write_text(
        json.dumps({"cases": ADVERSARIAL_CASES}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    (FIXTURES / "adversarial_grades.json").write_text(
        json.dumps({"grades": ADVERSARIAL_GRADES}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    count = write_transcript()
    write_config()
    write_eval_files()
    print(f"wrote transcript.csv ({count} rows), fixture_config.yaml, corpus + adversarial files")
