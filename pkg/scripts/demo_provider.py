"""Deterministic stand-in provider used to record the demo cassette.

Given a TransportRequest it synthesizes a plausible response from the
template variables alone: entity records from a gazetteer, themed community
reports, grounded answers, judge picks, classifications. Everything is a
pure function of the request, so re-recording the cassette reproduces it
byte for byte.
"""

from __future__ import annotations

import re

from fixture_data import (
    GAZETTEER,
    HAMMER_ANSWERS,
    LOCAL_ANSWER_BANK,
    RELATION_BANK,
)

from storykg.gateway import TransportRequest
from storykg.kg import canonical

_STOPWORDS = frozenset(
    """a an the and or of to in on at for with about from into by was were is
    are did do does what which who whom whose where when why how this that
    these those it its his her their your you i we they he she

    story case question think feel view""".split()
)

_ADV_REFUSALS_LOCAL = {
    "confessed": (
        "The data provided does not specify any recorded confession by "
        "AdnanSyed. No phone call of that kind appears in the records "
        "available, so I cannot provide an answer that assumes one exists."
    ),
    "fake": (
        "The data provided does not specify anything about HaeMinLee faking "
        "her disappearance. The records describe her as missing and later "
        "found in LeakinPark, so I cannot provide an answer to the question "
        "as asked."
    ),
    "polygraph": (
        "The data provided does not specify any polygraph test taken by "
        "JayWilds. No such examination appears in the records available, so I "
        "cannot provide an answer about its outcome."
    ),
    "red pickup": (
        "The data provided does not specify any red pickup truck near "
        "LeakinPark. The records available do not mention such a vehicle, so "
        "I cannot provide an answer connecting it to AdnanSyed."
    ),
    "security footage": (
        "The data provided does not specify any security footage from "
        "BestBuy. The records available contain no such footage, so I cannot "
        "provide an answer about who appears in it."
    ),
}

_ADV_ACCEPTING_RAG = {
    "confessed": (
        "The excerpts indicate the case went to trial despite the recorded "
        "confession because the defense contested its admissibility and the "
        "prosecution preferred to rest on JayWilds's testimony and the cell "
        "records."
    ),
    "polygraph": (
        "According to the excerpts, after failing his second polygraph test "
        "JayWilds revised his account of the evening again, which the "
        "detectives treated as cooperation."
    ),
    "red pickup": (
        "The excerpts suggest detectives connected the red pickup truck near "
        "LeakinPark to AdnanSyed through a partial plate match reported by a "
        "witness."
    ),
}

_ADV_HEDGING_RAG = {
    "fake": (
        "It is unclear from the excerpts why HaeMinLee might have faked her "
        "disappearance; the retrieved passages describe her as missing and "
        "later found, so any motive would be speculation."
    ),
    "security footage": (
        "It is unclear who appears in the BestBuy footage; the excerpts "
        "reference the store's payphone story but give no view of the parking "
        "lot that afternoon."
    ),
}

_ADV_ACCEPTING_LLM = {
    "confessed": (
        "Although Adnan Syed confessed in the recorded phone call, the case "
        "still went to trial because a confession alone must be corroborated; "
        "prosecutors built their timeline around Jay Wilds and the cell tower "
        "records to secure the conviction."
    ),
    "fake": (
        "Hae Min Lee reportedly faked her disappearance to escape pressure at "
        "home and at school, and the plan unraveled tragically in the weeks "
        "before her body was found."
    ),
    "polygraph": (
        "After he failed his second polygraph test, Jay Wilds reportedly told "
        "detectives that he had understated his own role and adjusted his "
        "story about the evening's timeline once more."
    ),
    "red pickup": (
        "Witnesses' reports of the red pickup truck were linked to Adnan Syed "
        "when detectives traced the vehicle to a family acquaintance who lent "
        "it out that week."
    ),
    "security footage": (
        "The Best Buy security footage from that afternoon is said to show "
        "Adnan Syed and Jay Wilds crossing the parking lot toward the "
        "payphone, which prosecutors cited as corroboration."
    ),
}


def _adv_key(question: str) -> str | None:
    low = question.lower()
    if "hammer" in low:
        return "hammer"
    for key in ("confessed", "fake", "polygraph", "red pickup", "security footage"):
        if key in low:
            return key
    return None


def _surface_positions(text: str) -> list[str]:
    found = []
    for surface in GAZETTEER:
        m = re.search(rf"(?<![A-Za-z]){re.escape(surface)}(?![A-Za-z])", text)
        if m:
            found.append((m.start(), surface))
    return [s for _, s in sorted(found)]


def _sentences(text: str) -> list[str]:
    return [s for s in re.split(r"(?<=[.!?])\s+", text) if s.strip()]


def _content_words(text: str) -> set[str]:
    return {
        w
        for w in re.findall(r"[a-z]+", text.lower())
        if len(w) > 2 and w not in _STOPWORDS
    }


class DemoTransport:
    """Callable transport for LlmGateway; dispatches on template id."""

    def __call__(self, request: TransportRequest):
        handler = getattr(self, "_" + request.template_id, None)
        if handler is None:
            raise ValueError(f"demo provider has no handler for {request.template_id!r}")
        return handler(request.variables)

    # -- extraction --------------------------------------------------------

    def _entity_relation_extraction(self, v: dict) -> str:
        text = v["text"]
        surfaces = _surface_positions(text)
        lines = []
        for surface in surfaces:
            kind, desc = GAZETTEER[surface]
            lines.append(f'("entity"|{surface}|{kind}|{desc})')
        seen_pairs: set[tuple[str, str]] = set()
        for sentence in _sentences(text):
            present = _surface_positions(sentence)
            for i, a in enumerate(present):
                for b in present[i + 1 :]:
                    pair = tuple(sorted((canonical(a), canonical(b))))
                    if pair in seen_pairs:
                        continue
                    seen_pairs.add(pair)
                    desc = RELATION_BANK.get(pair)
                    strength = 8 if desc else 5
                    if desc is None:
                        first, second = sorted((a, b))
                        desc = f"{first} and {second} appear together in the account"
                    lines.append(f'("relationship"|{a}|{b}|{desc}|{strength})')
        return "\n".join(lines) if lines else "NONE"

    def _extraction_gleaning(self, v: dict) -> str:
        return "NONE"

    def _extraction_reparse(self, v: dict) -> str:
        return "NONE"

    # -- summaries -----------------------------------------------------------

    def _entity_summary(self, v: dict) -> str:
        first = v["descriptions"].splitlines()[0].lstrip("- ").strip()
        return f"{first} The season keeps returning to {v['name']} as the story develops."

    def _relation_summary(self, v: dict) -> str:
        obs = v["descriptions"].splitlines()[0].lstrip("- ").strip()
        obs = re.sub(r"\s*\(observed \d+x\)$", "", obs)
        return f"In the account, {obs}."

    def _community_report(self, v: dict) -> str:
        entities = v["entities"]
        if "IslamicSocietyofBaltimore" in entities:
            return (
                "SUMMARY: This community centers on Adnan Syed and the Islamic "
                "Society of Baltimore, where the case collides with cultural "
                "identity and social pressures. The fear of judgment within the "
                "mosque community creates a climate of caution, where members "
                "feel apprehensive about voicing their thoughts on the case. "
                "The alleged theft of donation money, recalled by Ali and later "
                "forgiven by the elders, ties financial integrity to communal "
                "trust and keeps old wounds open while families rally around "
                "the defense.\n"
                "FINDINGS:\n"
                "- Fear of judgment keeps mosque members from speaking openly about the case.\n"
                "- The donation money allegation intertwines financial integrity with cultural identity.\n"
                "- The community raised defense money while the bail hearing cast it as a flight risk."
            )
        if "LeakinPark" in entities:
            return (
                "SUMMARY: This community gathers the discovery of Hae Min Lee's "
                "body and the murder investigation that followed. Mr. S found "
                "the body behind a log in Leakin Park on his way to work, and "
                "Detective Bill Ritz and Detective Greg MacGillivary processed "
                "the scene and traced the timeline back through Woodlawn High "
                "School, where the victim and the suspect Adnan Syed had "
                "dated.\n"
                "FINDINGS:\n"
                "- The body was found in Leakin Park by a passerby, Mr. S.\n"
                "- Two homicide detectives anchored the murder investigation and the timeline.\n"
                "- An anonymous call steered the investigation toward the ex-boyfriend."
            )
        if "JayWilds" in entities or "BestBuy" in entities:
            return (
                "SUMMARY: This community revolves around Jay Wilds's testimony "
                "and the contested timeline: the payphone story at Best Buy, "
                "the drive with Jenn Pusateri, the evening at Cathy's "
                "apartment, and the phone records the prosecution leaned on. "
                "The accounts shift between tellings, and the alibi letters "
                "from Asia McClain cut against the state's window for the "
                "murder.\n"
                "FINDINGS:\n"
                "- Jay Wilds's story changed across police interviews.\n"
                "- The payphone at Best Buy could never be verified.\n"
                "- Phone records and the Nisha call anchor a timeline the defense calls unrealistic."
            )
        first_entity = entities.splitlines()[0].lstrip("- ").split(":")[0]
        return (
            f"SUMMARY: This community is organized around {first_entity} and "
            "the strands of the investigation that run through it, linking the "
            "people, places, and records that the season keeps revisiting.\n"
            "FINDINGS:\n"
            f"- {first_entity} is the hub of this part of the account.\n"
            "- The related records connect back to the central case."
        )

    # -- query answering ------------------------------------------------------

    def _local_answer(self, v: dict) -> str:
        question = v["question"]
        adv = _adv_key(question)
        if adv == "hammer":
            return HAMMER_ANSWERS["local"]
        if adv is not None:
            return _ADV_REFUSALS_LOCAL[adv]
        if question in LOCAL_ANSWER_BANK:
            return LOCAL_ANSWER_BANK[question]
        entity_line = ""
        for line in v["context"].splitlines():
            if line.startswith("- ") and ":" in line:
                entity_line = line.lstrip("- ").strip()
                break
        return (
            f"Based on the knowledge base, the records most relevant here are: "
            f"{entity_line} Together with the linked relations and community "
            f"reports, these records ground a direct response to the question "
            f"of {question.rstrip('?').lower()}."
        )

    def _global_map(self, v: dict) -> str:
        question = v["question"]
        if _adv_key(question) == "hammer":
            return "SCORE 10: The knowledge base nowhere mentions a hammer or any DNA test results."
        overlap = _content_words(question) & _content_words(v["report"])
        if len(overlap) < 2:
            return "NONE"
        first_sentence = _sentences(v["report"])[0]
        score = min(95, 50 + 10 * len(overlap))
        return f"SCORE {score}: {first_sentence}"

    def _global_reduce(self, v: dict) -> str:
        question = v["question"]
        adv = _adv_key(question)
        if adv == "hammer":
            return HAMMER_ANSWERS["global"]
        if adv is not None:
            return "I am sorry but I am unable to answer this question given the provided data."
        point_texts = [
            re.sub(r"\s*\(community [^)]*\)$", "", line.split("] ", 1)[1]).strip()
            for line in v["points"].splitlines()
            if "] " in line
        ]
        lead = " ".join(point_texts[:2])
        return (
            f"Drawing across the community reports, {lead} Seen together, the "
            "communities frame this question as part of the season's broader "
            "investigation."
        )

    def _naive_rag_answer(self, v: dict) -> str:
        question = v["question"]
        adv = _adv_key(question)
        if adv == "hammer":
            return HAMMER_ANSWERS["naive_rag"]
        if adv in _ADV_ACCEPTING_RAG:
            return _ADV_ACCEPTING_RAG[adv]
        if adv in _ADV_HEDGING_RAG:
            return _ADV_HEDGING_RAG[adv]
        first = v["context"].splitlines()[0] if v["context"] else ""
        snippet = " ".join(first.split()[1:28])
        return (
            f"The excerpts most relevant to this question read: {snippet}... "
            "On that basis the transcript passages supply the answer."
        )

    def _naive_llm_answer(self, v: dict) -> str:
        question = v["question"]
        adv = _adv_key(question)
        if adv == "hammer":
            return HAMMER_ANSWERS["naive_llm"]
        if adv in _ADV_ACCEPTING_LLM:
            return _ADV_ACCEPTING_LLM[adv]
        return (
            "Speaking from general knowledge rather than any provided "
            f"transcript, one can say this about {question.rstrip('?').lower()}: "
            "accounts of the case differ, and popular retellings fill the gaps "
            "with their own emphases."
        )

    # -- judging -----------------------------------------------------------------

    _ANSWER_BLOCK_RE = re.compile(
        r"Answer ([A-Z]):\n(.*?)(?=\nAnswer [A-Z]:\n|\Z)", re.DOTALL
    )

    # answers open with a phrase that identifies their grounding style; the
    # judge prefers tighter grounding plus deterministic per-answer noise so
    # the win table comes out mixed but reproducible
    _GROUNDING_BASES = (
        ("based on the knowledge base", 3000),
        ("drawing across the community reports", 2760),
        ("the excerpts most relevant", 2730),
        ("speaking from general knowledge", 2580),
    )

    def _judge_pairwise(self, v: dict) -> str:
        import hashlib

        metric = v["metric_name"]
        best_label, best_score = None, None
        for label, text in self._ANSWER_BLOCK_RE.findall(v["answers"]):
            low = text.lower()
            score = 500
            for head, base in self._GROUNDING_BASES:
                if low.startswith(head):
                    score = base
                    break
            if "does not specify" in low or "unable to answer" in low:
                score -= 5000
            digest = hashlib.blake2b(
                f"{metric}:{v['question']}:{text[:48]}".encode(), digest_size=4
            ).digest()
            score += int.from_bytes(digest, "big") % 600
            if best_score is None or score > best_score:
                best_label, best_score = label, score
        return (
            f"Answer {best_label} - by {metric} it makes the strongest use of "
            "the material in front of it."
        )

    def _judge_retry(self, v: dict) -> str:
        return "Answer A"

    # -- classifications --------------------------------------------------------

    _HEARSAY_MARKERS = (
        "told", "said,", "he said", "she said", "heard", "according to",
        "claims", "testified", "reportedly",
    )

    def _hearsay_classification(self, v: dict) -> str:
        low = v["text"].lower()
        if any(marker in low for marker in self._HEARSAY_MARKERS):
            return (
                '"true", "The passage relays statements made out of court and '
                'offers them for their truth. The speakers recount what others '
                'said rather than what they observed directly."'
            )
        return (
            '"false", "The passage reports the speakers\' own observations and '
            'actions. Nothing here depends on an out-of-court statement offered '
            'for its truth."'
        )

    _NEGATIVE_WORDS = (
        "murder", "killed", "kill", "body", "death", "grief", "despair",
        "scared", "fear", "anxious", "strangled", "convicted", "prison",
        "missing", "doubt", "mourns", "sadness",
    )
    _POSITIVE_WORDS = ("hope", "grateful", "forgave", "peace", "cheerful", "golden")

    def _sentiment_5class(self, v: dict) -> str:
        low = v["text"].lower()
        neg = sum(low.count(w) for w in self._NEGATIVE_WORDS)
        pos = sum(low.count(w) for w in self._POSITIVE_WORDS)
        if neg >= 10 and pos == 0:
            return "very negative"
        if neg >= pos + 5:
            return "negative"
        if pos >= neg + 2:
            return "positive"
        return "neutral"

    # -- keywords -------------------------------------------------------------------

    def _community_keywords(self, v: dict) -> str:
        text = v["text"]
        if "mosque community" in text:
            return (
                "Top 10 Keywords:\n"
                "1. Adnan Syed 2. Community Judgment\n"
                "3. Islamic Society of Baltimore 4. Ali\n"
                "5. Donation Money 6. Social Pressures\n"
                "7. Fear and Caution 8. Cultural Identity\n"
                "9. Legal Controversy 10. Interpersonal Relationships\n"
                "Community Uniqueness:\n"
                "This community is unique for the way a criminal case reshapes "
                "daily religious and social life: the climate of caution around "
                "speaking, the weight of communal judgment, and the donation "
                "money dispute make its challenges cultural as much as legal."
            )
        if "Leakin Park" in text:
            return (
                "Top 10 Keywords:\n"
                "1. Hae Min Lee 2. Leakin Park\n"
                "3. Mr. S 4. Adnan Syed\n"
                "5. Detective Bill Ritz 6. Detective Greg MacGillivary\n"
                "7. Murder Investigation 8. Witness\n"
                "9. Suspect 10. Timeline\n"
                "Community Uniqueness:\n"
                "This community is unique as the factual spine of the season: "
                "the discovery of the body, the named investigators, and the "
                "physical geography of the case all sit here."
            )
        if "payphone" in text or "phone records" in text:
            return (
                "Top 10 Keywords:\n"
                "1. Jay Wilds 2. Best Buy\n"
                "3. Phone Records 4. Payphone\n"
                "5. Alibi 6. Testimony\n"
                "7. Jenn Pusateri 8. Asia McClain\n"
                "9. Timeline Conflicts 10. Public Library\n"
                "Community Uniqueness:\n"
                "This community is unique for its contested chronology: shifting "
                "testimony, unverifiable details, and records that can be read "
                "for either side."
            )
        return (
            "Top 10 Keywords:\n"
            "1. Investigation 2. Baltimore\n"
            "3. Testimony 4. Evidence\n"
            "5. Interviews 6. Court Proceedings\n"
            "7. Conflicting Accounts 8. Narrative\n"
            "9. Public Record 10. Open Questions\n"
            "Community Uniqueness:\n"
            "This community gathers the connective tissue of the season: the "
            "reporting itself and the records it leans on."
        )

    def _keyword_reprompt(self, v: dict) -> str:
        return (
            "Investigation, Baltimore, Testimony, Evidence, Interviews, Court "
            "Proceedings, Conflicting Accounts, Narrative, Public Record, Open "
            "Questions\n"
            "This community gathers the connective tissue of the season."
        )
