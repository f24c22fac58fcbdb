"""Pattern-based subject/verb/object triple extraction.

This is a deliberately simple, fully deterministic extractor driven by a
verb-form lexicon shipped as data. Subjects and objects are taken as whole
noun phrases, pronouns included: pronoun-laden and ambiguous triples are an
accepted property of this graph, not a bug to engineer away. A heavier
extractor can be swapped in behind `TripleExtractor`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Protocol, Sequence

from .ingest import Chunk
from .kg import KnowledgeGraph, Triple

AUXILIARIES = frozenset(
    """am is are was were be been being have has had do does did can could
    will would shall should may might must""".split()
)
NEGATIONS = frozenset({"not", "never"})
PARTICLES = frozenset(
    "up down out off in on over back away around along through".split()
)
COORDINATORS = frozenset({"and", "but", "or", "so", "then", "yet"})
SUBORDINATORS = frozenset(
    """because that when while if since after before although though unless
    until where why whether""".split()
)

_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'\-]*|\d+(?:[:.]\d+)*|[.,;:!?]")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


def load_verb_lexicon() -> frozenset[str]:
    raw = resources.files("storykg.data").joinpath("verbs.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in raw.splitlines()
        if line.strip() and not line.startswith("#")
    )


_DEFAULT_VERBS: frozenset[str] | None = None


def _default_verbs() -> frozenset[str]:
    global _DEFAULT_VERBS
    if _DEFAULT_VERBS is None:
        _DEFAULT_VERBS = load_verb_lexicon()
    return _DEFAULT_VERBS


@dataclass(frozen=True)
class RawTriple:
    head: str
    relation: str
    tail: str


class TripleExtractor(Protocol):
    def __call__(self, sentence: str) -> list[RawTriple]: ...


def _is_verb(token: str, verbs: frozenset[str]) -> bool:
    low = token.lower()
    return low in verbs or low in AUXILIARIES


def _split_clauses(tokens: list[str], verbs: frozenset[str]) -> list[list[str]]:
    """Split on coordinators/semicolons when both sides can host a clause."""
    clauses: list[list[str]] = []
    current: list[str] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        low = tok.lower()
        boundary = False
        if tok == ";":
            boundary = True
        elif tok == "," and i + 1 < len(tokens) and tokens[i + 1].lower() in COORDINATORS:
            boundary = True
            i += 1  # also consume the coordinator
        elif low in COORDINATORS:
            before_has_verb = any(_is_verb(t, verbs) for t in current)
            after_has_verb = any(_is_verb(t, verbs) for t in tokens[i + 1 :])
            boundary = before_has_verb and after_has_verb
        if boundary:
            if current:
                clauses.append(current)
            current = []
        else:
            current.append(tok)
        i += 1
    if current:
        clauses.append(current)
    return clauses


def _trim(tokens: Sequence[str]) -> list[str]:
    out = list(tokens)
    while out and re.fullmatch(r"[.,;:!?]", out[0]):
        out.pop(0)
    while out and re.fullmatch(r"[.,;:!?]", out[-1]):
        out.pop()
    return out


def _clause_triple(clause: list[str], verbs: frozenset[str]) -> RawTriple | None:
    # locate the first verb token that has at least one candidate subject word before it
    verb_start = None
    for i, tok in enumerate(clause):
        if i > 0 and _is_verb(tok, verbs):
            verb_start = i
            break
    if verb_start is None:
        return None
    # extend the verb phrase over auxiliaries, negation, and further verb forms
    j = verb_start
    phrase: list[str] = []
    while j < len(clause):
        low = clause[j].lower()
        if low in NEGATIONS or _is_verb(clause[j], verbs):
            phrase.append(clause[j])
            j += 1
        else:
            break
    # trailing particle belongs to the predicate when an object follows
    if j < len(clause) and clause[j].lower() in PARTICLES and j + 1 < len(clause):
        phrase.append(clause[j])
        j += 1
    subject = _trim(clause[:verb_start])
    while subject and subject[0].lower() in (COORDINATORS | {"then", "well"}):
        subject.pop(0)
    tail_tokens = clause[j:]
    for idx, tok in enumerate(tail_tokens):
        if tok.lower() in SUBORDINATORS:
            tail_tokens = tail_tokens[:idx]
            break
    obj = _trim(tail_tokens)
    if not subject or not obj or all(t.lower() in PARTICLES for t in obj):
        return None
    negated = any(t.lower() in NEGATIONS for t in phrase)
    content = [t for t in phrase if t.lower() not in NEGATIONS]
    # drop leading auxiliaries when a lexical verb follows them
    while len(content) > 1 and content[0].lower() in AUXILIARIES:
        content.pop(0)
    relation = " ".join(t.lower() for t in content)
    if negated:
        relation = "negated:" + relation
    return RawTriple(" ".join(subject), relation, " ".join(obj))


def extract_triples(
    sentence: str, verbs: frozenset[str] | None = None
) -> list[RawTriple]:
    """Extract zero or more (subject, predicate, object) triples from one sentence."""
    if verbs is None:
        verbs = _default_verbs()
    tokens = _WORD_RE.findall(sentence)
    triples: list[RawTriple] = []
    for clause in _split_clauses(tokens, verbs):
        triple = _clause_triple(_trim(clause), verbs)
        if triple is not None:
            triples.append(triple)
    return triples


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_SPLIT_RE.split(text) if s.strip()]


def build_traditional_kg(
    chunks: Iterable[Chunk],
    verbs: frozenset[str] | None = None,
    extractor: TripleExtractor | None = None,
) -> KnowledgeGraph:
    """Aggregate per-sentence extractions into a count-weighted graph.

    Each extracted instance contributes weight 1; identical (head, relation,
    tail) triples aggregate, so a triple's weight is its occurrence count
    across the corpus. A sentence that defeats the extractor simply yields
    nothing; the build never aborts.
    """
    if extractor is None:
        lexicon = verbs if verbs is not None else _default_verbs()
        extractor = lambda s: extract_triples(s, lexicon)  # noqa: E731
    graph = KnowledgeGraph()
    for chunk in chunks:
        for sentence in split_sentences(chunk.text):
            for raw in extractor(sentence):
                try:
                    graph.upsert_triple(
                        Triple(
                            head=raw.head,
                            relation=raw.relation,
                            tail=raw.tail,
                            weight=1.0,
                            evidence=(chunk.id,),
                        )
                    )
                except Exception:  # noqa: BLE001 - a bad triple never stops the build
                    continue
    return graph
