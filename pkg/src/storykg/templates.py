"""Built-in prompt templates.

Placeholders are written as {name} and substituted verbatim. The hearsay
and keyword templates are fixed texts the downstream parsers depend on;
the remaining templates are this tool's own wording and are editable via
`register_template` without touching any parser contract.
"""

from __future__ import annotations

import re

from .errors import TemplateError

HEARSAY_TEMPLATE = """For the following text, determine whether it is hearsay or not. Provide the classification in the following format: "true or false", "two sentence explanation". Make sure to provide the classification in quotation marks first, followed by a comma and a space, and then provide the explanation in quotation marks.

Criteria:
- Hearsay: A statement made outside of court that is used to prove the truth of the matter asserted in the statement. Example: A witness testifies that they heard someone else say, "I saw the defendant at the scene of the crime."
- Not Hearsay: A statement based on the witness's own observations or knowledge, and not used to prove the truth of another person's statement. Example: A witness says, "I saw the defendant at the scene of the crime." This is not hearsay because the witness is providing testimony based on their direct observations, rather than relaying statements made by others.

Text to be classified: {text}"""

KEYWORD_TEMPLATE = """Generate the top 10 keywords based on the following text:

Instructions:
- Pay attention to critical locations and time information, and avoid irrelevant keywords.
- Do not include any keywords related to the Serial Podcast.
- Ensure that the keywords are distinct from each other and are suitable for various communities with different focuses.

After listing the 10 keywords, briefly describe how that community is unique compared to the others based on the provided information and context.

Text:
{text}"""

_TEMPLATES: dict[str, str] = {
    "hearsay_classification": HEARSAY_TEMPLATE,
    "community_keywords": KEYWORD_TEMPLATE,
    "sentiment_5class": (
        "Classify the overall sentiment of the following text as exactly one of: "
        "very negative, negative, neutral, positive, very positive. "
        "Respond with only the class label.\n\nText: {text}"
    ),
    "entity_relation_extraction": (
        "You are building a knowledge graph from a transcript excerpt. Identify "
        "the named entities (people, organizations, locations, events, objects of "
        "evidence) and the relationships between them.\n"
        "For each entity output one line:\n"
        '("entity"|<name>|<type>|<one-sentence description>)\n'
        "For each relationship output one line:\n"
        '("relationship"|<source entity>|<target entity>|<description of the '
        "relationship>|<strength 1-10>)\n"
        "Output only these records, one per line. If nothing can be extracted, "
        "output NONE.\n\nText:\n{text}"
    ),
    "extraction_gleaning": (
        "Earlier extraction passes over this text found the entities: "
        "{known_entities}.\n"
        "Identify any entities or relationships that were MISSED. Use the same "
        "record format, one per line:\n"
        '("entity"|<name>|<type>|<one-sentence description>)\n'
        '("relationship"|<source entity>|<target entity>|<description>|<strength '
        "1-10>)\n"
        "If nothing was missed, output NONE.\n\nText:\n{text}"
    ),
    "extraction_reparse": (
        "Your previous reply could not be parsed. Re-emit the extraction strictly "
        "as records, one per line, using exactly:\n"
        '("entity"|NAME|TYPE|DESCRIPTION)\n'
        '("relationship"|SOURCE|TARGET|DESCRIPTION|STRENGTH)\n'
        "with no other text. If there is nothing to extract, output NONE.\n\n"
        "Previous reply:\n{previous}\n\nText:\n{text}"
    ),
    "entity_summary": (
        "Write a concise two-sentence summary of the entity {name} based on "
        "these observations from the source text:\n{descriptions}"
    ),
    "relation_summary": (
        "Summarize in one sentence the relationship between {head} and {tail} "
        "based on these observations:\n{descriptions}"
    ),
    "community_report": (
        "You are writing a report on a community of closely related entities "
        "from a knowledge graph.\n\nEntities:\n{entities}\n\n"
        "Relationships:\n{relations}\n\n"
        "Write your report in exactly this format:\n"
        "SUMMARY: <one paragraph describing the community>\n"
        "FINDINGS:\n- <key finding>\n- <key finding>"
    ),
    "local_answer": (
        "Answer the question using only the context below. If the context does "
        "not contain the information needed, reply that the data provided does "
        "not specify the answer; do not guess or draw on outside knowledge.\n\n"
        "Context:\n{context}\n\nQuestion: {question}\n\nAnswer:"
    ),
    "global_map": (
        "From the community report below, extract up to 3 points that help "
        "answer the question. Output one point per line as:\n"
        "SCORE <0-100>: <point>\n"
        "where the score rates how helpful the point is. If the report contains "
        "nothing relevant, output NONE.\n\n"
        "Report:\n{report}\n\nQuestion: {question}"
    ),
    "global_reduce": (
        "Synthesize a final answer to the question from the ranked points below, "
        "using only these points. If the points are insufficient, reply that you "
        "are unable to answer this question given the provided data.\n\n"
        "Points:\n{points}\n\nQuestion: {question}\n\nAnswer:"
    ),
    "naive_rag_answer": (
        "Answer the question using only the transcript excerpts below. If they "
        "do not contain the information needed, reply that the data provided "
        "does not specify the answer.\n\n"
        "Excerpts:\n{context}\n\nQuestion: {question}\n\nAnswer:"
    ),
    "naive_llm_answer": "{question}",
    "judge_pairwise": (
        "You are judging several answers to the same question.\n"
        "Metric: {metric_name} - {metric_definition}\n\n"
        "Question: {question}\n\n{answers}\n"
        "Which answer is best by this metric alone? You must choose exactly one, "
        "even if the answers are close. Reply with the winning answer label "
        '(for example "Answer B") followed by a one-sentence rationale.'
    ),
    "judge_retry": (
        "Your previous reply did not name a valid answer label. The labels are: "
        "{labels}.\n\nQuestion: {question}\n\n{answers}\n"
        "Reply with exactly one label from the list above and nothing else."
    ),
    "keyword_reprompt": (
        "Your previous reply did not contain exactly 10 distinct keywords. "
        "List exactly 10 distinct keywords on one line, separated by commas. "
        "On the following line, briefly describe how this community is unique.\n\n"
        "Text:\n{text}"
    ),
}

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")


def template_ids() -> list[str]:
    return sorted(_TEMPLATES)


def get_template(template_id: str) -> str:
    try:
        return _TEMPLATES[template_id]
    except KeyError:
        raise TemplateError(f"unknown template: {template_id!r}") from None


def register_template(template_id: str, text: str) -> None:
    _TEMPLATES[template_id] = text


def render_template(template_id: str, variables: dict[str, str]) -> str:
    """Substitute placeholders verbatim; an unbound placeholder is an error."""
    template = get_template(template_id)

    def sub(match: re.Match[str]) -> str:
        name = match.group(1)
        if name not in variables:
            raise TemplateError(
                f"template {template_id!r} placeholder {{{name}}} is unbound"
            )
        return str(variables[name])

    return _PLACEHOLDER_RE.sub(sub, template)
