from __future__ import annotations

import math
import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from storykg.analytics import (
    Crosstab,
    HearsayRecord,
    KeywordReport,
    classify_hearsay,
    classify_sentiment_5,
    crosstab_hearsay_sentiment,
    extract_keywords,
    load_lexicon,
    parse_hearsay_response,
    parse_sentiment_class,
    rolling_average,
    score_segments,
    sentiment_score,
    smooth_series,
    write_sentiment_csv,
    write_sentiment_svg,
)
from storykg.builder import CommunityReport
from storykg.changepoint import ChangePointSet
from storykg.errors import ConfigError, StructuredOutputError, ValidationError
from storykg.ingest import SegmentLabel

LEXICON = load_lexicon()


class TestSentiment:
    def test_empty_text_zero(self):
        assert sentiment_score("", LEXICON) == 0.0

    def test_all_neutral_zero(self):
        assert sentiment_score("the chair sat near the window", LEXICON) == 0.0

    def test_good_hand_value(self):
        # lexicon valence 1.9 squashed by x / sqrt(x^2 + 15)
        expected = 1.9 / math.sqrt(1.9**2 + 15)
        assert sentiment_score("good", LEXICON) == pytest.approx(expected, abs=1e-9)
        assert sentiment_score("good", LEXICON) == pytest.approx(0.440, abs=1e-3)

    def test_negation_flips(self):
        assert sentiment_score("not good", LEXICON) < 0 < sentiment_score("good", LEXICON)

    def test_negation_window_three_words(self):
        flipped = sentiment_score("not at all good", LEXICON)
        assert flipped < 0
        out_of_window = sentiment_score("not a thing about that good", LEXICON)
        assert out_of_window > 0

    def test_booster_intensifies(self):
        assert sentiment_score("very good", LEXICON) > sentiment_score("good", LEXICON)
        assert sentiment_score("slightly good", LEXICON) < sentiment_score("good", LEXICON)

    def test_caps_emphasis(self):
        assert sentiment_score("this is GOOD news", LEXICON) > sentiment_score(
            "this is good news", LEXICON
        )

    def test_all_caps_text_no_differential(self):
        assert sentiment_score("THIS IS GOOD NEWS", LEXICON) == sentiment_score(
            "this is good news", LEXICON
        )

    def test_exclamation_emphasis(self):
        assert sentiment_score("good!", LEXICON) > sentiment_score("good", LEXICON)
        assert sentiment_score("bad!", LEXICON) < sentiment_score("bad", LEXICON)

    def test_bounds_on_random_noise(self):
        rng = random.Random(0)
        alphabet = string.ascii_letters + "  !?.,'"
        for _ in range(500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80)))
            assert -1.0 <= sentiment_score(text, LEXICON) <= 1.0

    @given(st.text(max_size=200))
    def test_bounds_property(self, text):
        assert -1.0 <= sentiment_score(text, LEXICON) <= 1.0

    def test_missing_lexicon_file(self):
        with pytest.raises(ConfigError):
            load_lexicon("/nonexistent/lexicon.txt")

    def test_series_scoring_keeps_order(self):
        labeled = [
            (SegmentLabel(1, 1), "good"),
            (SegmentLabel(1, 2), "bad"),
            (SegmentLabel(1, 3), ""),
        ]
        series = score_segments(labeled, LEXICON)
        assert [l.rendered for l, _ in series.points] == ["1_1", "1_2", "1_3"]
        assert series.points[0][1] > 0 > series.points[1][1]
        assert series.points[2][1] == 0.0


class TestRolling:
    def test_window_one_identity(self):
        values = [3.0, -1.0, 2.0]
        assert rolling_average(values, 1) == values

    def test_constant_unchanged(self):
        assert rolling_average([2.5] * 12, 10) == [2.5] * 12

    def test_hand_computed_spike(self):
        out = rolling_average([0, 0, 10, 0, 0], 3)
        assert out == [0.0, 10 / 3, 10 / 3, 10 / 3, 0.0]

    def test_window_validation(self):
        with pytest.raises(ValidationError):
            rolling_average([1.0, 2.0], 0)
        with pytest.raises(ValidationError):
            rolling_average([1.0, 2.0], 3)

    @given(
        st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=40),
        st.integers(min_value=1, max_value=40),
    )
    def test_length_preserved(self, values, window):
        if window <= len(values):
            assert len(rolling_average(values, window)) == len(values)

    def test_smooth_series_wraps(self):
        labeled = [(SegmentLabel(1, i + 1), "good") for i in range(12)]
        series = smooth_series(score_segments(labeled, LEXICON), window=10)
        assert series.smoothed is not None
        assert len(series.smoothed) == 12


class TestHearsayParsing:
    def test_strict_format_true(self):
        verdict, explanation = parse_hearsay_response(
            '"true", "The speaker relays another person\'s claim. It is offered for its truth."'
        )
        assert verdict is True
        assert explanation.startswith("The speaker relays")

    def test_strict_format_false(self):
        verdict, explanation = parse_hearsay_response('"false", "Direct observation. Not relayed."')
        assert verdict is False
        assert explanation == "Direct observation. Not relayed."

    def test_lenient_fallback(self):
        verdict, explanation = parse_hearsay_response(
            "I would say this is True because the witness repeats a rumor."
        )
        assert verdict is True
        assert "witness repeats a rumor" in explanation

    def test_unparseable_raises_with_raw(self):
        with pytest.raises(StructuredOutputError) as err:
            parse_hearsay_response("no classification given here")
        assert err.value.raw == "no classification given here"

    def test_classify_through_gateway(self, fake_gateway_factory):
        gateway, transport = fake_gateway_factory(
            {"hearsay_classification": '"true", "Relayed claim. Offered for truth."'}
        )
        verdict, _ = classify_hearsay("chunk-0001", "He said she left.", gateway)
        assert verdict is True
        prompt = transport.requests[0].prompt
        assert prompt.endswith("Text to be classified: He said she left.")


class TestSentimentClass:
    def test_plain_label(self):
        assert parse_sentiment_class("neutral") == "neutral"

    def test_case_and_punctuation_tolerant(self):
        assert parse_sentiment_class("Very Negative.") == "very_negative"
        assert parse_sentiment_class("  POSITIVE! ") == "positive"

    def test_unknown_label_rejected(self):
        with pytest.raises(StructuredOutputError):
            parse_sentiment_class("mixed")

    def test_through_gateway(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory({"sentiment_5class": "very positive"})
        assert classify_sentiment_5("lovely", gateway) == "very_positive"


def hr(chunk_id, hearsay, sentiment):
    return HearsayRecord(chunk_id, hearsay, "why", sentiment)


class TestCrosstab:
    def test_hand_counted_case(self):
        records = [
            hr("c1", True, "negative"),
            hr("c2", True, "neutral"),
            hr("c3", False, "neutral"),
            hr("c4", False, "neutral"),
        ]
        table = crosstab_hearsay_sentiment(records)
        assert table.percentages("hearsay")["negative"] == 50.0
        assert table.percentages("hearsay")["neutral"] == 50.0
        assert table.percentages("not_hearsay")["neutral"] == 100.0
        assert table.row_total("not_hearsay") == 2

    def test_all_hearsay_leaves_empty_row(self):
        records = [hr("c1", True, "negative")]
        table = crosstab_hearsay_sentiment(records)
        assert table.row_total("not_hearsay") == 0
        assert all(v == 0.0 for v in table.percentages("not_hearsay").values())

    def test_empty_input(self):
        table = crosstab_hearsay_sentiment([])
        assert table.row_total("hearsay") == 0

    def test_row_percentages_sum_to_100(self):
        rng = random.Random(1)
        classes = ["very_negative", "negative", "neutral", "positive", "very_positive"]
        records = [
            hr(f"c{i}", rng.random() < 0.6, rng.choice(classes)) for i in range(57)
        ]
        table = crosstab_hearsay_sentiment(records)
        for row in ("hearsay", "not_hearsay"):
            if table.row_total(row):
                assert sum(table.percentages(row).values()) == pytest.approx(100.0, abs=0.1)
                rendered = [float(x) for x in _rendered_row(table, row)]
                assert sum(rendered) == pytest.approx(100.0, abs=0.1)

    def test_csv_and_text_outputs(self, tmp_path):
        table = crosstab_hearsay_sentiment([hr("c1", True, "neutral")])
        table.to_csv(tmp_path / "ct.csv")
        body = (tmp_path / "ct.csv").read_text()
        assert body.startswith("group,very_negative")
        assert "hearsay,0.0,0.0,100.0,0.0,0.0,1" in body
        assert "100.0%" in table.render_text()


def _rendered_row(table: Crosstab, row: str) -> list[str]:
    pct = table.percentages(row)
    return [f"{pct[c]:.1f}" for c in ("very_negative", "negative", "neutral", "positive", "very_positive")]


def report(summary="A community about the park.", findings=("one", "two")):
    return CommunityReport(
        community_id="L1C0",
        level=1,
        member_entities=("a", "b"),
        summary=summary,
        key_findings=tuple(findings),
    )


NUMBERED = (
    "Top 10 Keywords:\n1. Hae Min Lee 2. Leakin Park\n3. Mr. S 4. Adnan Syed\n"
    "5. Detective Bill Ritz 6. Detective Greg MacGillivary\n7. Murder Investigation 8. Witness\n"
    "9. Suspect 10. Timeline\nCommunity Uniqueness:\nThe factual spine of the season."
)


class TestKeywords:
    def test_numbered_inline_format(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory({"community_keywords": NUMBERED})
        result = extract_keywords(report(), gateway)
        assert len(result.keywords) == 10
        assert "Leakin Park" in result.keywords
        assert "Murder Investigation" in result.keywords
        assert "factual spine" in result.uniqueness_note

    def test_comma_list_format(self, fake_gateway_factory):
        response = (
            "alpha, beta, gamma, delta, epsilon, zeta, eta, theta, iota, kappa\n"
            "A distinctive community."
        )
        gateway, _ = fake_gateway_factory({"community_keywords": response})
        result = extract_keywords(report(), gateway)
        assert result.keywords == (
            "alpha", "beta", "gamma", "delta", "epsilon",
            "zeta", "eta", "theta", "iota", "kappa",
        )
        assert result.uniqueness_note == "A distinctive community."

    def test_reprompt_then_error_on_nine_keywords(self, fake_gateway_factory):
        nine = "a, b, c, d, e, f, g, h, i\nnote"
        gateway, transport = fake_gateway_factory(
            {"community_keywords": nine, "keyword_reprompt": nine}
        )
        with pytest.raises(StructuredOutputError, match="exactly 10"):
            extract_keywords(report(), gateway)
        assert transport.calls_for("keyword_reprompt") == 1

    def test_reprompt_recovers(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory(
            {
                "community_keywords": "not a list at all",
                "keyword_reprompt": "a, b, c, d, e, f, g, h, i, j\nrecovered note",
            }
        )
        result = extract_keywords(report(), gateway)
        assert len(result.keywords) == 10
        assert result.uniqueness_note == "recovered note"

    def test_duplicate_keywords_rejected(self, fake_gateway_factory):
        dupes = "a, a, b, c, d, e, f, g, h, i\nnote"
        gateway, _ = fake_gateway_factory(
            {"community_keywords": dupes, "keyword_reprompt": dupes}
        )
        with pytest.raises(StructuredOutputError):
            extract_keywords(report(), gateway)

    def test_distinctness_invariant(self):
        with pytest.raises(TypeError):
            KeywordReport("L1C0", ("a",) * 10)  # missing note argument as well


class TestExports:
    def test_sentiment_csv_and_svg(self, tmp_path):
        labeled = [(SegmentLabel(1, i + 1), ["good", "bad"][i % 2]) for i in range(6)]
        series = smooth_series(score_segments(labeled, LEXICON), window=3)
        cps = ChangePointSet(indices=(3,), penalty=1.0)
        csv_path = tmp_path / "s.csv"
        svg_path = tmp_path / "s.svg"
        write_sentiment_csv(series, cps, csv_path)
        write_sentiment_svg(series, cps, svg_path)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "label,raw,smoothed,is_changepoint"
        assert len(lines) == 7
        assert lines[4].endswith(",1")  # index 3 flagged
        svg = svg_path.read_text()
        assert "<polyline" in svg and "change-point" in svg
