import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpkit.exceptions import (BadTemplate, MixedTargetLanguage, NeedTriplets, NoTargetSegment,
                               UnknownLanguage, UnparsableRating)
from ldpkit.prompt import (XLT_MARKER, DocSumExemplar, Exemplar, PivotTriplet, TagStyle,
                           build_e2x_prompt, build_judge_prompt, build_pair_prompt,
                           build_pivot_prompt, build_sum_prompt, build_x2e_prompt,
                           build_xlt_sum_prompt, label_lines, parse_pivot_completion,
                           parse_rating, parse_summary, parse_translation, render_pair)

from golden_cases import BT_IG, FR_ONLY, GOLDEN, LDP_SEEDS, TRIPLETS, cases

CASES = cases()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    prompt, _, _ = CASES[name]
    assert prompt.text.encode("utf-8") == (GOLDEN / f"{name}.txt").read_bytes()


@pytest.mark.parametrize("name", sorted(CASES))
def test_label_count(name):
    prompt, k, kind = CASES[name]
    # the open test label and its input line both count
    expected = 2 * k + 2 if kind == "pair" else 3 * k + 2
    assert label_lines(prompt.text) == expected


def test_render_pair_examples():
    assert render_pair(FR_ONLY[0]) == "French: Je suis désolé\nEnglish: I'm sorry"
    es = Exemplar("Hola", "你好", "es", "zh")
    assert render_pair(es, TagStyle.NATIVE) == "Española: Hola\n中文: 你好"
    assert render_pair(es, TagStyle.NONE) == "Input: Hola\nOutput: 你好"


def test_render_unknown_language():
    with pytest.raises(UnknownLanguage):
        render_pair(Exemplar("a", "b", "xx", "en"))
    with pytest.raises(UnknownLanguage):
        render_pair(Exemplar("a", "b", "xx", "en"), TagStyle.NONE)


def test_x2e_examples():
    p = build_x2e_prompt(FR_ONLY, "Ịmụ igwe", "ig")
    assert p.text == "French: Je suis désolé\nEnglish: I'm sorry\nIgbo: Ịmụ igwe\nEnglish:"
    assert p.stop == ("\n",) and p.expected_lang == "en"
    assert build_x2e_prompt([], "x", "ig").text == "Igbo: x\nEnglish:"
    with pytest.raises(MixedTargetLanguage):
        build_x2e_prompt([BT_IG[0]], "x", "ig")


def test_e2x_examples():
    p = build_e2x_prompt(BT_IG[:1], "Machine learning", "ig")
    assert p.text == "English: Air ticket\nIgbo: Tiketi ụgbọ elu\nEnglish: Machine learning\nIgbo:"
    assert p.expected_lang == "ig"
    assert build_e2x_prompt([], "x", "mr", TagStyle.NATIVE).text == "English: x\nमराठी:"
    sw = Exemplar("Good morning", "Habari za asubuhi", "en", "sw")
    with pytest.raises(MixedTargetLanguage):
        build_e2x_prompt([BT_IG[0], sw], "x", "ig")


def test_e2x_single_target_label():
    p = build_e2x_prompt(BT_IG, "Machine learning", "ig")
    lines = p.text.split("\n")
    targets = {l.split(":", 1)[0] for l in lines[1::2]}
    assert targets == {"Igbo"}


def test_pivot_examples():
    t = TRIPLETS[0]
    p = build_pivot_prompt([t], "x", "ta", "sw")
    assert p.text == f"Tamil: {t.x_text}\nEnglish: {t.en_text}\nSwahili: {t.y_text}\n\nTamil: x\nEnglish:"
    assert p.stop == ("\n\n",) and p.expected_lang == "sw"
    three = build_pivot_prompt(TRIPLETS, "x", "ta", "sw")
    assert three.text.count("\n\n") == 3
    with pytest.raises(NeedTriplets):
        build_pivot_prompt([], "x", "ta", "sw")
    with pytest.raises(NeedTriplets):
        build_pivot_prompt([PivotTriplet("a", "b", "c", "hi", "sw")], "x", "ta", "sw")


def test_no_leakage():
    p = build_e2x_prompt(BT_IG, "Machine learning", "ig")
    assert "Ịmụ igwe" not in p.text


def test_exemplar_invariants():
    with pytest.raises(ValueError):
        Exemplar("", "b", "fr", "en")
    with pytest.raises(ValueError):
        Exemplar("a\nb", "b", "fr", "en")
    with pytest.raises(ValueError):
        build_pair_prompt([], "two\nlines", "fr", "en")
    assert FR_ONLY[0].swapped().src_lang == "en"


class TestParsers:
    def test_translation(self):
        assert parse_translation("Machine learning\nFrench: ...", ["\n"]) == "Machine learning"
        assert parse_translation("  hello  ") == "hello"
        assert parse_translation("") == ""
        assert parse_translation("a STOP b\nc", ["\n", "STOP"]) == "a"

    def test_marker(self):
        raw = "English summary: Good news\nFinal summary: Habari njema"
        assert parse_translation(raw, ["\n\n"], marker=XLT_MARKER) == "Habari njema"

    def test_pivot(self):
        assert parse_pivot_completion(" Machine learning\nSwahili: Kujifunza kwa mashine", "sw") == (
            "Machine learning", "Kujifunza kwa mashine")
        assert parse_pivot_completion("en\nSwahili: y\nextra", "sw") == ("en", "y")
        with pytest.raises(NoTargetSegment):
            parse_pivot_completion("only english text", "sw")

    def test_rating(self):
        assert parse_rating("Rating: 4") == 4
        assert parse_rating("I would rate this a 3 out of 5.") == 3
        assert parse_rating("9 then 2") == 2
        with pytest.raises(UnparsableRating):
            parse_rating("excellent")

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet=st.characters(blacklist_categories=("Cc", "Cs", "Zl", "Zp")), min_size=1)
           .filter(lambda s: s.strip() == s and s))
    def test_echo_roundtrip(self, answer):
        p = build_x2e_prompt(LDP_SEEDS, "Ịmụ igwe", "ig")
        assert parse_translation(" " + answer + p.stop[0] + "French: junk", p.stop) == answer


class TestSummarization:
    def test_sum_prompt(self):
        ex = DocSumExemplar("Doc one.\nMore.", "Short one.", "sw")
        p = build_sum_prompt([ex], "Doc two.", "sw")
        assert p.text == "Document: Doc one.\nMore.\nSummary: Short one.\n\nDocument: Doc two.\nSummary:"
        assert p.stop == ("\n\n",)
        assert build_sum_prompt([], "D", "sw").text == "Document: D\nSummary:"
        with pytest.raises(ValueError):
            DocSumExemplar("d", "two\nlines", "sw")

    def test_xlt(self):
        p = build_xlt_sum_prompt("Habari {ya} leo", "sw")
        assert p.text.count("Swahili") == 2
        assert p.text.count("Habari {ya} leo") == 1
        assert XLT_MARKER in p.text
        with pytest.raises(BadTemplate):
            build_xlt_sum_prompt("d", "sw", "Summarize in {language}")

    def test_judge(self):
        p = build_judge_prompt("Doc", "Sum", "sw")
        assert p.text.endswith("Rating:")
        assert "Swahili" in p.text and "1" in p.text and "5" in p.text

    def test_parse_summary_first_line(self):
        assert parse_summary(" S\nmore lines\n\nDocument: x") == "S"
