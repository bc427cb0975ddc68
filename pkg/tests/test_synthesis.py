import pytest

from ldpkit.backend import MockBackend, ResponseCache, TranslationTables
from ldpkit.exceptions import MissingCorpus, NotEnoughPairs
from ldpkit.prompt import DocSumExemplar, Provenance, parse_translation
from ldpkit.rng import Xoshiro256
from ldpkit.synthesis import (FinetuneRecord, SyntheticPair, build_intra_exemplars,
                              export_finetune, parse_finetune, render_finetune,
                              synthesize_sum_exemplars, synthesize_triplets, synthesize_x2e)

from corpora import bijective_table, corpus_from_lexicon, lexicon
from golden_cases import LDP_SEEDS

IG = lexicon("latin", 60, seed=1)
EN = lexicon("en", 60, seed=2)
TA = lexicon("ta", 60, seed=3)
SW = [w + "ni" for w in lexicon("latin", 60, seed=4)]


def tables():
    return {"ig-en": bijective_table(IG, EN), "ta-en": bijective_table(TA, EN),
            "en-sw": bijective_table(EN, SW)}


def test_x2e_closed_loop():
    t = TranslationTables(tables())
    corpus = corpus_from_lexicon(IG, 100, seed=5)
    pairs = synthesize_x2e(corpus, LDP_SEEDS, MockBackend(tables=t), lang="ig")
    assert len(pairs) == 100
    assert [p.x_text for p in pairs] == corpus
    assert all(p.en_text == t.translate(p.x_text, "ig", "en") for p in pairs)
    assert all(p.usable and p.generator == "mock/mock" for p in pairs)


def test_x2e_zero_shot():
    t = TranslationTables(tables())
    pairs = synthesize_x2e(corpus_from_lexicon(IG, 5, seed=6), [], MockBackend(tables=t), lang="ig")
    assert all(p.usable for p in pairs)


def test_x2e_empty_completion_flagged():
    b = MockBackend(fn=lambda p: "" if "bad" in p.rsplit("\n", 2)[-2] else " fine")
    pairs = synthesize_x2e(["good line", "bad line"], LDP_SEEDS, b, lang="ig")
    assert [p.flag for p in pairs] == [None, "empty"]
    assert [p.usable for p in pairs] == [True, False]


def test_x2e_error_flagged():
    def fn(p):
        if "boom" in p:
            raise RuntimeError("down")
        return " ok"
    pairs = synthesize_x2e(["a", "boom"], [], MockBackend(fn=fn), lang="ig")
    assert pairs[1].flag.startswith("error") and not pairs[1].usable


def test_prompt_digest_audit(tmp_path):
    t = TranslationTables(tables())
    b = MockBackend(tables=t, cache=ResponseCache(tmp_path))
    pairs = synthesize_x2e(corpus_from_lexicon(IG, 10, seed=7), LDP_SEEDS, b, lang="ig")
    for p in pairs:
        hit = b.cache.get(p.prompt_digest)
        assert hit is not None
        assert parse_translation(hit["text"]) == p.en_text


def _pairs(n):
    return [SyntheticPair(f"x{i}", f"e{i}", "ig", "g", "d") for i in range(n)]


def test_intra_exemplars():
    ex = build_intra_exemplars(_pairs(10), "e2x", 8, seed=1)
    assert len(ex) == 8
    assert all(e.src_lang == "en" and e.tgt_lang == "ig" and e.src_text.startswith("e") for e in ex)
    assert all(e.provenance is Provenance.SYNTHETIC_BT for e in ex)
    assert ex == build_intra_exemplars(_pairs(10), "e2x", 8, seed=1)
    x2e = build_intra_exemplars(_pairs(10), "x2e", 3, seed=1)
    assert all(e.tgt_lang == "en" for e in x2e)
    with pytest.raises(NotEnoughPairs):
        build_intra_exemplars(_pairs(10), "e2x", 11, seed=1)


def test_intra_exemplars_ignore_flagged():
    pairs = _pairs(3) + [SyntheticPair("x", "", "ig", "g", "d", "empty")]
    with pytest.raises(NotEnoughPairs):
        build_intra_exemplars(pairs, "e2x", 4, 0)


def test_triplet_composition():
    t = TranslationTables(tables())
    b = MockBackend(tables=t)
    cx = corpus_from_lexicon(TA, 100, seed=8)
    cy = corpus_from_lexicon(SW, 40, seed=9)
    triplets, dropped = synthesize_triplets(cx, LDP_SEEDS, b, "sw", m_bt=8, seed=0, corpus_y=cy,
                                            src_lang="ta")
    assert len(triplets) == 100 and dropped == []
    for tr in triplets:
        assert tr.en_text == t.translate(tr.x_text, "ta", "en")
        assert tr.y_text == t.translate(t.translate(tr.x_text, "ta", "en"), "en", "sw")


def test_triplet_zero_shot_and_missing_corpus():
    t = TranslationTables(tables())
    b = MockBackend(tables=t)
    cx = corpus_from_lexicon(TA, 5, seed=8)
    triplets, _ = synthesize_triplets(cx, LDP_SEEDS, b, "sw", m_bt=0, src_lang="ta")
    assert len(triplets) == 5
    with pytest.raises(MissingCorpus):
        synthesize_triplets(cx, LDP_SEEDS, b, "sw", m_bt=2, src_lang="ta")


def test_triplet_drop_counted():
    t = TranslationTables(tables())
    inner = MockBackend(tables=t)

    def fn(prompt):
        # fail only the second hop for the first line
        if prompt.split("\n")[-2] == "Input: " + EN[0]:
            return ""
        return inner._complete(inner.request(prompt))[0]
    cx = [TA[0], TA[1]]
    triplets, dropped = synthesize_triplets(cx, [], MockBackend(fn=fn), "sw", m_bt=0, src_lang="ta")
    assert len(triplets) == 1
    assert dropped == [(TA[0], "e2y empty")]


def test_sum_exemplars():
    b = MockBackend(fn=lambda p: " S\nsecond line")
    out = synthesize_sum_exemplars(["doc one"], [DocSumExemplar("d", "s", "sw")], b, "sw", m=1)
    assert out == [DocSumExemplar("doc one", "S", "sw")]
    assert synthesize_sum_exemplars([], [], b, "sw") == []


def test_sum_exemplars_xlt_marker():
    b = MockBackend(fn=lambda p: " Good news.\nFinal summary: Habari njema")
    out = synthesize_sum_exemplars(["hati"], [], b, "sw", m=1)
    assert out[0].summary == "Habari njema"


def test_finetune_igbo_example():
    pair = SyntheticPair("Ụtụtụ ọma", "Good morning", "ig", "g", "d")
    e2x, = export_finetune([pair], {"e2x"})
    assert e2x.text == "Good morning\n<Igbo>\nỤtụtụ ọma"
    assert e2x.loss_start == 20
    assert e2x.loss_end == len(e2x.text.encode("utf-8"))
    assert e2x.output_text == "Ụtụtụ ọma"
    x2e, = export_finetune([pair], {"x2e"})
    assert x2e.text == "Ụtụtụ ọma\n<English>\nGood morning"
    assert x2e.output_text == "Good morning"
    assert len(export_finetune([pair])) == 2


def _random_text(rng, n):
    out = []
    while len(out) < n:
        cp = 0x20 + rng.below(0x2FFFF)
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        if ch.isspace() and ch != " ":
            continue
        out.append(ch)
    return "".join(out).strip() or "x"


def test_finetune_fuzz():
    rng = Xoshiro256(77)
    pairs = [SyntheticPair(_random_text(rng, 1 + rng.below(30)), _random_text(rng, 1 + rng.below(30)),
                           "sw", "g", "d") for _ in range(500)]
    records = export_finetune(pairs)
    assert len(records) == 1000
    for rec, (p, d) in zip(records, [(p, d) for p in pairs for d in ("x2e", "e2x")]):
        want_in, want_out = (p.x_text, p.en_text) if d == "x2e" else (p.en_text, p.x_text)
        raw = rec.text.encode("utf-8")
        assert raw[rec.loss_start:rec.loss_end] == want_out.encode("utf-8")
        assert parse_finetune(rec) == (want_in, want_out)


def test_finetune_record_validation():
    with pytest.raises(ValueError):
        FinetuneRecord("abc", 2, 2, "ig", "e2x")
    text, s, e = render_finetune("a", "b", "en")
    assert (text, s, e) == ("a\n<English>\nb", 12, 13)


def test_synthetic_pair_roundtrip():
    p = SyntheticPair("x", "e", "ig", "g", "d")
    assert SyntheticPair.from_dict(p.to_dict()) == p
