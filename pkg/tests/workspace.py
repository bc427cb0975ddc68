"""Builds an on-disk experiment workspace around bijective mock tables."""
import json
from pathlib import Path

import yaml

from ldpkit.backend import TranslationTables

from corpora import bijective_table, corpus_from_lexicon, lexicon
from golden_cases import LDP_SEEDS

IG = lexicon("latin", 80, seed=1)
EN = lexicon("en", 80, seed=2)
TA = lexicon("ta", 80, seed=3)
SW = [w + "ni" for w in lexicon("latin", 80, seed=4)]

TABLES = {"ig-en": bijective_table(IG, EN), "ta-en": bijective_table(TA, EN),
          "en-sw": bijective_table(EN, SW)}
WORDS = {"ig": IG, "en": EN, "ta": TA, "sw": SW}


def tables():
    return TranslationTables(TABLES)


def _jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def _long_enough(lines):
    return [l for l in lines if 20 <= len(l) <= 200]


def build(root, n_test=30, n_unlabeled=60):
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    t = tables()
    ig = corpus_from_lexicon(IG, n_test, seed=10)
    _jsonl(root / "x2e_ig.jsonl", [{"source": s, "reference": t.translate(s, "ig", "en")} for s in ig])
    en = corpus_from_lexicon(EN, n_test, seed=11)
    _jsonl(root / "e2x_ig.jsonl", [{"source": s, "reference": t.translate(s, "en", "ig")} for s in en])
    _jsonl(root / "e2x_sw.jsonl", [{"source": s, "reference": t.translate(s, "en", "sw")} for s in en])
    ta = corpus_from_lexicon(TA, n_test, seed=12)
    _jsonl(root / "x2y_ta-sw.jsonl",
           [{"source": s, "reference": t.translate(t.translate(s, "ta", "en"), "en", "sw")} for s in ta])
    _jsonl(root / "ldp_seeds.jsonl", [e.to_dict() for e in LDP_SEEDS])
    pool = corpus_from_lexicon(IG, 20, seed=13)
    _jsonl(root / "pool_ig.jsonl", [{"src_text": s, "tgt_text": t.translate(s, "ig", "en"),
                                     "src_lang": "ig", "tgt_lang": "en"} for s in pool])
    for lang, seed in (("ig", 20), ("ta", 21), ("sw", 22)):
        lines = _long_enough(corpus_from_lexicon(WORDS[lang], n_unlabeled * 2, seed=seed))[:n_unlabeled]
        (root / f"unlabeled_{lang}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return root


def write_config(root, name, **fields):
    root = Path(root)
    cfg = {
        "test_sets": {"ig": "x2e_ig.jsonl"},
        "ldp_exemplars": "ldp_seeds.jsonl",
        "unlabeled": {"ig": "unlabeled_ig.txt", "ta": "unlabeled_ta.txt", "sw": "unlabeled_sw.txt"},
        "backends": [{"backend_id": "mock", "kind": "mock", "tables": TABLES}],
        "sample_size": 20,
        "seed": 3,
    }
    cfg.update(fields)
    path = root / f"{name}.yaml"
    path.write_text(yaml.safe_dump(cfg, allow_unicode=True, sort_keys=True), encoding="utf-8")
    return path
