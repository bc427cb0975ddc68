"""Synthetic data construction: back-translation of unlabeled text into English,
intra-lingual exemplar pools, X-En-Y pivot triplets, summarization exemplars
and fine-tuning export."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .backend import DEFAULT_SUM_MAX_TOKENS, Backend
from .corpus import CorpusLine, sample_lines
from .exceptions import MissingCorpus, NotEnoughPairs
from .lang import Registry, default_registry
from .prompt import (DEFAULT_XLT_TEMPLATE, PIVOT, XLT_MARKER, DocSumExemplar, Exemplar,
                     PivotTriplet, Provenance, TagStyle, build_e2x_prompt, build_sum_prompt,
                     build_x2e_prompt, build_xlt_sum_prompt, parse_summary, parse_translation)

log = logging.getLogger(__name__)

DEFAULT_SHOTS = {"bloom": 8, "davinci": 6}
DEFAULT_M_BT = 8
DIRECTIONS = ("x2e", "e2x")


@dataclass(frozen=True)
class SyntheticPair:
    x_text: str
    en_text: str
    x_lang: str
    generator: str
    prompt_digest: str
    flag: str | None = None
    direction_of_generation: str = "x2e"

    @property
    def usable(self):
        return self.flag is None and bool(self.x_text) and bool(self.en_text)

    def to_dict(self):
        return {
            "x_text": self.x_text,
            "en_text": self.en_text,
            "x_lang": self.x_lang,
            "direction_of_generation": self.direction_of_generation,
            "generator": self.generator,
            "prompt_digest": self.prompt_digest,
            "flag": self.flag,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["x_text"], d["en_text"], d["x_lang"], d.get("generator", ""),
                   d.get("prompt_digest", ""), d.get("flag"),
                   d.get("direction_of_generation", "x2e"))


@dataclass(frozen=True)
class FinetuneRecord:
    text: str
    loss_start: int
    loss_end: int
    x_lang: str
    direction: str

    def __post_init__(self):
        if not 0 <= self.loss_start < self.loss_end <= len(self.text.encode("utf-8")):
            raise ValueError("loss span out of range")

    @property
    def output_text(self) -> str:
        return self.text.encode("utf-8")[self.loss_start:self.loss_end].decode("utf-8")

    def to_dict(self):
        return {"text": self.text, "loss_start": self.loss_start, "loss_end": self.loss_end,
                "x_lang": self.x_lang, "direction": self.direction}


def _as_corpus(lines, lang=None):
    out = []
    for i, item in enumerate(lines):
        if isinstance(item, CorpusLine):
            out.append(item)
        elif lang is None:
            raise ValueError("plain-string corpora need an explicit lang")
        else:
            out.append(CorpusLine(item, lang, "", i))
    return out


def _generator(backend):
    return f"{backend.backend_id}/{backend.model_id}"


def synthesize_x2e(corpus: Iterable, seeds: Sequence[Exemplar], backend: Backend,
                   style=TagStyle.NONE, registry: Registry | None = None, lang: str | None = None,
                   parallelism: int | None = None) -> list[SyntheticPair]:
    """Translate every corpus line into English with a prompt built from ``seeds``.

    One pair is returned per input line, in order. Failed or empty
    completions come back with ``flag`` set and ``usable`` false.
    """
    lines = _as_corpus(corpus, lang)
    prompts = [build_x2e_prompt(seeds, line.text, line.lang, style, registry) for line in lines]
    reqs = [backend.request(p) for p in prompts]
    results = backend.generate_batch(reqs, parallelism)
    gen = _generator(backend)
    pairs = []
    for line, prompt, req, res in zip(lines, prompts, reqs, results):
        if not res.ok:
            en, flag = "", f"error: {res.error}"
        else:
            en = parse_translation(res.text, prompt.stop)
            flag = None if en else "empty"
        if flag:
            log.info("x2e line %s:%d flagged (%s)", line.source_id, line.line_no, flag)
        pairs.append(SyntheticPair(line.text, en, line.lang, gen, req.cache_key(), flag))
    return pairs


def build_intra_exemplars(pairs: Sequence[SyntheticPair], direction: str, m: int,
                          seed: int) -> list[Exemplar]:
    """Sample ``m`` usable pairs and orient them as ``x2e`` or ``e2x`` exemplars."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    usable = [p for p in pairs if p.usable]
    if m > len(usable):
        raise NotEnoughPairs(f"need {m} usable pairs, have {len(usable)}")
    out = []
    for p in sample_lines(usable, m, seed):
        if direction == "e2x":
            out.append(Exemplar(p.en_text, p.x_text, PIVOT, p.x_lang, Provenance.SYNTHETIC_BT))
        else:
            out.append(Exemplar(p.x_text, p.en_text, p.x_lang, PIVOT, Provenance.SYNTHETIC_BT))
    return out


def synthesize_triplets(corpus_x: Sequence, seeds: Sequence[Exemplar], backend: Backend,
                        tgt_lang: str, m_bt: int = DEFAULT_M_BT, seed: int = 0,
                        corpus_y: Sequence | None = None, n: int | None = None,
                        style=TagStyle.NONE, registry: Registry | None = None,
                        src_lang: str | None = None, parallelism: int | None = None):
    """Build X-En-Y triplets from unlabeled X text.

    ``m_bt`` back-translated exemplars per direction condition the two inner
    prompts; they are synthesized from ``corpus_x`` and ``corpus_y`` with the
    LDP ``seeds``. ``n`` limits how many X lines become triplets (seeded
    sample). Returns ``(triplets, dropped)`` where ``dropped`` lists
    ``(x_text, reason)`` for lines that produced no triplet.
    """
    lines_x = _as_corpus(corpus_x, src_lang)
    if m_bt > 0:
        if not corpus_y:
            raise MissingCorpus(f"no unlabeled corpus for target language {tgt_lang!r}")
        ex_x2e = build_intra_exemplars(synthesize_x2e(lines_x, seeds, backend, style, registry,
                                                      parallelism=parallelism), "x2e", m_bt, seed)
        lines_y = _as_corpus(corpus_y, tgt_lang)
        ex_e2y = build_intra_exemplars(synthesize_x2e(lines_y, seeds, backend, style, registry,
                                                      parallelism=parallelism), "e2x", m_bt, seed)
    else:
        ex_x2e, ex_e2y = [], []
    if n is not None:
        lines_x = sample_lines(lines_x, min(n, len(lines_x)), seed)

    first = [build_x2e_prompt(ex_x2e, l.text, l.lang, style, registry) for l in lines_x]
    res1 = backend.generate_batch([backend.request(p) for p in first], parallelism)
    ens = [parse_translation(r.text, p.stop) if r.ok else "" for r, p in zip(res1, first)]

    todo = [i for i, en in enumerate(ens) if en]
    second = {i: build_e2x_prompt(ex_e2y, ens[i], tgt_lang, style, registry) for i in todo}
    res2 = dict(zip(todo, backend.generate_batch([backend.request(second[i]) for i in todo],
                                                 parallelism)))
    triplets, dropped = [], []
    for i, line in enumerate(lines_x):
        if not ens[i]:
            reason = "x2e failed" if not res1[i].ok else "x2e empty"
        elif not res2[i].ok:
            reason = "e2y failed"
        else:
            y = parse_translation(res2[i].text, second[i].stop)
            if y:
                triplets.append(PivotTriplet(line.text, ens[i], y, line.lang, tgt_lang))
                continue
            reason = "e2y empty"
        log.info("dropping triplet for %r: %s", line.text[:40], reason)
        dropped.append((line.text, reason))
    return triplets, dropped


def synthesize_sum_exemplars(docs: Sequence[str], cross_exemplars: Sequence[DocSumExemplar],
                             backend: Backend, lang: str, m: int = 1, seed: int = 0,
                             xlt_template: str = DEFAULT_XLT_TEMPLATE,
                             registry: Registry | None = None,
                             parallelism: int | None = None) -> list[DocSumExemplar]:
    """Summarize ``m`` unlabeled documents of ``lang`` to make intra-lingual exemplars.

    With cross-lingual exemplars the document/summary prompt is used,
    otherwise the zero-shot English-pivoting instruction.
    """
    docs = list(docs)
    chosen = sample_lines(docs, min(m, len(docs)), seed)
    if cross_exemplars:
        prompts = [build_sum_prompt(cross_exemplars, d, lang, registry) for d in chosen]
        marker = None
    else:
        prompts = [build_xlt_sum_prompt(d, lang, xlt_template, registry) for d in chosen]
        marker = XLT_MARKER
    reqs = [backend.request(p, max_tokens=DEFAULT_SUM_MAX_TOKENS) for p in prompts]
    out = []
    for doc, p, res in zip(chosen, prompts, backend.generate_batch(reqs, parallelism)):
        summary = parse_summary(res.text, p.stop, marker) if res.ok else ""
        if not summary:
            log.info("no usable summary for a %s document (%s)", lang, res.error or "empty")
            continue
        out.append(DocSumExemplar(doc, summary, lang))
    return out


def render_finetune(input_text: str, output_text: str, output_lang: str,
                    registry: Registry | None = None) -> tuple[str, int, int]:
    """Return ``(text, loss_start, loss_end)``; offsets are UTF-8 byte positions."""
    reg = registry if registry is not None else default_registry()
    prefix = f"{input_text}\n<{reg.english_name(output_lang)}>\n"
    text = prefix + output_text
    return text, len(prefix.encode("utf-8")), len(text.encode("utf-8"))


def export_finetune(pairs: Iterable[SyntheticPair], directions: Iterable[str] = DIRECTIONS,
                    registry: Registry | None = None) -> list[FinetuneRecord]:
    """Render ``input`` / ``<Tag>`` / ``output`` training samples with byte loss spans.

    Records come out pair by pair, x2e before e2x. Unusable pairs are skipped.
    """
    wanted = set(directions)
    unknown = wanted - set(DIRECTIONS)
    if unknown:
        raise ValueError(f"unknown directions {sorted(unknown)}")
    out = []
    for p in pairs:
        if not p.usable:
            continue
        for d in DIRECTIONS:
            if d not in wanted:
                continue
            if d == "x2e":
                text, start, end = render_finetune(p.x_text, p.en_text, PIVOT, registry)
            else:
                text, start, end = render_finetune(p.en_text, p.x_text, p.x_lang, registry)
            out.append(FinetuneRecord(text, start, end, p.x_lang, d))
    return out


def parse_finetune(record: FinetuneRecord) -> tuple[str, str]:
    """Recover ``(input, output)`` from a rendered record."""
    raw = record.text.encode("utf-8")
    prefix = raw[:record.loss_start].decode("utf-8")
    input_text = prefix.rsplit("\n<", 1)[0]
    return input_text, record.output_text

