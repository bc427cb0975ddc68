"""Prompt rendering for few-shot translation, pivoting and summarization, plus
completion parsers.

All builders are pure string functions. Layout conventions:

* a label is ``"{name}: "``; an open label at the end of a prompt is ``"{name}:"``
* pair exemplars are separated by a single newline
* pivot triplets and document/summary blocks are separated by a blank line
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Sequence

from ._validation import check_line_free
from .exceptions import (BadTemplate, MixedTargetLanguage, NeedTriplets, NoTargetSegment,
                         UnparsableRating)
from .lang import Registry, default_registry

PIVOT = "en"
DEFAULT_LDP_LANGS = ("ar", "zh", "vi", "fr")


class TagStyle(str, enum.Enum):
    ENGLISH = "english"
    NATIVE = "native"
    NONE = "none"

    def __str__(self):
        return self.value


class Provenance(str, enum.Enum):
    SUPERVISED = "supervised"
    SYNTHETIC_BT = "synthetic_bt"
    SEED_TRANSLATION = "seed_translation"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Exemplar:
    src_text: str
    tgt_text: str
    src_lang: str
    tgt_lang: str
    provenance: Provenance = Provenance.SUPERVISED

    def __post_init__(self):
        for name in ("src_text", "tgt_text"):
            value = getattr(self, name)
            if not value:
                raise ValueError(f"exemplar {name} is empty")
            check_line_free(value, name)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    def swapped(self) -> "Exemplar":
        return replace(self, src_text=self.tgt_text, tgt_text=self.src_text,
                       src_lang=self.tgt_lang, tgt_lang=self.src_lang)

    def to_dict(self):
        return {"src_text": self.src_text, "tgt_text": self.tgt_text, "src_lang": self.src_lang,
                "tgt_lang": self.tgt_lang, "provenance": self.provenance.value}


@dataclass(frozen=True)
class PivotTriplet:
    x_text: str
    en_text: str
    y_text: str
    x_lang: str
    y_lang: str

    def __post_init__(self):
        for name in ("x_text", "en_text", "y_text"):
            value = getattr(self, name)
            if not value:
                raise ValueError(f"triplet {name} is empty")
            check_line_free(value, name)

    def to_dict(self):
        return {"x_text": self.x_text, "en_text": self.en_text, "y_text": self.y_text,
                "x_lang": self.x_lang, "y_lang": self.y_lang}


@dataclass(frozen=True)
class DocSumExemplar:
    doc: str
    summary: str
    lang: str

    def __post_init__(self):
        if not self.summary:
            raise ValueError("summary is empty")
        check_line_free(self.summary, "summary")

    def to_dict(self):
        return {"doc": self.doc, "summary": self.summary, "lang": self.lang}


@dataclass(frozen=True)
class PromptText:
    text: str
    stop: tuple = ("\n",)
    expected_lang: str = PIVOT

    def __post_init__(self):
        object.__setattr__(self, "stop", tuple(self.stop))
        if not self.stop:
            raise ValueError("a prompt needs at least one stop sequence")

    def __str__(self):
        return self.text


def _registry(registry):
    return registry if registry is not None else default_registry()


def tag(lang: str, style, registry: Registry | None = None, role: str = "input") -> str:
    """Tag name for ``lang`` under ``style``; ``role`` only matters for NoTag."""
    style = TagStyle(style)
    if style is TagStyle.NONE:
        # still validate the language so unknown codes fail the same way in every style
        _registry(registry)[lang]
        return "Input" if role == "input" else "Output"
    spec = _registry(registry)[lang]
    return spec.english_name if style is TagStyle.ENGLISH else spec.native_name


def render_pair(ex: Exemplar, style=TagStyle.ENGLISH, registry: Registry | None = None) -> str:
    src = tag(ex.src_lang, style, registry, "input")
    tgt = tag(ex.tgt_lang, style, registry, "output")
    return f"{src}: {ex.src_text}\n{tgt}: {ex.tgt_text}"


def build_pair_prompt(exemplars: Sequence[Exemplar], input: str, src_lang: str, tgt_lang: str,
                      style=TagStyle.ENGLISH, registry: Registry | None = None) -> PromptText:
    """Generic pair prompt; no check that exemplar target languages agree."""
    check_line_free(input, "input")
    blocks = [render_pair(ex, style, registry) for ex in exemplars]
    src = tag(src_lang, style, registry, "input")
    tgt = tag(tgt_lang, style, registry, "output")
    blocks.append(f"{src}: {input}\n{tgt}:")
    return PromptText("\n".join(blocks), ("\n",), tgt_lang)


def build_x2e_prompt(exemplars: Sequence[Exemplar], input: str, src_lang: str,
                     style=TagStyle.ENGLISH, registry: Registry | None = None,
                     pivot: str = PIVOT) -> PromptText:
    """X to English prompt conditioned on any-language to English exemplars."""
    for ex in exemplars:
        if ex.tgt_lang != pivot:
            raise MixedTargetLanguage(f"exemplar targets {ex.tgt_lang!r}, expected {pivot!r}")
    return build_pair_prompt(exemplars, input, src_lang, pivot, style, registry)


def build_e2x_prompt(bt_exemplars: Sequence[Exemplar], input: str, tgt_lang: str,
                     style=TagStyle.ENGLISH, registry: Registry | None = None,
                     pivot: str = PIVOT) -> PromptText:
    """English to X prompt. Every exemplar must go pivot -> ``tgt_lang``."""
    for ex in bt_exemplars:
        if ex.tgt_lang != tgt_lang or ex.src_lang != pivot:
            raise MixedTargetLanguage(
                f"exemplar {ex.src_lang}->{ex.tgt_lang} in a {pivot}->{tgt_lang} prompt")
    return build_pair_prompt(bt_exemplars, input, pivot, tgt_lang, style, registry)


def render_triplet(t: PivotTriplet, style=TagStyle.ENGLISH, registry=None, pivot=PIVOT) -> str:
    return (f"{tag(t.x_lang, style, registry)}: {t.x_text}\n"
            f"{tag(pivot, style, registry)}: {t.en_text}\n"
            f"{tag(t.y_lang, style, registry)}: {t.y_text}")


def build_pivot_prompt(triplets: Sequence[PivotTriplet], input: str, src_lang: str, tgt_lang: str,
                       registry: Registry | None = None, style=TagStyle.ENGLISH,
                       pivot: str = PIVOT) -> PromptText:
    """X -> English -> Y prompt; the completion carries the English line, then the Y line."""
    style = TagStyle(style)
    if style is TagStyle.NONE:
        raise ValueError("pivot prompts need language tags; NoTag cannot label three lines")
    if not triplets:
        raise NeedTriplets("pivot prompts need at least one triplet")
    for t in triplets:
        if (t.x_lang, t.y_lang) != (src_lang, tgt_lang):
            raise NeedTriplets(
                f"triplet {t.x_lang}->{t.y_lang} does not match {src_lang}->{tgt_lang}")
    check_line_free(input, "input")
    blocks = [render_triplet(t, style, registry, pivot) for t in triplets]
    blocks.append(f"{tag(src_lang, style, registry)}: {input}\n{tag(pivot, style, registry)}:")
    return PromptText("\n\n".join(blocks), ("\n\n",), tgt_lang)


def parse_translation(raw: str, stop: Sequence[str] = ("\n",), marker: str | None = None) -> str:
    """Cut ``raw`` at the earliest stop sequence and strip it.

    With ``marker``, only the text after the last occurrence of the marker is
    kept (before stop truncation). An empty return value means the completion
    was unusable; callers treat it as a flagged item.
    """
    if marker is not None and marker in raw:
        raw = raw[raw.rindex(marker) + len(marker):]
    cut = len(raw)
    for s in stop:
        if s:
            i = raw.find(s)
            if i != -1:
                cut = min(cut, i)
    return raw[:cut].strip()


def parse_pivot_completion(raw: str, tgt_lang: str, registry: Registry | None = None,
                           style=TagStyle.ENGLISH) -> tuple[str, str]:
    """Split a pivot completion into ``(english, target)``."""
    label = tag(tgt_lang, style, registry) + ":"
    lines = raw.split("\n")
    for i, line in enumerate(lines):
        if line.lstrip().startswith(label):
            before = "\n".join(lines[:i]).strip()
            en = before.split("\n", 1)[0].strip()
            y = line.lstrip()[len(label):].strip()
            return en, y
    raise NoTargetSegment(f"no line starting with {label!r} in completion")


def build_sum_prompt(exemplars: Sequence[DocSumExemplar], doc: str, lang: str,
                     registry: Registry | None = None) -> PromptText:
    _registry(registry)[lang]
    blocks = [f"Document: {ex.doc}\nSummary: {ex.summary}" for ex in exemplars]
    blocks.append(f"Document: {doc}\nSummary:")
    return PromptText("\n\n".join(blocks), ("\n\n",), lang)


def parse_summary(raw: str, stop: Sequence[str] = ("\n\n",), marker: str | None = None) -> str:
    """Like :func:`parse_translation` but keeps only the first non-empty line."""
    text = parse_translation(raw, stop, marker)
    return text.split("\n", 1)[0].strip()


XLT_MARKER = "Final summary:"

# Stand-in wording; override through the experiment config.
DEFAULT_XLT_TEMPLATE = (
    "I want you to act as a summarization expert for {language}.\n"
    "Document: {document}\n"
    "First understand the document and write a one-sentence summary of it in English. "
    "Then translate that summary into {language}.\n"
    "Write the translated summary on a last line that begins with \"" + XLT_MARKER + "\".\n"
    "Answer:"
)

DEFAULT_BASIC_TEMPLATE = "Summarize the following document in {language}.\nDocument: {document}\nSummary:"


def _fill(template: str, doc: str, lang: str, registry) -> str:
    for ph in ("{language}", "{document}"):
        if ph not in template:
            raise BadTemplate(f"template lacks the {ph} placeholder")
    name = _registry(registry).english_name(lang)
    # str.replace, not str.format: documents routinely contain braces
    return template.replace("{language}", name).replace("{document}", doc)


def build_xlt_sum_prompt(doc: str, lang: str, instruction_template: str = DEFAULT_XLT_TEMPLATE,
                         registry: Registry | None = None) -> PromptText:
    return PromptText(_fill(instruction_template, doc, lang, registry), ("\n\n",), lang)


def build_basic_sum_prompt(doc: str, lang: str, instruction_template: str = DEFAULT_BASIC_TEMPLATE,
                           registry: Registry | None = None) -> PromptText:
    return PromptText(_fill(instruction_template, doc, lang, registry), ("\n\n",), lang)


JUDGE_TEMPLATE = (
    "You are evaluating a summary written in {language}.\n"
    "Rate how well the summary captures the main content of the document, "
    "on a scale from 1 (very poor) to 5 (excellent). Reply with a single integer.\n\n"
    "Document: {document}\n\n"
    "Summary: {summary}\n\n"
    "Rating:"
)


def build_judge_prompt(doc: str, summary: str, lang: str, registry: Registry | None = None) -> PromptText:
    name = _registry(registry).english_name(lang)
    text = (JUDGE_TEMPLATE.replace("{language}", name)
            .replace("{document}", doc).replace("{summary}", summary))
    return PromptText(text, ("\n",), PIVOT)


def parse_rating(raw: str) -> int:
    """First integer token in 1..5 found in ``raw``."""
    for m in re.finditer(r"\d+", raw):
        value = int(m.group())
        if 1 <= value <= 5:
            return value
    raise UnparsableRating(f"no rating in 1..5 found in {raw!r}")


def label_lines(prompt: str) -> int:
    """Number of lines that begin with a tag followed by a colon."""
    return sum(1 for line in prompt.split("\n") if re.match(r"^[^\s:][^:\n]*:( |$)", line))
