"""Unlabeled corpus ingestion, filtering, seeded sampling and temperature-based mixing."""
from __future__ import annotations

import bisect
import enum
import json
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_line_free, check_mapping, check_positive
from .exceptions import InvalidSizes, MissingCorpus, NotEnoughLines
from .lang import LanguageSpec, default_registry, foreign_scripts, letter_ratio
from .rng import Xoshiro256

MIN_CHARS = 20
MAX_CHARS = 200
MAX_DIGIT_RATIO = 0.15
MAX_FOREIGN_RATIO = 0.20

_URL = re.compile(r"(?i)\b[a-z][a-z0-9+.\-]*://|\bwww\.")
_BRACKET = re.compile(r"[\[\]{}]")
_BULLET = re.compile(r"^\s*[-*•]")


@dataclass(frozen=True)
class CorpusLine:
    text: str
    lang: str
    source_id: str = ""
    line_no: int = 0

    def __post_init__(self):
        check_line_free(self.text)
        if self.line_no < 0:
            raise ValueError("line_no must be non-negative")


class RejectReason(str, enum.Enum):
    TOO_SHORT = "TooShort"
    TOO_LONG = "TooLong"
    ARTIFACT = "Artifact"
    FOREIGN_CHAR_RATIO = "ForeignCharRatio"

    def __str__(self):
        return self.value


@dataclass
class FilterReport:
    counts: dict = field(default_factory=lambda: {r: 0 for r in RejectReason})
    accepted: int = 0
    total: int = 0

    @property
    def rejected(self):
        return sum(self.counts.values())

    def add(self, reason: RejectReason | None):
        self.total += 1
        if reason is None:
            self.accepted += 1
        else:
            self.counts[reason] += 1

    def to_dict(self):
        return {
            "total": self.total,
            "accepted": self.accepted,
            "rejected": {r.value: self.counts[r] for r in RejectReason},
        }


def has_artifact(text: str, max_digit_ratio: float = MAX_DIGIT_RATIO) -> bool:
    """URLs, square/curly brackets, a leading bullet glyph, or too many digits."""
    if _URL.search(text) or _BRACKET.search(text) or _BULLET.match(text):
        return True
    digits = sum(1 for ch in text if unicodedata.category(ch) == "Nd")
    return bool(text) and digits / len(text) > max_digit_ratio


def filter_line(
    line: CorpusLine | str,
    spec: LanguageSpec,
    *,
    min_chars: int = MIN_CHARS,
    max_chars: int = MAX_CHARS,
    max_digit_ratio: float = MAX_DIGIT_RATIO,
    max_foreign_ratio: float = MAX_FOREIGN_RATIO,
) -> RejectReason | None:
    """Return the first rule the line violates, or None when it is accepted.

    Rules run in the order length, artifact, foreign-script ratio. Both length
    bounds are inclusive and count code points, not bytes.
    """
    text = line.text if isinstance(line, CorpusLine) else line
    if isinstance(line, CorpusLine) and line.lang != spec.code:
        raise ValueError(f"line language {line.lang!r} does not match {spec.code!r}")
    n = len(text)
    if n < min_chars:
        return RejectReason.TOO_SHORT
    if n > max_chars:
        return RejectReason.TOO_LONG
    if has_artifact(text, max_digit_ratio):
        return RejectReason.ARTIFACT
    if letter_ratio(text, foreign_scripts(spec)) > max_foreign_ratio:
        return RejectReason.FOREIGN_CHAR_RATIO
    return None


def filter_corpus(lines: Iterable[CorpusLine], spec: LanguageSpec, **thresholds):
    """Split ``lines`` into the accepted lines (input order kept) and a report."""
    kept = []
    report = FilterReport()
    for line in lines:
        reason = filter_line(line, spec, **thresholds)
        report.add(reason)
        if reason is None:
            kept.append(line)
    return kept, report


def _as_lines(X, lang):
    out = []
    for i, item in enumerate(X):
        if isinstance(item, CorpusLine):
            out.append(item)
        else:
            out.append(CorpusLine(str(item), lang, "", i))
    return out


class CorpusFilter(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`filter_corpus`.

    ``fit`` records a :class:`FilterReport` for the data it sees in
    ``report_``; ``transform`` returns the accepted lines. Plain strings are
    accepted and wrapped as :class:`CorpusLine` of language ``lang``.
    """

    def __init__(self, lang="en", min_chars=MIN_CHARS, max_chars=MAX_CHARS,
                 max_digit_ratio=MAX_DIGIT_RATIO, max_foreign_ratio=MAX_FOREIGN_RATIO,
                 registry=None):
        self.lang = lang
        self.min_chars = min_chars
        self.max_chars = max_chars
        self.max_digit_ratio = max_digit_ratio
        self.max_foreign_ratio = max_foreign_ratio
        self.registry = registry

    def _spec(self):
        reg = self.registry if self.registry is not None else default_registry()
        return reg[self.lang]

    def _thresholds(self):
        return dict(min_chars=self.min_chars, max_chars=self.max_chars,
                    max_digit_ratio=self.max_digit_ratio,
                    max_foreign_ratio=self.max_foreign_ratio)

    def fit(self, X, y=None):
        if self.min_chars > self.max_chars:
            raise ValueError("min_chars must not exceed max_chars")
        self.spec_ = self._spec()
        _, self.report_ = filter_corpus(_as_lines(X, self.lang), self.spec_, **self._thresholds())
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        kept, _ = filter_corpus(_as_lines(X, self.lang), self.spec_, **self._thresholds())
        return kept


def sample_lines(lines: Sequence, n: int, seed: int) -> list:
    """Pick ``n`` items without replacement, keeping their original relative order.

    The choice is the first ``n`` positions of a :class:`Xoshiro256`
    Fisher-Yates permutation seeded with ``seed``.
    """
    lines = list(lines)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > len(lines):
        raise NotEnoughLines(f"asked for {n} lines but only {len(lines)} available")
    perm = Xoshiro256(seed).permutation(len(lines))
    return [lines[i] for i in sorted(perm[:n])]


@dataclass(frozen=True)
class MixtureWeights:
    entries: tuple  # of (lang, size, probability)
    temperature: float

    @property
    def langs(self):
        return [e[0] for e in self.entries]

    @property
    def probabilities(self):
        return [e[2] for e in self.entries]

    def as_dict(self):
        return {lang: p for lang, _, p in self.entries}

    def to_dict(self):
        return {
            "temperature": self.temperature,
            "entries": [{"lang": l, "size": n, "probability": p} for l, n, p in self.entries],
        }


def mixture_weights(sizes, temperature: float) -> MixtureWeights:
    """Temperature-smoothed sampling probabilities, p_i proportional to (n_i/N)**(1/T).

    ``sizes`` is a mapping or a sequence of ``(lang, n_i)`` pairs. T = 1 keeps
    the raw proportions; large T approaches uniform.
    """
    items = list(sizes.items()) if isinstance(sizes, Mapping) else [tuple(s) for s in sizes]
    if not items:
        raise InvalidSizes("no corpus sizes given")
    if any(n <= 0 for _, n in items):
        raise InvalidSizes("corpus sizes must be positive")
    if len({lang for lang, _ in items}) != len(items):
        raise InvalidSizes("duplicate language in sizes")
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    total = sum(n for _, n in items)
    scaled = [(n / total) ** (1.0 / temperature) for _, n in items]
    z = sum(scaled)
    return MixtureWeights(
        tuple((lang, n, s / z) for (lang, n), s in zip(items, scaled)),
        float(temperature),
    )


def draw_mixture(weights: MixtureWeights, corpora: Mapping[str, Sequence], n: int, seed: int) -> list:
    """Draw ``n`` lines; the language of each draw follows ``weights``.

    Each language's lines are shuffled once (in ``weights`` order, from the same
    generator) and then consumed in that order, wrapping around when exhausted.
    """
    check_mapping(corpora, "corpora")
    for lang in weights.langs:
        if not corpora.get(lang):
            raise MissingCorpus(f"no lines for weighted language {lang!r}")
    rng = Xoshiro256(seed)
    orders = {lang: rng.permutation(len(corpora[lang])) for lang in weights.langs}
    cdf = []
    acc = 0.0
    for p in weights.probabilities:
        acc += p
        cdf.append(acc)
    cursor = {lang: 0 for lang in weights.langs}
    last = len(cdf) - 1
    out = []
    for _ in range(n):
        k = min(bisect.bisect_right(cdf, rng.random()), last)
        lang = weights.langs[k]
        order = orders[lang]
        out.append(corpora[lang][order[cursor[lang] % len(order)]])
        cursor[lang] += 1
    return out


class TemperatureSampler(BaseEstimator):
    """Fit mixture weights on per-language corpora, then draw balanced samples."""

    def __init__(self, temperature=25.0, seed=0):
        self.temperature = temperature
        self.seed = seed

    def fit(self, corpora, y=None):
        check_mapping(corpora, "corpora")
        check_positive(self.temperature, "temperature")
        self.weights_ = mixture_weights([(k, len(v)) for k, v in corpora.items()], self.temperature)
        self.corpora_ = {k: list(v) for k, v in corpora.items()}
        return self

    def sample(self, n):
        check_is_fitted(self, "weights_")
        return draw_mixture(self.weights_, self.corpora_, n, self.seed)


def read_corpus(path, lang: str, source_id: str | None = None) -> list[CorpusLine]:
    """Read plain text (one sentence per line) or JSONL ``{text, lang, source_id}``.

    JSONL is detected per line by a leading ``{``. Blank lines are skipped but
    still advance ``line_no``.
    """
    source_id = source_id if source_id is not None else str(path)
    out = []
    with open(path, encoding="utf-8") as f:
        for i, raw in enumerate(f):
            raw = raw.rstrip("\r\n")
            if not raw.strip():
                continue
            if raw.lstrip().startswith("{"):
                rec = json.loads(raw)
                out.append(CorpusLine(rec["text"], rec.get("lang", lang),
                                      rec.get("source_id", source_id), i))
            else:
                out.append(CorpusLine(raw, lang, source_id, i))
    return out


def write_corpus(lines: Iterable[CorpusLine], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps({"text": line.text, "lang": line.lang, "source_id": line.source_id},
                               ensure_ascii=False) + "\n")

