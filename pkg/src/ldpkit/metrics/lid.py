"""Character n-gram language identification and confusion matrices."""
from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import EmptyText, NeedSeedData, UnknownLanguage
from ..lang import Ambiguous, Script, default_registry, dominant_script

OTHER = "##"
MIN_SEED_LINES = 50
# Familiarity relative to the language's own seed lines. Held-out sentences
# land at 0.70 and up, uniform random 40-letter Latin strings at most about
# 0.61 (see tests/test_lid.py).
DEFAULT_FLOOR = 0.65


def _normalise(text):
    return " " + " ".join(text.lower().split()) + " "


def _grams(text, n):
    return [text[i:i + n] for i in range(len(text) - n + 1)]


class LanguageIdentifier(ClassifierMixin, BaseEstimator):
    """Per-language character n-gram frequency model with add-one smoothing.

    ``predict`` first restricts candidates to languages written in the text's
    dominant script (all candidates when the script is ambiguous or matches
    none), then picks the highest summed log-frequency. ``familiarity`` of the
    winner (mean per-n-gram log-frequency rescaled so an unseen n-gram is 0
    and a certain one is 1) is divided by the median familiarity of that
    language's seed lines, since scripts with large alphabets score lower
    across the board. A ratio below ``floor`` yields ``"##"``. ``floor=None``
    disables that.
    """

    def __init__(self, orders=(1, 2, 3), floor=DEFAULT_FLOOR, min_lines=MIN_SEED_LINES,
                 registry=None):
        self.orders = orders
        self.floor = floor
        self.min_lines = min_lines
        self.registry = registry

    def fit(self, X, y):
        X, y = list(X), list(y)
        if len(X) != len(y):
            raise ValueError("X and y differ in length")
        by_lang: dict[str, list[str]] = {}
        for text, lang in zip(X, y):
            by_lang.setdefault(lang, []).append(text)
        short = sorted(l for l, lines in by_lang.items() if len(lines) < self.min_lines)
        if short or not by_lang:
            raise NeedSeedData(f"fewer than {self.min_lines} seed lines for {short or 'any language'}")
        reg = self.registry if self.registry is not None else default_registry()
        self.classes_ = sorted(by_lang)
        self.tables_ = {}
        self.scripts_ = {}
        for lang in self.classes_:
            tables = {}
            for n in self.orders:
                counts = Counter()
                for line in by_lang[lang]:
                    counts.update(_grams(_normalise(line), n))
                total = sum(counts.values())
                tables[n] = (counts, total, len(counts) + 1)
            self.tables_[lang] = tables
            spec = reg.get(lang)
            if spec is not None:
                self.scripts_[lang] = spec.script_class
            else:
                script = dominant_script(" ".join(by_lang[lang]))
                self.scripts_[lang] = script if isinstance(script, Script) else Script.OTHER
        self.reference_ = {}
        for lang in self.classes_:
            fams = [self.scores(line, [lang])[lang][1] for line in by_lang[lang] if line.strip()]
            self.reference_[lang] = statistics.median(fams) if fams else 1.0
        return self

    def _candidates(self, text):
        script = dominant_script(text)
        if isinstance(script, Ambiguous):
            return self.classes_
        same = [l for l in self.classes_ if self.scripts_[l] is script]
        return same or self.classes_

    def scores(self, text: str, candidates: Sequence[str] | None = None) -> dict[str, tuple[float, float]]:
        """``lang -> (summed log-frequency, familiarity)`` for each candidate."""
        check_is_fitted(self, "tables_")
        if not text.strip():
            raise EmptyText("cannot identify the language of empty text")
        norm = _normalise(text)
        out = {}
        for lang in candidates if candidates is not None else self.classes_:
            log_sum = 0.0
            fam_sum = 0.0
            count = 0
            for n, (table, total, vocab) in self.tables_[lang].items():
                denom = total + vocab
                unseen = math.log(1.0 / denom)
                for g in _grams(norm, n):
                    lp = math.log((table.get(g, 0) + 1) / denom)
                    log_sum += lp
                    fam_sum += 1.0 - lp / unseen
                    count += 1
            out[lang] = (log_sum, fam_sum / count if count else 0.0)
        return out

    def predict_one(self, text: str) -> str:
        check_is_fitted(self, "tables_")
        scored = self.scores(text, self._candidates(text))
        best = max(sorted(scored), key=lambda l: scored[l][0])
        if self.floor is not None and scored[best][1] < self.floor * self.reference_[best]:
            return OTHER
        return best

    def predict(self, X):
        return [self.predict_one(t) for t in X]


def lid_train(seed_corpora: Mapping[str, Iterable[str]], **params) -> LanguageIdentifier:
    X, y = [], []
    for lang, lines in seed_corpora.items():
        for line in lines:
            X.append(line)
            y.append(lang)
    return LanguageIdentifier(**params).fit(X, y)


def lid_classify(text: str, model: LanguageIdentifier) -> str:
    return model.predict_one(text)


@dataclass
class ConfusionMatrix:
    """Rows are intended languages, columns predicted languages plus ``"##"``."""

    rows: list
    columns: list
    counts: list  # list of row lists

    def cell(self, intended, predicted):
        return self.counts[self.rows.index(intended)][self.columns.index(predicted)]

    def row(self, intended):
        return dict(zip(self.columns, self.counts[self.rows.index(intended)]))

    def row_sums(self):
        return {r: sum(c) for r, c in zip(self.rows, self.counts)}

    def total(self):
        return sum(map(sum, self.counts))

    def is_diagonal(self):
        for r, row in zip(self.rows, self.counts):
            for c, v in zip(self.columns, row):
                if v and c != r:
                    return False
        return True

    def accuracy(self):
        total = self.total()
        if not total:
            return 0.0
        return sum(self.cell(r, r) for r in self.rows if r in self.columns) / total

    def to_dict(self):
        return {"rows": self.rows, "columns": self.columns, "counts": self.counts}

    def to_text(self):
        width = max([len(c) for c in self.columns + self.rows] + [max(
            (len(str(v)) for row in self.counts for v in row), default=1)]) + 1
        lines = [" " * width + "".join(c.rjust(width) for c in self.columns)]
        for r, row in zip(self.rows, self.counts):
            lines.append(r.ljust(width) + "".join(str(v).rjust(width) for v in row))
        return "\n".join(lines) + "\n"


def confusion_matrix(records: Iterable[tuple[str, str]], candidates: Sequence[str]) -> ConfusionMatrix:
    rows = list(candidates)
    columns = rows + [OTHER]
    counts = [[0] * len(columns) for _ in rows]
    ri = {l: i for i, l in enumerate(rows)}
    ci = {l: i for i, l in enumerate(columns)}
    for intended, predicted in records:
        if intended not in ri:
            raise UnknownLanguage(f"intended language {intended!r} is not a candidate")
        if predicted not in ci:
            raise ValueError(f"prediction {predicted!r} is not a candidate or {OTHER!r}")
        counts[ri[intended]][ci[predicted]] += 1
    return ConfusionMatrix(rows, columns, counts)
