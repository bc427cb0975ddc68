"""Language registry and script classification."""
from __future__ import annotations

import bisect
import enum
import json
import unicodedata
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .exceptions import UnknownLanguage


class Script(str, enum.Enum):
    LATIN = "Latin"
    DEVANAGARI = "Devanagari"
    BENGALI = "Bengali"
    TAMIL = "Tamil"
    TELUGU = "Telugu"
    KANNADA = "Kannada"
    MALAYALAM = "Malayalam"
    ODIA = "Odia"
    GUJARATI = "Gujarati"
    GURMUKHI = "Gurmukhi"
    ARABIC = "Arabic"
    HAN = "Han"
    CYRILLIC = "Cyrillic"
    OTHER = "Other"

    def __str__(self):
        return self.value


ALL_SCRIPTS = frozenset(Script)
NON_LATIN_SCRIPTS = ALL_SCRIPTS - {Script.LATIN}

# Inclusive code point ranges, sorted by start.
_RANGES = sorted([
    (0x0041, 0x005A, Script.LATIN),
    (0x0061, 0x007A, Script.LATIN),
    (0x00AA, 0x00AA, Script.LATIN),
    (0x00BA, 0x00BA, Script.LATIN),
    (0x00C0, 0x024F, Script.LATIN),
    (0x0250, 0x02AF, Script.LATIN),
    (0x1D00, 0x1DBF, Script.LATIN),
    (0x1E00, 0x1EFF, Script.LATIN),
    (0x2C60, 0x2C7F, Script.LATIN),
    (0xA720, 0xA7FF, Script.LATIN),
    (0xAB30, 0xAB6F, Script.LATIN),
    (0xFB00, 0xFB06, Script.LATIN),
    (0xFF21, 0xFF3A, Script.LATIN),
    (0xFF41, 0xFF5A, Script.LATIN),
    (0x0400, 0x052F, Script.CYRILLIC),
    (0x1C80, 0x1C8F, Script.CYRILLIC),
    (0x2DE0, 0x2DFF, Script.CYRILLIC),
    (0xA640, 0xA69F, Script.CYRILLIC),
    (0x0600, 0x06FF, Script.ARABIC),
    (0x0750, 0x077F, Script.ARABIC),
    (0x0870, 0x08FF, Script.ARABIC),
    (0xFB50, 0xFDFF, Script.ARABIC),
    (0xFE70, 0xFEFF, Script.ARABIC),
    (0x0900, 0x097F, Script.DEVANAGARI),
    (0xA8E0, 0xA8FF, Script.DEVANAGARI),
    (0x0980, 0x09FF, Script.BENGALI),
    (0x0A00, 0x0A7F, Script.GURMUKHI),
    (0x0A80, 0x0AFF, Script.GUJARATI),
    (0x0B00, 0x0B7F, Script.ODIA),
    (0x0B80, 0x0BFF, Script.TAMIL),
    (0x0C00, 0x0C7F, Script.TELUGU),
    (0x0C80, 0x0CFF, Script.KANNADA),
    (0x0D00, 0x0D7F, Script.MALAYALAM),
    (0x2E80, 0x2FDF, Script.HAN),
    (0x3005, 0x3007, Script.HAN),
    (0x3021, 0x3029, Script.HAN),
    (0x3400, 0x4DBF, Script.HAN),
    (0x4E00, 0x9FFF, Script.HAN),
    (0xF900, 0xFAFF, Script.HAN),
    (0x20000, 0x323AF, Script.HAN),
], key=lambda r: r[0])
_STARTS = [r[0] for r in _RANGES]


def char_script(ch: str) -> Script | None:
    """Script class of a single letter or mark, or None for anything else.

    Marks outside every script range (e.g. U+0301 COMBINING ACUTE) return
    ``Script.OTHER`` here; :func:`script_histogram` reassigns them to the
    preceding letter's script.
    """
    cat = unicodedata.category(ch)
    if cat[0] not in "LM":
        return None
    cp = ord(ch)
    i = bisect.bisect_right(_STARTS, cp) - 1
    if i >= 0 and cp <= _RANGES[i][1]:
        return _RANGES[i][2]
    return Script.OTHER


@dataclass(frozen=True)
class ScriptHistogram:
    counts: Mapping[Script, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("histogram counts do not sum to total")


def script_histogram(text: str) -> ScriptHistogram:
    counts: Counter = Counter()
    prev = None
    for ch in text:
        script = char_script(ch)
        if script is None:
            prev = None
            continue
        if script is Script.OTHER and unicodedata.category(ch)[0] == "M" and prev is not None:
            script = prev
        counts[script] += 1
        prev = script
    return ScriptHistogram(dict(counts), sum(counts.values()))


@dataclass(frozen=True)
class Ambiguous:
    """Returned by :func:`dominant_script` when no single script wins."""

    scripts: frozenset = field(default_factory=frozenset)


def dominant_script(text: str) -> Script | Ambiguous:
    hist = script_histogram(text)
    if not hist.total:
        return Ambiguous(frozenset())
    best = max(hist.counts.values())
    winners = frozenset(s for s, c in hist.counts.items() if c == best)
    if len(winners) == 1:
        return next(iter(winners))
    return Ambiguous(winners)


def letter_ratio(text: str, scripts: Iterable[Script]) -> float:
    """Fraction of letters (marks included) that belong to ``scripts``."""
    hist = script_histogram(text)
    if not hist.total:
        return 0.0
    wanted = {Script(s) for s in scripts}
    return sum(c for s, c in hist.counts.items() if s in wanted) / hist.total


@dataclass(frozen=True)
class LanguageSpec:
    code: str
    english_name: str
    native_name: str
    script_class: Script
    resource_tier: str = "low"

    def __post_init__(self):
        if not self.code:
            raise ValueError("language code must be non-empty")
        if not self.english_name:
            raise ValueError(f"english_name missing for {self.code!r}")
        object.__setattr__(self, "script_class", Script(self.script_class))
        if not self.native_name:
            object.__setattr__(self, "native_name", self.english_name)
        if self.resource_tier not in ("high", "low"):
            raise ValueError(f"resource_tier must be 'high' or 'low', got {self.resource_tier!r}")

    def to_dict(self):
        d = asdict(self)
        d["script_class"] = self.script_class.value
        return d


class Registry:
    """Immutable mapping from language code to :class:`LanguageSpec`."""

    def __init__(self, specs: Iterable[LanguageSpec] = ()):
        self._specs: dict[str, LanguageSpec] = {}
        for spec in specs:
            if spec.code in self._specs:
                raise ValueError(f"duplicate language code {spec.code!r}")
            self._specs[spec.code] = spec

    def __getitem__(self, code: str) -> LanguageSpec:
        try:
            return self._specs[code]
        except KeyError:
            raise UnknownLanguage(f"language {code!r} is not registered") from None

    def get(self, code, default=None):
        return self._specs.get(code, default)

    def __contains__(self, code):
        return code in self._specs

    def __iter__(self):
        return iter(self._specs.values())

    def __len__(self):
        return len(self._specs)

    @property
    def codes(self) -> list[str]:
        return list(self._specs)

    def english_name(self, code):
        return self[code].english_name

    def native_name(self, code):
        return self[code].native_name

    def by_name(self, name: str) -> LanguageSpec | None:
        """Reverse lookup by English or native tag name."""
        for spec in self._specs.values():
            if name in (spec.english_name, spec.native_name):
                return spec
        return None

    def extended(self, specs: Iterable[LanguageSpec]) -> "Registry":
        """New registry where ``specs`` add to or override existing entries."""
        merged = dict(self._specs)
        for spec in specs:
            merged[spec.code] = spec
        return Registry(merged.values())

    @classmethod
    def from_jsonl(cls, lines: Iterable[str]) -> "Registry":
        return cls(read_registry_lines(lines))

    @classmethod
    def from_file(cls, path) -> "Registry":
        with open(path, encoding="utf-8") as f:
            return cls.from_jsonl(f)


def read_registry_lines(lines: Iterable[str]) -> list[LanguageSpec]:
    specs = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        specs.append(LanguageSpec(
            code=rec["code"],
            english_name=rec["english_name"],
            native_name=rec.get("native_name") or rec["english_name"],
            script_class=rec["script_class"],
            resource_tier=rec.get("resource_tier", "low"),
        ))
    return specs


_DEFAULT: Registry | None = None


def default_registry() -> Registry:
    """Shipped registry: 34 low-resource languages, the LDP set, En and a few extras."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("ldpkit").joinpath("data/registry.jsonl").read_text(encoding="utf-8")
        _DEFAULT = Registry.from_jsonl(text.splitlines())
    return _DEFAULT


def load_registry(path: str | Path | None = None) -> Registry:
    """Default registry, extended/overridden by the records in ``path`` if given."""
    reg = default_registry()
    if path is None:
        return reg
    with open(path, encoding="utf-8") as f:
        return reg.extended(read_registry_lines(f))


def foreign_scripts(spec: LanguageSpec) -> frozenset:
    """Scripts that count against a language in the character-ratio filter."""
    if spec.script_class is Script.LATIN:
        return NON_LATIN_SCRIPTS
    return frozenset({Script.LATIN})
