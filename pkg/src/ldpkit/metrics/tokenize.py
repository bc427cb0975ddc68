"""Pluggable tokenizers. A tokenizer is any callable ``str -> list[str]``."""
from __future__ import annotations

import unicodedata
from pathlib import Path
from typing import Callable

Tokenizer = Callable[[str], list]


def whitespace(text: str) -> list[str]:
    return text.split()


def character(text: str) -> list[str]:
    return [ch for ch in text if not ch.isspace()]


def byte(text: str) -> list[int]:
    return list(text.encode("utf-8"))


def bleu_default(text: str) -> list[str]:
    """Whitespace split with every punctuation character isolated as its own token."""
    out = []
    for word in text.split():
        buf = []
        for ch in word:
            if unicodedata.category(ch).startswith("P"):
                if buf:
                    out.append("".join(buf))
                    buf = []
                out.append(ch)
            else:
                buf.append(ch)
        if buf:
            out.append("".join(buf))
    return out


class VocabTokenizer:
    """Greedy longest-match-first segmentation against a fixed vocabulary.

    Applied to each whitespace-separated word; a character with no matching
    vocabulary entry becomes a single-character token.
    """

    def __init__(self, vocab):
        self.vocab = frozenset(v for v in vocab if v)
        self.max_len = max((len(v) for v in self.vocab), default=1)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls(line.rstrip("\r\n") for line in f)

    def __call__(self, text: str) -> list[str]:
        out = []
        for word in text.split():
            i = 0
            while i < len(word):
                for j in range(min(len(word), i + self.max_len), i, -1):
                    if word[i:j] in self.vocab:
                        out.append(word[i:j])
                        i = j
                        break
                else:
                    out.append(word[i])
                    i += 1
        return out


_NAMED = {"whitespace": whitespace, "character": character, "char": character,
          "byte": byte, "bleu": bleu_default, "13a": bleu_default}


def get_tokenizer(spec) -> Tokenizer:
    """Resolve a tokenizer from a callable, a name, or ``vocab:<path>``."""
    if callable(spec):
        return spec
    if spec in _NAMED:
        return _NAMED[spec]
    if isinstance(spec, str) and spec.startswith("vocab:"):
        return VocabTokenizer.from_file(spec[len("vocab:"):])
    if isinstance(spec, Path):
        return VocabTokenizer.from_file(spec)
    raise ValueError(f"unknown tokenizer {spec!r}")
