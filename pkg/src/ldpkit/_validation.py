"""Input validation helpers shared by the estimators and metric functions."""
from __future__ import annotations

from collections.abc import Mapping

from .exceptions import Misaligned, NoSegments


def check_text(text, name="text"):
    if not isinstance(text, str):
        raise TypeError(f"{name} must be str, got {type(text).__name__}")
    return text


def check_texts(texts, name="texts"):
    """Materialise an iterable of strings into a list, rejecting a bare str."""
    if isinstance(texts, str):
        raise TypeError(f"{name} must be a sequence of str, not a single str")
    out = list(texts)
    for i, t in enumerate(out):
        if not isinstance(t, str):
            raise TypeError(f"{name}[{i}] must be str, got {type(t).__name__}")
    return out


def check_aligned(hypotheses, references):
    hyps = check_texts(hypotheses, "hypotheses")
    refs = check_texts(references, "references")
    if len(hyps) != len(refs):
        raise Misaligned(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise NoSegments("at least one segment is required")
    return hyps, refs


def check_line_free(text, name="text"):
    if "\n" in text or "\r" in text:
        raise ValueError(f"{name} must not contain line breaks: {text!r}")
    return text


def check_positive(value, name):
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_mapping(obj, name):
    if not isinstance(obj, Mapping):
        raise TypeError(f"{name} must be a mapping, got {type(obj).__name__}")
    return obj
