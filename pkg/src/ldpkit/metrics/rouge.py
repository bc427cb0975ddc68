from __future__ import annotations

from typing import NamedTuple

from .tokenize import get_tokenizer


class RougeL(NamedTuple):
    precision: float
    recall: float
    f: float


def lcs_length(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(hypothesis: str, reference: str, tokenizer="whitespace") -> RougeL:
    """LCS-based precision, recall and F1 over tokens; all zero for empty input."""
    tok = get_tokenizer(tokenizer)
    h, r = tok(hypothesis), tok(reference)
    if not h or not r:
        return RougeL(0.0, 0.0, 0.0)
    lcs = lcs_length(h, r)
    if lcs == 0:
        return RougeL(0.0, 0.0, 0.0)
    p, rec = lcs / len(h), lcs / len(r)
    return RougeL(p, rec, 2 * p * rec / (p + rec))
