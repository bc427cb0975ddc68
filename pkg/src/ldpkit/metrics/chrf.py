"""chrF++: character 6-grams (whitespace removed) plus word uni/bigrams, beta = 2."""
from __future__ import annotations

from collections import Counter

from .._validation import check_aligned
from .scores import MetricScore, NGramStats

CHAR_ORDER = 6
WORD_ORDER = 2
BETA = 2.0


def _ngrams(seq, n):
    return Counter(tuple(seq[i:i + n]) for i in range(len(seq) - n + 1))


def chrf_stats(hyp: str, ref: str, char_order=CHAR_ORDER, word_order=WORD_ORDER) -> NGramStats:
    stats = NGramStats.zeros(char_order + word_order)
    hyp_chars, ref_chars = "".join(hyp.split()), "".join(ref.split())
    hyp_words, ref_words = hyp.split(), ref.split()
    units = [(hyp_chars, ref_chars, n) for n in range(1, char_order + 1)]
    units += [(hyp_words, ref_words, n) for n in range(1, word_order + 1)]
    for k, (h, r, n) in enumerate(units):
        hc, rc = _ngrams(h, n), _ngrams(r, n)
        stats.matched[k] = sum((hc & rc).values())
        stats.hyp[k] = sum(hc.values())
        stats.ref[k] = sum(rc.values())
    return stats


def chrf_from_stats(stats: NGramStats, beta=BETA) -> float:
    precisions, recalls = [], []
    for m, h, r in zip(stats.matched, stats.hyp, stats.ref):
        if h == 0 and r == 0:
            continue
        precisions.append(m / h if h else 0.0)
        recalls.append(m / r if r else 0.0)
    if not precisions:
        return 0.0
    p = sum(precisions) / len(precisions)
    r = sum(recalls) / len(recalls)
    if p + r == 0:
        return 0.0
    b2 = beta * beta
    return 100.0 * (1 + b2) * p * r / (b2 * p + r)


def chrf_pp(hypotheses, references, char_order=CHAR_ORDER, word_order=WORD_ORDER,
            beta=BETA) -> MetricScore:
    """Corpus chrF++ from n-gram counts summed over all segments."""
    hyps, refs = check_aligned(hypotheses, references)
    total = NGramStats.zeros(char_order + word_order)
    for h, r in zip(hyps, refs):
        total += chrf_stats(h, r, char_order, word_order)
    name = "chrF++" if word_order else "chrF"
    return MetricScore(name, chrf_from_stats(total, beta), (0.0, 100.0), len(hyps))


def sentence_chrf_pp(hypothesis: str, reference: str, **kwargs) -> float:
    return chrf_pp([hypothesis], [reference], **kwargs).value
