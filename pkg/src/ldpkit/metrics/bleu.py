"""Corpus BLEU with exponential smoothing of zero higher-order precisions."""
from __future__ import annotations

import math
from collections import Counter

from .._validation import check_aligned
from .scores import MetricScore, NGramStats
from .tokenize import get_tokenizer

MAX_ORDER = 4


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hyp_tokens, ref_tokens, max_order=MAX_ORDER) -> NGramStats:
    stats = NGramStats.zeros(max_order)
    for n in range(1, max_order + 1):
        hc, rc = _ngrams(hyp_tokens, n), _ngrams(ref_tokens, n)
        stats.matched[n - 1] = sum((hc & rc).values())
        stats.hyp[n - 1] = sum(hc.values())
        stats.ref[n - 1] = sum(rc.values())
    return stats


def bleu_from_stats(stats: NGramStats, hyp_len: int, ref_len: int) -> float:
    """Score from summed counts.

    p_1 = 0 gives 0. A zero p_n for n >= 2 becomes 1 / (2**k * hyp_count_n),
    k counting the zero orders so far; an order with no hypothesis n-grams
    uses a count of 1 there.
    """
    if hyp_len == 0 or stats.matched[0] == 0:
        return 0.0
    k = 0
    log_sum = 0.0
    for n, (m, h) in enumerate(zip(stats.matched, stats.hyp), 1):
        if m > 0:
            p = m / h
        else:
            k += 1
            p = 1.0 / (2 ** k * max(h, 1))
        log_sum += math.log(p)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / hyp_len)
    return min(100.0, 100.0 * bp * math.exp(log_sum / len(stats.matched)))


def bleu(hypotheses, references, tokenizer="bleu", max_order=MAX_ORDER) -> MetricScore:
    hyps, refs = check_aligned(hypotheses, references)
    tok = get_tokenizer(tokenizer)
    total = NGramStats.zeros(max_order)
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        ht, rt = tok(h), tok(r)
        hyp_len += len(ht)
        ref_len += len(rt)
        total += bleu_stats(ht, rt, max_order)
    return MetricScore("BLEU", bleu_from_stats(total, hyp_len, ref_len), (0.0, 100.0), len(hyps))


def sentence_bleu(hypothesis: str, reference: str, tokenizer="bleu") -> float:
    return bleu([hypothesis], [reference], tokenizer).value
