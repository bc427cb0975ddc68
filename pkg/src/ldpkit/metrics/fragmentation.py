from __future__ import annotations

from typing import Sequence

from ..exceptions import NoSegments, ZeroDenominator
from .tokenize import get_tokenizer


def fragmentation_ratio(pairs: Sequence[tuple[str, str]], tokenizer_x="whitespace",
                        tokenizer_en="whitespace") -> float:
    """Mean over pairs of len(tokens(x)) / len(tokens(en))."""
    pairs = list(pairs)
    if not pairs:
        raise NoSegments("fragmentation needs at least one pair")
    tx, te = get_tokenizer(tokenizer_x), get_tokenizer(tokenizer_en)
    ratios = []
    for i, (x, en) in enumerate(pairs):
        n_en = len(te(en))
        if n_en == 0:
            raise ZeroDenominator(f"pair {i}: English side has no tokens")
        ratios.append(len(tx(x)) / n_en)
    return sum(ratios) / len(ratios)
