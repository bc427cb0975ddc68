from .bleu import bleu, sentence_bleu
from .chrf import chrf_pp, chrf_stats, sentence_chrf_pp
from .fragmentation import fragmentation_ratio
from .lid import (OTHER, ConfusionMatrix, LanguageIdentifier, confusion_matrix, lid_classify,
                  lid_train)
from .rouge import RougeL, rouge_l
from .scores import MetricScore, NGramStats
from .tokenize import VocabTokenizer, get_tokenizer

__all__ = [
    "bleu", "sentence_bleu", "chrf_pp", "chrf_stats", "sentence_chrf_pp", "fragmentation_ratio",
    "OTHER", "ConfusionMatrix", "LanguageIdentifier", "confusion_matrix", "lid_classify",
    "lid_train", "RougeL", "rouge_l", "MetricScore", "NGramStats", "VocabTokenizer",
    "get_tokenizer",
]
