"""Linguistically-diverse prompting toolkit for low-resource translation and summarization."""
from .corpus import CorpusFilter, TemperatureSampler
from .lang import LanguageSpec, Registry, Script, default_registry
from .metrics import LanguageIdentifier
from .prompt import DocSumExemplar, Exemplar, PivotTriplet, PromptText, TagStyle

__version__ = "0.1.0"

__all__ = [
    "CorpusFilter", "TemperatureSampler", "LanguageSpec", "Registry", "Script",
    "default_registry", "LanguageIdentifier", "DocSumExemplar", "Exemplar", "PivotTriplet",
    "PromptText", "TagStyle",
]
