"""Smatch scoring for sentence and document graphs."""
from .pool import candidate_pool, unary_weights
from .search import SearchConfig, SmatchResult, exact_match, hill_climb, match_count
from .subscore import coref_counts, coref_subscore, prf
from .triples import TripleSet, extract_triples

__all__ = [
    "SearchConfig", "SmatchResult", "TripleSet", "candidate_pool", "coref_counts",
    "coref_subscore", "exact_match", "extract_triples", "hill_climb", "match_count",
    "prf", "unary_weights",
]
