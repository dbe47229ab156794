"""Levy-flight adaptive particle swarm search for adversarial text test cases."""
__version__ = "0.1.0"

from leap.kernels import BACKEND
from leap.lexicon import StopwordList, SynonymLexicon, load_stopwords, load_wordnet, synonyms
from leap.search import SearchConfig, SearchResult, run
from leap.text import CandidateText, TokenizedText, change_rate, realize, tokenize
from leap.victim import Prediction, fitness, http_victim, is_adversarial, keyword_victim, naive_bayes_train

__all__ = [
    "BACKEND",
    "CandidateText",
    "Prediction",
    "SearchConfig",
    "SearchResult",
    "StopwordList",
    "SynonymLexicon",
    "TokenizedText",
    "change_rate",
    "fitness",
    "http_victim",
    "is_adversarial",
    "keyword_victim",
    "load_stopwords",
    "load_wordnet",
    "naive_bayes_train",
    "realize",
    "run",
    "synonyms",
    "tokenize",
]
