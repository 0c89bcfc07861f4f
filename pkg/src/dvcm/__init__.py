"""Annotation store and retrieval engine for dance videos.

The package models annotated footage as video -> compound scene -> scene ->
shot, classifies song structures, indexes annotations into inverted files,
and answers containment, temporal, spatial and spatiotemporal queries with
interchangeable sequential and indexed engines. A harness generates seeded
synthetic corpora, scores retrieval effectiveness, and benchmarks the two
engines against each other.
"""

from .engine import IndexedEngine, SequentialScanEngine, UnknownNameError
from .evaluation import (
    EvalReport,
    EvalRow,
    load_fixture,
    precision_recall,
    run_fixture_eval,
)
from .generator import GenParams, InfeasibleParamsError, generate_corpus
from .index import IndexMismatchError, IndexSet, build_index, load_index, save_index
from .model import (
    Corpus,
    CorpusFormatError,
    Granularity,
    IntegrityError,
    UnknownIdError,
    Violation,
    corpus_fingerprint,
    lift_granularity,
    load_corpus,
    save_corpus,
    validate_corpus,
)
from .qlang import Query, QueryParseError, format_query, parse_query
from .song_types import classify_song_type
from .temporal import ALLEN_RELATIONS, DANCER_RELATIONS, allen_relation

__version__ = "0.1.0"

__all__ = [
    "ALLEN_RELATIONS",
    "Corpus",
    "CorpusFormatError",
    "DANCER_RELATIONS",
    "EvalReport",
    "EvalRow",
    "GenParams",
    "Granularity",
    "IndexMismatchError",
    "IndexSet",
    "IndexedEngine",
    "InfeasibleParamsError",
    "IntegrityError",
    "Query",
    "QueryParseError",
    "SequentialScanEngine",
    "UnknownIdError",
    "UnknownNameError",
    "Violation",
    "allen_relation",
    "build_index",
    "classify_song_type",
    "corpus_fingerprint",
    "format_query",
    "generate_corpus",
    "lift_granularity",
    "load_corpus",
    "load_fixture",
    "load_index",
    "parse_query",
    "precision_recall",
    "run_fixture_eval",
    "save_corpus",
    "save_index",
    "validate_corpus",
]
