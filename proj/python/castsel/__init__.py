"""Exemplar selection for code translation by AST subtree coverage."""

from ._castsel import *  # noqa: F401,F403
from ._castsel import (
    CoMatrix,
    CorpusEntry,
    ExemplarDatabase,
    InputError,
    ParseError,
    SelectionConfig,
    TieBreak,
    build_database,
    greedy_select,
    parse_sexpr,
    select_cast_a,
    select_cast_f,
)

__version__ = "0.1.0"
