"""Intuitionistic first-order theorem proving by dialogue-game strategy search."""
from .engine import Ruleset, RepeatIdentity, Variant
from .formula import Formula
from .search import PreferDefense, SearchConfig, SzsStatus, decide, search, verify_strategy
from .tptp import combine, parse_file, parse_problem

__version__ = "0.1.0"

__all__ = [
    "Formula", "Ruleset", "RepeatIdentity", "Variant", "PreferDefense",
    "SearchConfig", "SzsStatus", "decide", "search", "verify_strategy",
    "combine", "parse_file", "parse_problem", "__version__",
]
