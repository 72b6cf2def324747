from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import strategies as st

from dialogprover.formula import (
    And, Atom, Exists, Fn, Forall, Formula, Implies, Not, Or, Var, prop,
)
from dialogprover.tptp import combine, parse_problem

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"


def F(text: str) -> Formula:
    """Parse one TPTP formula (free variables are closed universally)."""
    return combine(parse_problem(f"fof(c, conjecture, {text})."))


p, q, r = prop("p"), prop("q"), prop("r")


@pytest.fixture
def problems_dir() -> Path:
    return PROBLEMS


# --- hypothesis strategies --------------------------------------------------

def prop_formulas(atoms=("p", "q", "r"), max_leaves: int = 8):
    leaves = st.sampled_from([prop(a) for a in atoms])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
        ),
        max_leaves=max_leaves,
    )


# fixed signature so that arities stay consistent within one problem
_PREDICATES = {"p": 1, "q": 2, "r": 0, "s": 1}
_FUNCTIONS = {"a": 0, "b": 0, "f": 1, "g": 2}


@st.composite
def _terms(draw, bound: tuple[str, ...], depth: int):
    choices = [n for n, k in _FUNCTIONS.items() if k == 0 or depth > 0]
    if bound and draw(st.booleans()):
        return Var(draw(st.sampled_from(bound)))
    functor = draw(st.sampled_from(choices))
    args = tuple(draw(_terms(bound, depth - 1)) for _ in range(_FUNCTIONS[functor]))
    return Fn(functor, args)


@st.composite
def _fo(draw, bound: tuple[str, ...], depth: int):
    kinds = ["atom"] if depth == 0 else ["atom", "not", "and", "or", "imp", "all", "ex"]
    kind = draw(st.sampled_from(kinds))
    if kind == "atom":
        pred = draw(st.sampled_from(sorted(_PREDICATES)))
        return Atom(pred, tuple(draw(_terms(bound, 2)) for _ in range(_PREDICATES[pred])))
    if kind == "not":
        return Not(draw(_fo(bound, depth - 1)))
    if kind in ("and", "or", "imp"):
        cls = {"and": And, "or": Or, "imp": Implies}[kind]
        return cls(draw(_fo(bound, depth - 1)), draw(_fo(bound, depth - 1)))
    var = draw(st.sampled_from(["X", "Y", "Z"]))
    cls = Forall if kind == "all" else Exists
    return cls(var, draw(_fo(bound + (var,), depth - 1)))


def closed_fo_formulas(max_depth: int = 4):
    """Closed first-order formulas over a fixed signature."""
    return st.integers(0, max_depth).flatmap(lambda d: _fo((), d))
