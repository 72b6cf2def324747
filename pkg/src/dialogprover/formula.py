"""First-order syntax: terms, formulas and the syntactic helpers the game uses.

Formulas are immutable and hash-consed only in the weak sense that every node
caches its hash.  Subformulas are freely shared, so a formula obtained by
expanding nested biconditionals is a DAG whose tree size can be exponential in
its node count.  Every traversal here therefore memoizes on node identity.
"""
from __future__ import annotations

from typing import Callable, Iterator, TypeVar

__all__ = [
    "Term", "Var", "Fn", "Formula", "Atom", "Not", "And", "Or", "Implies",
    "Forall", "Exists", "Quantified", "Binary",
    "substitute", "free_variables", "is_atomic", "closed_subterms",
    "is_closed", "is_propositional", "is_quantifier_free", "atoms", "const", "prop",
    "conj", "iff", "subformulas", "dag_size", "term_is_closed",
]

T = TypeVar("T")


class _Node:
    __slots__ = ("_hash",)

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:  # type: ignore[attr-defined]
            return False
        return self._fields() == other._fields()  # type: ignore[attr-defined]

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), self._fields())


# --- terms -----------------------------------------------------------------

class Term(_Node):
    __slots__ = ()


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("Var", name)))

    def _fields(self):
        return (self.name,)

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class Fn(Term):
    """Function application; constants are 0-ary applications."""

    __slots__ = ("functor", "args")

    def __init__(self, functor: str, args: tuple[Term, ...] = ()):
        if not functor:
            raise ValueError("functor symbol must be nonempty")
        args = tuple(args)
        object.__setattr__(self, "functor", functor)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("Fn", functor, args)))

    def _fields(self):
        return (self.functor, self.args)

    def __repr__(self):
        if not self.args:
            return f"Fn({self.functor!r})"
        return f"Fn({self.functor!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(map(str, self.args))})"


def const(name: str) -> Fn:
    return Fn(name, ())


def term_is_closed(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(term_is_closed(a) for a in t.args)


# --- formulas --------------------------------------------------------------

class Formula(_Node):
    __slots__ = ()


class Atom(Formula):
    __slots__ = ("predicate", "args")

    def __init__(self, predicate: str, args: tuple[Term, ...] = ()):
        if not predicate:
            raise ValueError("predicate symbol must be nonempty")
        args = tuple(args)
        object.__setattr__(self, "predicate", predicate)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("Atom", predicate, args)))

    def _fields(self):
        return (self.predicate, self.args)

    def __repr__(self):
        if not self.args:
            return f"Atom({self.predicate!r})"
        return f"Atom({self.predicate!r}, {self.args!r})"


class Not(Formula):
    __slots__ = ("body",)

    def __init__(self, body: Formula):
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "_hash", hash(("Not", body._hash)))

    def _fields(self):
        return (self.body,)

    def __repr__(self):
        return f"Not({self.body!r})"


class Binary(Formula):
    __slots__ = ("left", "right")
    symbol = "?"

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_hash",
                           hash((type(self).__name__, left._hash, right._hash)))

    def _fields(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(Binary):
    __slots__ = ()
    symbol = "&"


class Or(Binary):
    __slots__ = ()
    symbol = "|"


class Implies(Binary):
    __slots__ = ()
    symbol = "=>"


class Quantified(Formula):
    __slots__ = ("var", "body")
    symbol = "?"

    def __init__(self, var: str, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "_hash",
                           hash((type(self).__name__, var, body._hash)))

    def _fields(self):
        return (self.var, self.body)

    def __repr__(self):
        return f"{type(self).__name__}({self.var!r}, {self.body!r})"


class Forall(Quantified):
    __slots__ = ()
    symbol = "!"


class Exists(Quantified):
    __slots__ = ()
    symbol = "?"


def prop(name: str) -> Atom:
    return Atom(name, ())


def conj(formulas: list[Formula]) -> Formula:
    """Right-nested conjunction of a nonempty list, preserving order."""
    if not formulas:
        raise ValueError("conjunction of an empty list")
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = And(f, result)
    return result


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


# --- rendering -------------------------------------------------------------

def _render(f: Formula, memo: dict[int, str]) -> str:
    key = id(f)
    if key in memo:
        return memo[key]
    if isinstance(f, Atom):
        s = f.predicate if not f.args else f"{f.predicate}({','.join(map(str, f.args))})"
    elif isinstance(f, Not):
        s = f"~ {_render(f.body, memo)}"
    elif isinstance(f, Binary):
        s = f"({_render(f.left, memo)} {f.symbol} {_render(f.right, memo)})"
    elif isinstance(f, Quantified):
        s = f"{f.symbol} [{f.var}] : {_render(f.body, memo)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[key] = s
    return s


def _formula_str(self: Formula) -> str:
    return _render(self, {})


Formula.__str__ = _formula_str  # type: ignore[method-assign]


# --- traversals ------------------------------------------------------------

def _fold(f: Formula, leaf: Callable[[Atom], T],
          node: Callable[[Formula, list[T]], T]) -> T:
    memo: dict[int, T] = {}

    def go(g: Formula) -> T:
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            r = leaf(g)
        elif isinstance(g, Not):
            r = node(g, [go(g.body)])
        elif isinstance(g, Binary):
            r = node(g, [go(g.left), go(g.right)])
        elif isinstance(g, Quantified):
            r = node(g, [go(g.body)])
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    return go(f)


def _term_vars(t: Term, acc: set[str]) -> None:
    if isinstance(t, Var):
        acc.add(t.name)
    else:
        for a in t.args:
            _term_vars(a, acc)


def free_variables(f: Formula) -> frozenset[str]:
    def leaf(a: Atom) -> frozenset[str]:
        acc: set[str] = set()
        for t in a.args:
            _term_vars(t, acc)
        return frozenset(acc)

    def node(g: Formula, parts: list[frozenset[str]]) -> frozenset[str]:
        fv = frozenset().union(*parts)
        if isinstance(g, Quantified):
            fv = fv - {g.var}
        return fv

    return _fold(f, leaf, node)


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


def is_atomic(f: object) -> bool:
    return isinstance(f, Atom)


def _closed_subterms_of_term(t: Term, acc: set[Term]) -> bool:
    if isinstance(t, Var):
        return False
    closed = True
    for a in t.args:
        closed = _closed_subterms_of_term(a, acc) and closed
    if closed:
        acc.add(t)
    return closed


def closed_subterms(f: Formula) -> frozenset[Term]:
    """All closed terms occurring in ``f``, nested subterms included."""
    def leaf(a: Atom) -> frozenset[Term]:
        acc: set[Term] = set()
        for t in a.args:
            _closed_subterms_of_term(t, acc)
        return frozenset(acc)

    return _fold(f, leaf, lambda g, parts: frozenset().union(*parts))


def atoms(f: Formula) -> frozenset[Atom]:
    return _fold(f, lambda a: frozenset([a]),
                 lambda g, parts: frozenset().union(*parts))


def is_propositional(f: Formula) -> bool:
    """True iff ``f`` has no quantifiers and only 0-ary predicates."""
    return _fold(f, lambda a: not a.args,
                 lambda g, parts: not isinstance(g, Quantified) and all(parts))


def is_quantifier_free(f: Formula) -> bool:
    return _fold(f, lambda a: True,
                 lambda g, parts: not isinstance(g, Quantified) and all(parts))


def subformulas(f: Formula) -> Iterator[Formula]:
    """Distinct subformula nodes of ``f`` (by identity), parents first."""
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        if isinstance(g, Not) or isinstance(g, Quantified):
            stack.append(g.body)
        elif isinstance(g, Binary):
            stack.extend((g.right, g.left))


def dag_size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


# --- substitution ----------------------------------------------------------

def _subst_term(t: Term, x: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == x else t
    if not t.args:
        return t
    new = tuple(_subst_term(a, x, s) for a in t.args)
    return t if all(n is o for n, o in zip(new, t.args)) else Fn(t.functor, new)


def substitute(f: Formula, x: str, t: Term) -> Formula:
    """Replace the free occurrences of variable ``x`` in ``f`` by closed ``t``."""
    if not term_is_closed(t):
        raise ValueError(f"substitution of open term {t} for {x}")
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            args = tuple(_subst_term(a, x, t) for a in g.args)
            r: Formula = g if all(n is o for n, o in zip(args, g.args)) else Atom(g.predicate, args)
        elif isinstance(g, Not):
            b = go(g.body)
            r = g if b is g.body else Not(b)
        elif isinstance(g, Binary):
            left, right = go(g.left), go(g.right)
            r = g if (left is g.left and right is g.right) else type(g)(left, right)
        elif isinstance(g, Quantified):
            if g.var == x:
                r = g
            else:
                b = go(g.body)
                r = g if b is g.body else type(g)(g.var, b)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    return go(f)
