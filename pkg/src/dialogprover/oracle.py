"""Independent decision procedures for propositional intuitionistic logic.

Two oracles that share nothing with the game search: a contraction-free
sequent calculus (G4ip) and a brute-force Kripke countermodel search over
small rooted frames.  Both only run on tiny formulas.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .formula import And, Atom, Formula, Implies, Not, Or, prop

__all__ = [
    "Verdict", "decide_intuitionistic", "KripkeModel", "CountermodelFound",
    "NoneUpTo", "check_bounded_kripke", "rooted_frames", "enumerate_formulas",
    "count_formulas", "NodeLimitExceeded", "forces", "kripke_models",
]


class Verdict(enum.Enum):
    VALID = "Valid"
    INVALID = "Invalid"


class NodeLimitExceeded(RuntimeError):
    pass


# --- G4ip ------------------------------------------------------------------
# Internal syntax: ("atom", name) | ("bot",) | (op, left, right) with op in
# and/or/imp.  Negation is implication into the private bottom constant.

_BOT = ("bot",)


def _internal(f: Formula) -> tuple:
    if isinstance(f, Atom):
        if f.args:
            raise ValueError(f"not propositional: {f}")
        return ("atom", f.predicate)
    if isinstance(f, Not):
        return ("imp", _internal(f.body), _BOT)
    if isinstance(f, And):
        return ("and", _internal(f.left), _internal(f.right))
    if isinstance(f, Or):
        return ("or", _internal(f.left), _internal(f.right))
    if isinstance(f, Implies):
        return ("imp", _internal(f.left), _internal(f.right))
    raise ValueError(f"not propositional: {f}")


class _G4ip:
    def __init__(self, node_limit: int):
        self.node_limit = node_limit
        self.nodes = 0
        self.prove = lru_cache(maxsize=None)(self._prove)

    def _prove(self, gamma: frozenset, goal: tuple) -> bool:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise NodeLimitExceeded(f"more than {self.node_limit} sequents")
        if _BOT in gamma or goal in gamma:
            return True
        # invertible left rules
        for f in gamma:
            op = f[0]
            rest = gamma - {f}
            if op == "and":
                return self.prove(rest | {f[1], f[2]}, goal)
            if op == "or":
                return (self.prove(rest | {f[1]}, goal)
                        and self.prove(rest | {f[2]}, goal))
            if op == "imp":
                ante, cons = f[1], f[2]
                if ante == _BOT:
                    return self.prove(rest, goal)
                if ante[0] == "atom" and ante in gamma:
                    return self.prove(rest | {cons}, goal)
                if ante[0] == "and":
                    return self.prove(rest | {("imp", ante[1], ("imp", ante[2], cons))}, goal)
                if ante[0] == "or":
                    return self.prove(rest | {("imp", ante[1], cons), ("imp", ante[2], cons)}, goal)
        # invertible right rules
        if goal[0] == "and":
            return self.prove(gamma, goal[1]) and self.prove(gamma, goal[2])
        if goal[0] == "imp":
            return self.prove(gamma | {goal[1]}, goal[2])
        # choices
        if goal[0] == "or":
            if self.prove(gamma, goal[1]) or self.prove(gamma, goal[2]):
                return True
        for f in gamma:
            if f[0] == "imp" and f[1][0] == "imp":
                (_, (_, c, d), b) = f
                rest = gamma - {f}
                if (self.prove(rest | {("imp", d, b)}, ("imp", c, d))
                        and self.prove(rest | {b}, goal)):
                    return True
        return False


def decide_intuitionistic(f: Formula, node_limit: int = 1_000_000) -> Verdict:
    """Decide propositional intuitionistic validity of ``f``."""
    prover = _G4ip(node_limit)
    return Verdict.VALID if prover.prove(frozenset(), _internal(f)) else Verdict.INVALID


# --- Kripke models ---------------------------------------------------------

@dataclass(frozen=True)
class KripkeModel:
    """A finite rooted Kripke model; world 0 is the root.

    ``above[w]`` lists every world v with w <= v (w itself included) and
    ``valuation[w]`` the atoms forced at w.
    """

    above: tuple[frozenset[int], ...]
    valuation: tuple[frozenset[str], ...]

    @property
    def size(self) -> int:
        return len(self.above)


@dataclass(frozen=True)
class CountermodelFound:
    model: KripkeModel


@dataclass(frozen=True)
class NoneUpTo:
    max_worlds: int


def forces(model: KripkeModel, w: int, f: Formula) -> bool:
    if isinstance(f, Atom):
        return f.predicate in model.valuation[w]
    if isinstance(f, And):
        return forces(model, w, f.left) and forces(model, w, f.right)
    if isinstance(f, Or):
        return forces(model, w, f.left) or forces(model, w, f.right)
    if isinstance(f, Implies):
        return all(not forces(model, v, f.left) or forces(model, v, f.right)
                   for v in model.above[w])
    if isinstance(f, Not):
        return all(not forces(model, v, f.body) for v in model.above[w])
    raise ValueError(f"not propositional: {f}")


def _canonical(n: int, order: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(1, n)):
        p = (0,) + perm
        key = tuple(sorted((p[i], p[j]) for i, j in order))
        if best is None or key < best:
            best = key
    return best  # type: ignore[return-value]


@lru_cache(maxsize=None)
def rooted_frames(n: int) -> tuple[tuple[frozenset[int], ...], ...]:
    """Rooted partial orders on ``n`` worlds, one per isomorphism class.

    Frames are returned as up-set tables; world 0 is the root.
    """
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and j != 0]
    seen = set()
    frames = []
    for bits in itertools.product((False, True), repeat=len(pairs)):
        strict = {pair for pair, b in zip(pairs, bits) if b}
        if any((0, j) not in strict for j in range(1, n)):
            continue
        if any((j, i) in strict for (i, j) in strict):
            continue
        if any((i, k) not in strict for (i, j) in strict for (j2, k) in strict
               if j == j2 and i != k):
            continue
        canon = _canonical(n, frozenset(strict))
        if canon in seen:
            continue
        seen.add(canon)
        frames.append(tuple(frozenset({w} | {j for (i, j) in canon if i == w})
                            for w in range(n)))
    return tuple(frames)


def _upsets(above: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    n = len(above)
    out = []
    for bits in itertools.product((False, True), repeat=n):
        s = frozenset(w for w in range(n) if bits[w])
        if all(above[w] <= s for w in s):
            out.append(s)
    return out


def _atom_names(f: Formula) -> list[str]:
    names: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            names.add(g.predicate)
        elif isinstance(g, Not):
            stack.append(g.body)
        else:
            stack.extend((g.left, g.right))  # type: ignore[attr-defined]
    return sorted(names)


def kripke_models(names: Sequence[str], max_worlds: int) -> Iterator[KripkeModel]:
    """Every rooted model over ``names`` with at most ``max_worlds`` worlds.

    Frames are taken up to isomorphism; each atom is valued by an up-closed
    set of worlds, so forcing of atoms is monotone by construction.
    """
    for n in range(1, max_worlds + 1):
        for above in rooted_frames(n):
            ups = _upsets(above)
            for choice in itertools.product(ups, repeat=len(names)):
                valuation = tuple(frozenset(a for a, s in zip(names, choice) if w in s)
                                  for w in range(n))
                yield KripkeModel(above, valuation)


def check_bounded_kripke(f: Formula, max_worlds: int):
    """First rooted model with at most ``max_worlds`` worlds whose root fails ``f``."""
    if not 1 <= max_worlds <= 4:
        raise ValueError("max_worlds must be between 1 and 4")
    for model in kripke_models(_atom_names(f), max_worlds):
        if not forces(model, 0, f):
            return CountermodelFound(model)
    return NoneUpTo(max_worlds)


# --- formula enumeration ---------------------------------------------------

def _exactly(atoms: tuple[Atom, ...], k: int, memo: dict) -> list[Formula]:
    if k in memo:
        return memo[k]
    if k == 0:
        out: list[Formula] = list(atoms)
    else:
        out = [Not(f) for f in _exactly(atoms, k - 1, memo)]
        for cls in (And, Or, Implies):
            for i in range(k):
                for left in _exactly(atoms, i, memo):
                    for right in _exactly(atoms, k - 1 - i, memo):
                        out.append(cls(left, right))
    memo[k] = out
    return out


def enumerate_formulas(atoms: Sequence[str], max_connectives: int,
                       exactly: bool = False) -> Iterator[Formula]:
    """Every formula over ``atoms`` with at most ``max_connectives`` connectives.

    Formulas come without duplicates, by connective count, then negations
    before conjunctions, disjunctions and implications.  With ``exactly`` only
    the formulas with exactly ``max_connectives`` connectives are produced.
    """
    base = tuple(prop(a) for a in atoms)
    memo: dict = {}
    for k in range(max_connectives if exactly else 0, max_connectives + 1):
        yield from _exactly(base, k, memo)


def count_formulas(n_atoms: int, max_connectives: int, exactly: bool = False) -> int:
    """Closed-form size of :func:`enumerate_formulas` for ``n_atoms`` atoms."""
    exact = [n_atoms]
    for k in range(1, max_connectives + 1):
        exact.append(exact[k - 1] + 3 * sum(exact[i] * exact[k - 1 - i] for i in range(k)))
    return exact[max_connectives] if exactly else sum(exact)
