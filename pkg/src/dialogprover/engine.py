"""The dialogue game: statements, moves, particle and structural rules.

A :class:`Dialogue` is an immutable value.  Its bookkeeping (open attacks,
formulas asserted by the Opponent, attacked Proponent moves, term pool) is a
cache over the move list and can always be rebuilt with
:meth:`Dialogue.replay`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .formula import (
    And, Atom, Exists, Fn, Forall, Formula, Implies, Not, Or, Term,
    atoms, closed_subterms, free_variables, substitute, term_is_closed,
)

__all__ = [
    "Player", "PRO", "OPP", "Stance", "ATTACK", "DEFEND",
    "SymbolicAttack", "Question", "LeftConjunct", "RightConjunct",
    "WhichInstance", "QUESTION", "LEFT", "RIGHT", "Statement", "Move",
    "Variant", "RepeatIdentity", "Ruleset", "is_repeat", "move_identity", "Dialogue", "IllegalMove", "Outcome",
    "initial_dialogue", "attack_options", "defense_options", "legal_moves",
    "apply_move", "winner", "check_move", "render_statement", "render_move",
    "render_dialogue",
]


class Player(enum.Enum):
    PRO = "P"
    OPP = "O"

    @property
    def other(self) -> "Player":
        return OPP if self is PRO else PRO


PRO, OPP = Player.PRO, Player.OPP


class Stance(enum.Enum):
    ATTACK = "attack"
    DEFEND = "defend"


ATTACK, DEFEND = Stance.ATTACK, Stance.DEFEND


# --- statements ------------------------------------------------------------

class SymbolicAttack:
    """An attack that asserts no formula."""

    __slots__ = ()

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self).__name__)


class Question(SymbolicAttack):
    __slots__ = ()

    def __repr__(self):
        return "Question()"


class LeftConjunct(SymbolicAttack):
    __slots__ = ()

    def __repr__(self):
        return "LeftConjunct()"


class RightConjunct(SymbolicAttack):
    __slots__ = ()

    def __repr__(self):
        return "RightConjunct()"


class WhichInstance(SymbolicAttack):
    __slots__ = ("term",)

    def __init__(self, term: Term):
        if not term_is_closed(term):
            raise ValueError(f"instance attack with open term {term}")
        self.term = term

    def __eq__(self, other):
        return isinstance(other, WhichInstance) and self.term == other.term

    def __hash__(self):
        return hash(("WhichInstance", self.term))

    def __repr__(self):
        return f"WhichInstance({self.term!r})"


QUESTION = Question()
LEFT = LeftConjunct()
RIGHT = RightConjunct()

Statement = Union[Formula, SymbolicAttack]


@dataclass(frozen=True)
class Move:
    player: Player
    statement: Statement
    stance: Optional[Stance] = None
    reference: Optional[int] = None

    @property
    def asserts_formula(self) -> bool:
        return isinstance(self.statement, Formula)


class Variant(enum.Enum):
    D = "d"
    E = "e"


class RepeatIdentity(enum.Enum):
    """When two moves count as the same move for the No-Repeats filter.

    ``MOVE``: same player, statement, stance and referenced move index.
    ``RELEVANT_ATOMS``: as ``MOVE``, except that the Proponent may repeat a
    formula-asserting move once the Opponent has conceded, since the reply to
    the earlier occurrence, an atom that occurs in the asserted formula.
    """

    MOVE = "move"
    RELEVANT_ATOMS = "relevant-atoms"


@dataclass(frozen=True)
class Ruleset:
    """Which structural rules are in force.

    ``max_fresh_constants`` bounds how many fresh constants a dialogue may
    introduce (the seed constant of a term-free formula included).
    """

    variant: Variant = Variant.E
    no_repeats: bool = True
    max_fresh_constants: int = 3
    repeat_identity: RepeatIdentity = RepeatIdentity.RELEVANT_ATOMS

    def __post_init__(self):
        if self.max_fresh_constants < 1:
            raise ValueError("max_fresh_constants must be at least 1")


class IllegalMove(ValueError):
    def __init__(self, rule: str, move: Optional[Move] = None, detail: str = ""):
        self.rule = rule
        self.move = move
        super().__init__(f"{rule}: {detail}" if detail else rule)


class Outcome(enum.Enum):
    PRO_WINS = "ProWins"
    OPP_WINS = "OppWins"
    ONGOING = "Ongoing"


# --- particle rules --------------------------------------------------------

def attack_options(asserted: Formula, candidates: Sequence[Term] = ()) -> list[Statement]:
    """Attacks on ``asserted``; ``candidates`` are the terms for a universal."""
    if isinstance(asserted, And):
        return [LEFT, RIGHT]
    if isinstance(asserted, (Or, Exists)):
        return [QUESTION]
    if isinstance(asserted, Implies):
        return [asserted.left]
    if isinstance(asserted, Not):
        return [asserted.body]
    if isinstance(asserted, Forall):
        return [WhichInstance(t) for t in candidates]
    if isinstance(asserted, Atom):
        raise ValueError(f"atomic formula {asserted} cannot be attacked")
    raise TypeError(f"not a formula: {asserted!r}")


def defense_options(attacked: Formula, attack: Statement,
                    candidates: Sequence[Term] = ()) -> list[Formula]:
    """Defenses of ``attacked`` against ``attack``; ``candidates`` serve an existential."""
    if isinstance(attacked, And):
        if attack == LEFT:
            return [attacked.left]
        if attack == RIGHT:
            return [attacked.right]
    elif isinstance(attacked, Or):
        if attack == QUESTION:
            return [attacked.left, attacked.right]
    elif isinstance(attacked, Implies):
        if attack == attacked.left:
            return [attacked.right]
    elif isinstance(attacked, Not):
        if attack == attacked.body:
            return []
    elif isinstance(attacked, Forall):
        if isinstance(attack, WhichInstance):
            return [substitute(attacked.body, attacked.var, attack.term)]
    elif isinstance(attacked, Exists):
        if attack == QUESTION:
            return [substitute(attacked.body, attacked.var, t) for t in candidates]
    raise ValueError(f"{render_statement(attack)} is not an attack on {attacked}")


# --- dialogues -------------------------------------------------------------

def _fresh_name(index: int, reserved: frozenset[str]) -> str:
    k = index
    while f"c{k}" in reserved:
        k += 1
    return f"c{k}"


def _symbols(f: Formula) -> frozenset[str]:
    """Every function symbol of ``f``, including those applied to variables."""
    names: set[str] = set()
    stack: list[Term] = [t for a in atoms(f) for t in a.args]
    while stack:
        t = stack.pop()
        if isinstance(t, Fn):
            names.add(t.functor)
            stack.extend(t.args)
    return frozenset(names)


def _statement_terms(s: Statement) -> frozenset[Term]:
    if isinstance(s, WhichInstance):
        acc: set[Term] = set()
        stack: list[Term] = [s.term]
        while stack:
            t = stack.pop()
            acc.add(t)
            stack.extend(t.args)  # type: ignore[attr-defined]
        return frozenset(acc)
    if isinstance(s, Formula):
        return closed_subterms(s)
    return frozenset()


class Dialogue:
    """A legal sequence of moves together with its cached bookkeeping.

    ``history`` maps the identity ``(player, statement, stance, reference)``
    of every move made so far to the atoms the Opponent had conceded right
    after it (for a Proponent move: after the Opponent's reply to it).
    """

    __slots__ = ("moves", "open_attacks", "opp_formulas", "attacked",
                 "defended", "pool", "fresh_count", "reserved", "history")

    def __init__(self, moves, open_attacks, opp_formulas, attacked, defended,
                 pool, fresh_count, reserved, history):
        self.moves: tuple[Move, ...] = moves
        self.open_attacks: tuple[int, ...] = open_attacks
        self.opp_formulas: frozenset[Formula] = opp_formulas
        self.attacked: frozenset[int] = attacked
        self.defended: frozenset[int] = defended
        self.pool: tuple[Term, ...] = pool
        self.fresh_count: int = fresh_count
        self.reserved: frozenset[str] = reserved
        self.history: dict[tuple, frozenset[Atom]] = history

    def __len__(self) -> int:
        return len(self.moves)

    def __repr__(self) -> str:
        return f"Dialogue({len(self.moves)} moves)"

    def __eq__(self, other) -> bool:
        return isinstance(other, Dialogue) and self.moves == other.moves

    def __hash__(self) -> int:
        return hash(self.moves)

    @property
    def initial_formula(self) -> Formula:
        return self.moves[0].statement  # type: ignore[return-value]

    @property
    def to_move(self) -> Player:
        return PRO if len(self.moves) % 2 == 0 else OPP

    @property
    def opp_atoms(self) -> frozenset[Atom]:
        return frozenset(f for f in self.opp_formulas if isinstance(f, Atom))

    def bookkeeping(self) -> tuple:
        return (self.open_attacks, self.opp_formulas, self.attacked,
                self.defended, self.pool, self.fresh_count, self.history)

    def fresh_candidate(self, rules: Ruleset) -> Optional[Term]:
        if self.fresh_count >= rules.max_fresh_constants:
            return None
        return Fn(_fresh_name(self.fresh_count, self.reserved))

    def candidates(self, rules: Ruleset) -> list[Term]:
        """Terms available for a quantifier move: the pool plus one fresh constant."""
        fresh = self.fresh_candidate(rules)
        return list(self.pool) if fresh is None else [*self.pool, fresh]

    def extend(self, m: Move) -> "Dialogue":
        """Append ``m`` without checking legality."""
        n = len(self.moves)
        open_attacks = self.open_attacks
        attacked = self.attacked
        defended = self.defended
        if m.stance is ATTACK:
            open_attacks = open_attacks + (n,)
            if m.player is OPP:
                attacked = attacked | {m.reference}
        elif m.stance is DEFEND:
            open_attacks = tuple(i for i in open_attacks if i != m.reference)
            defended = defended | {m.reference}
        opp_formulas = self.opp_formulas
        if m.player is OPP and isinstance(m.statement, Formula) and m.statement not in opp_formulas:
            opp_formulas = opp_formulas | {m.statement}
        pool, fresh_count = self.pool, self.fresh_count
        terms = _statement_terms(m.statement)
        if terms:
            new = [t for t in _sorted_terms(terms) if t not in pool]
            if new:
                fresh = Fn(_fresh_name(fresh_count, self.reserved))
                if fresh in new:
                    fresh_count += 1
                pool = pool + tuple(new)
        conceded = frozenset(f for f in opp_formulas if isinstance(f, Atom))
        history = dict(self.history)
        history[move_identity(m)] = conceded
        if m.player is OPP:
            history[move_identity(self.moves[n - 1])] = conceded
        return Dialogue(self.moves + (m,), open_attacks, opp_formulas, attacked,
                        defended, pool, fresh_count, self.reserved, history)

    @classmethod
    def start(cls, f: Formula) -> "Dialogue":
        if free_variables(f):
            raise ValueError(f"initial formula is not closed: {f}")
        reserved = _symbols(f)
        seed = _sorted_terms(closed_subterms(f))
        fresh_count = 0
        if not seed:
            seed = [Fn(_fresh_name(0, reserved))]
            fresh_count = 1
        m = Move(PRO, f)
        history = {move_identity(m): frozenset()}
        return cls((m,), (), frozenset(), frozenset(), frozenset(), tuple(seed),
                   fresh_count, reserved, history)

    @classmethod
    def replay(cls, moves: Iterable[Move]) -> "Dialogue":
        """Rebuild a dialogue, bookkeeping included, from its raw moves."""
        moves = list(moves)
        d = cls.start(moves[0].statement)  # type: ignore[arg-type]
        for m in moves[1:]:
            d = d.extend(m)
        return d


def _sorted_terms(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=lambda t: (len(str(t)), str(t)))


def initial_dialogue(f: Formula) -> Dialogue:
    """The one-move dialogue in which the Proponent asserts ``f``.

    An atomic ``f`` is rejected: the Proponent may not assert an atom the
    Opponent has not asserted, so such a game cannot even begin.
    """
    d = Dialogue.start(f)
    if isinstance(f, Atom):
        raise IllegalMove("pro-atom", d.moves[0], f"Proponent cannot open with atom {f}")
    return d


# --- structural rules ------------------------------------------------------

def move_identity(m: Move) -> tuple:
    return (m.player, m.statement, m.stance, m.reference)


def is_repeat(d: Dialogue, m: Move, rules: Ruleset) -> bool:
    """Whether ``m`` counts as a repetition of an earlier move of ``d``."""
    since = d.history.get(move_identity(m))
    if since is None:
        return False
    if (rules.repeat_identity is RepeatIdentity.RELEVANT_ATOMS and m.player is PRO
            and isinstance(m.statement, Formula)):
        new = d.opp_atoms - since
        if new and not new.isdisjoint(atoms(m.statement)):
            return False
    return True


def _attack_targets(d: Dialogue, player: Player, rules: Ruleset) -> list[int]:
    n = len(d.moves)
    if player is OPP:
        if rules.variant is Variant.E:
            idx = [n - 1]
        else:
            idx = range(0, n, 2)
        return [i for i in idx if i not in d.attacked
                and isinstance(d.moves[i].statement, Formula)
                and not isinstance(d.moves[i].statement, Atom)]
    return [i for i in range(1, n, 2)
            if isinstance(d.moves[i].statement, Formula)
            and not isinstance(d.moves[i].statement, Atom)]


def _defendable(d: Dialogue, player: Player, rules: Ruleset) -> Optional[int]:
    if not d.open_attacks:
        return None
    top = d.open_attacks[-1]
    if d.moves[top].player is player:
        return None
    if player is OPP and rules.variant is Variant.E and top != len(d.moves) - 1:
        return None
    return top


def _passes_filters(d: Dialogue, m: Move, rules: Ruleset) -> bool:
    if m.player is PRO and isinstance(m.statement, Atom) and m.statement not in d.opp_formulas:
        return False
    if rules.no_repeats and is_repeat(d, m, rules):
        return False
    return True


def legal_moves(d: Dialogue, rules: Ruleset) -> list[Move]:
    """All moves that keep ``d`` legal, attacks by target index first, then defenses."""
    player = d.to_move
    moves: list[Move] = []
    candidates: Optional[list[Term]] = None
    for i in _attack_targets(d, player, rules):
        target = d.moves[i].statement
        if isinstance(target, Forall):
            if candidates is None:
                candidates = d.candidates(rules)
            options = attack_options(target, candidates)
        else:
            options = attack_options(target)  # type: ignore[arg-type]
        for s in options:
            moves.append(Move(player, s, ATTACK, i))
    top = _defendable(d, player, rules)
    if top is not None:
        attack = d.moves[top]
        attacked = d.moves[attack.reference].statement  # type: ignore[index]
        if isinstance(attacked, Exists):
            if candidates is None:
                candidates = d.candidates(rules)
            options = defense_options(attacked, attack.statement, candidates)
        else:
            options = defense_options(attacked, attack.statement)  # type: ignore[arg-type]
        for s in options:
            moves.append(Move(player, s, DEFEND, top))
    return [m for m in moves if _passes_filters(d, m, rules)]


def check_move(d: Dialogue, m: Move, rules: Ruleset) -> Optional[str]:
    """Name of the first rule ``m`` breaks when appended to ``d``, or None."""
    n = len(d.moves)
    if m.player is not d.to_move:
        return "alternation"
    if m.stance is None or m.reference is None:
        return "reference"
    ref = m.reference
    if not 0 <= ref < n or d.moves[ref].player is m.player:
        return "reference"
    if m.player is OPP and rules.variant is Variant.E and ref != n - 1:
        return "E-immediacy"
    target = d.moves[ref]
    candidates = d.candidates(rules)
    if m.stance is ATTACK:
        if not isinstance(target.statement, Formula) or isinstance(target.statement, Atom):
            return "particle"
        if m.player is OPP and ref in d.attacked:
            return "attack-once"
        if m.statement not in attack_options(target.statement, candidates):
            return "particle"
    else:
        if target.stance is not ATTACK:
            return "particle"
        if ref in d.defended:
            return "defend-once"
        if not d.open_attacks or d.open_attacks[-1] != ref:
            return "last-open-attack"
        attacked = d.moves[target.reference].statement  # type: ignore[index]
        if m.statement not in defense_options(attacked, target.statement, candidates):  # type: ignore[arg-type]
            return "particle"
    if m.player is PRO and isinstance(m.statement, Atom) and m.statement not in d.opp_formulas:
        return "pro-atom"
    if rules.no_repeats and is_repeat(d, m, rules):
        return "no-repeats"
    return None


def apply_move(d: Dialogue, m: Move, rules: Ruleset) -> Dialogue:
    rule = check_move(d, m, rules)
    if rule is not None:
        raise IllegalMove(rule, m, f"move {render_move(len(d.moves), m)}")
    return d.extend(m)


def winner(d: Dialogue, rules: Ruleset) -> Outcome:
    if legal_moves(d, rules):
        return Outcome.ONGOING
    return Outcome.PRO_WINS if d.to_move is OPP else Outcome.OPP_WINS


# --- rendering -------------------------------------------------------------

def render_statement(s: Statement) -> str:
    if isinstance(s, Question):
        return "?"
    if isinstance(s, LeftConjunct):
        return "^L"
    if isinstance(s, RightConjunct):
        return "^R"
    if isinstance(s, WhichInstance):
        return f"?[{s.term}]"
    return str(s)


def render_move(index: int, m: Move) -> str:
    if m.stance is None:
        return f"{index}. {m.player.value} assert {render_statement(m.statement)}"
    return f"{index}. {m.player.value} {m.stance.value}({m.reference}) {render_statement(m.statement)}"


def render_dialogue(d: Dialogue) -> str:
    return "\n".join(render_move(i, m) for i, m in enumerate(d.moves))
