"""Bounded AND-OR search for winning Proponent strategies.

The search runs in two passes.  The first pass decides every position it
reaches and memoizes the verdicts on an abstract position key that forgets
move indices, so transposed move orders share work.  The second pass walks the
winning choices recorded by the first and materializes a concrete strategy
tree for the actual dialogue.
"""
from __future__ import annotations

import enum
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from .engine import (
    ATTACK, DEFEND, OPP, PRO, Dialogue, IllegalMove, Move, Ruleset, Variant,
    check_move, initial_dialogue, is_repeat, legal_moves, render_move,
)
from .formula import Atom, Formula, is_quantifier_free

__all__ = [
    "PreferDefense", "SearchConfig", "StrategyNode", "StrategyFound",
    "ExhaustedNoStrategy", "DepthCutoff", "TimedOut", "SearchOutcome",
    "search", "verify_strategy", "Verification", "SzsStatus", "SzsResult",
    "classify", "decide", "order_pro_moves", "strategy_size",
    "strategy_to_dot", "strategy_to_text", "position_key",
]


class PreferDefense(enum.Enum):
    OFF = "off"
    HEURISTIC = "heuristic"
    STRICT = "strict"


@dataclass(frozen=True)
class SearchConfig:
    ruleset: Ruleset = field(default_factory=Ruleset)
    prefer_defense: PreferDefense = PreferDefense.HEURISTIC
    depth_limit: int = 30
    time_limit: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.depth_limit < 1:
            raise ValueError("depth_limit must be at least 1")

    @property
    def max_fresh_constants(self) -> int:
        return self.ruleset.max_fresh_constants


@dataclass
class StrategyNode:
    dialogue: Dialogue
    move: Optional[Move] = None
    children: list["StrategyNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def strategy_size(root: StrategyNode) -> int:
    return sum(1 for _ in root.walk())


@dataclass
class StrategyFound:
    root: StrategyNode
    nodes: int = 0


@dataclass
class ExhaustedNoStrategy:
    # True when Strict prefer-defense discarded attacks somewhere; the verdict
    # then says nothing about the unrestricted game.
    policy_pruned: bool = False
    nodes: int = 0


@dataclass
class DepthCutoff:
    limit: int
    nodes: int = 0


@dataclass
class TimedOut:
    elapsed: float
    nodes: int = 0


SearchOutcome = Union[StrategyFound, ExhaustedNoStrategy, DepthCutoff, TimedOut]


# --- move ordering ---------------------------------------------------------

def order_pro_moves(moves: list[Move], policy: PreferDefense) -> tuple[list[Move], bool]:
    """Pro's candidate moves in trial order, and whether any were discarded."""
    if policy is PreferDefense.OFF:
        return moves, False
    defenses = [m for m in moves if m.stance is DEFEND]
    attacks = [m for m in moves if m.stance is ATTACK]
    if policy is PreferDefense.STRICT and defenses:
        return defenses, bool(attacks)
    # stable sort: most recent target first, generation order within a target
    attacks.sort(key=lambda m: -m.reference)  # type: ignore[operator]
    return defenses + attacks, False


# --- position keys ---------------------------------------------------------

def _opp_assertions(d: Dialogue, rules: Ruleset) -> dict[int, tuple]:
    """Attackable Opponent assertions with the attacks Pro may not repeat now."""
    blocked: dict[int, set] = {}
    if rules.no_repeats:
        for key in d.history:
            player, statement, stance, ref = key
            if player is PRO and stance is ATTACK and is_repeat(d, Move(*key), rules):
                blocked.setdefault(ref, set()).add(statement)
    out = {}
    for i in range(1, len(d.moves), 2):
        s = d.moves[i].statement
        if isinstance(s, Formula) and not isinstance(s, Atom):
            out[i] = (s, frozenset(blocked.get(i, ())))
    return out


def position_key(d: Dialogue, rules: Ruleset) -> tuple:
    """Everything about ``d`` that the rest of the game can depend on."""
    moves = d.moves
    stack = tuple((moves[i].player, moves[i].statement,
                   moves[moves[i].reference].statement) for i in d.open_attacks)  # type: ignore[index]
    opp = frozenset(Counter(_opp_assertions(d, rules).values()).items())
    if rules.variant is Variant.D:
        # Opp may attack any Pro assertion it has not attacked yet
        extra: object = frozenset(Counter(
            moves[i].statement for i in range(0, len(moves), 2)
            if i not in d.attacked and isinstance(moves[i].statement, Formula)
            and not isinstance(moves[i].statement, Atom)).items())
    elif d.to_move is OPP:
        last = moves[-1]
        extra = (last.statement, last.stance)
    else:
        extra = None
    return (d.to_move, d.opp_formulas, stack, opp, extra,
            frozenset(d.pool), d.fresh_count)


def _choice(d: Dialogue, m: Move, assertions: dict[int, tuple]) -> tuple:
    if m.stance is DEFEND:
        return (DEFEND, m.statement, None)
    return (ATTACK, m.statement, assertions[m.reference])  # type: ignore[index]


def _realize(d: Dialogue, choice: tuple, rules: Ruleset) -> Move:
    stance, statement, target = choice
    if stance is DEFEND:
        return Move(PRO, statement, DEFEND, d.open_attacks[-1])
    for i, desc in _opp_assertions(d, rules).items():
        if desc == target:
            return Move(PRO, statement, ATTACK, i)
    raise LookupError("recorded choice has no counterpart in this dialogue")


# --- search ----------------------------------------------------------------

class _Timeout(Exception):
    pass


_WIN, _LOSS, _CUT = "win", "loss", "cut"


class _Searcher:
    def __init__(self, cfg: SearchConfig, trace: Optional[Callable[[Dialogue], None]] = None):
        self.cfg = cfg
        self.rules = cfg.ruleset
        self.limit = cfg.depth_limit
        self.trace = trace
        self.start = time.monotonic()
        self.deadline = None if cfg.time_limit is None else self.start + cfg.time_limit
        self.nodes = 0
        self.policy_pruned = False
        self.wins: dict[tuple, tuple[Optional[tuple], int]] = {}
        self.losses: set[tuple] = set()
        self.cuts: dict[tuple, int] = {}

    def pro_moves(self, d: Dialogue) -> list[Move]:
        moves, pruned = order_pro_moves(legal_moves(d, self.rules), self.cfg.prefer_defense)
        if pruned:
            self.policy_pruned = True
        return moves

    def solve(self, d: Dialogue) -> tuple[str, int]:
        """(verdict, height) for the position ``d``."""
        self.nodes += 1
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout()
        if self.trace is not None:
            self.trace(d)
        remaining = self.limit - len(d)
        key = position_key(d, self.rules)
        hit = self.wins.get(key)
        if hit is not None and hit[1] <= remaining:
            return _WIN, hit[1]
        if key in self.losses:
            return _LOSS, 0
        if self.cuts.get(key, -1) >= remaining:
            return _CUT, 0

        if d.to_move is PRO:
            moves = self.pro_moves(d)
            if not moves:
                self.losses.add(key)
                return _LOSS, 0
            if remaining <= 0:
                self.cuts[key] = remaining
                return _CUT, 0
            assertions = _opp_assertions(d, self.rules)
            cut = False
            for m in moves:
                verdict, h = self.solve(d.extend(m))
                if verdict is _WIN:
                    self._record_win(key, _choice(d, m, assertions), h + 1)
                    return _WIN, h + 1
                cut = cut or verdict is _CUT
        else:
            moves = legal_moves(d, self.rules)
            if not moves:
                self._record_win(key, None, 0)
                return _WIN, 0
            if remaining <= 0:
                self.cuts[key] = remaining
                return _CUT, 0
            cut = False
            height = 0
            for m in moves:
                verdict, h = self.solve(d.extend(m))
                if verdict is _LOSS:
                    self.losses.add(key)
                    return _LOSS, 0
                if verdict is _CUT:
                    # keep looking: a sibling may still be a genuine loss
                    cut = True
                else:
                    height = max(height, h + 1)
            if not cut:
                self._record_win(key, None, height)
                return _WIN, height
        if cut:
            self.cuts[key] = max(self.cuts.get(key, -1), remaining)
            return _CUT, 0
        self.losses.add(key)
        return _LOSS, 0

    def _record_win(self, key, choice, height):
        old = self.wins.get(key)
        if old is None or height < old[1]:
            self.wins[key] = (choice, height)

    def build(self, d: Dialogue, move: Optional[Move] = None) -> StrategyNode:
        node = StrategyNode(d, move)
        if d.to_move is PRO:
            choice, _ = self.wins[position_key(d, self.rules)]
            m = _realize(d, choice, self.rules)  # type: ignore[arg-type]
            node.children.append(self.build(d.extend(m), m))
        else:
            for m in legal_moves(d, self.rules):
                node.children.append(self.build(d.extend(m), m))
        return node


def search(f: Formula, cfg: SearchConfig = SearchConfig(),
           trace: Optional[Callable[[Dialogue], None]] = None) -> SearchOutcome:
    """Depth-first search for a winning Proponent strategy for ``f``."""
    s = _Searcher(cfg, trace)
    try:
        d = initial_dialogue(f)
    except IllegalMove:
        return ExhaustedNoStrategy(nodes=0)
    try:
        verdict, _ = s.solve(d)
    except _Timeout:
        return TimedOut(time.monotonic() - s.start, s.nodes)
    if verdict is _WIN:
        return StrategyFound(s.build(d), s.nodes)
    if verdict is _CUT:
        return DepthCutoff(cfg.depth_limit, s.nodes)
    return ExhaustedNoStrategy(s.policy_pruned, s.nodes)


# --- verification ----------------------------------------------------------

@dataclass
class Verification:
    ok: bool
    reason: str = ""
    path: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def verify_strategy(root: StrategyNode, cfg: SearchConfig) -> Verification:
    """Check that ``root`` is a winning Proponent strategy under ``cfg``.

    Legality is re-derived from the engine alone; nothing from the search's
    memo tables or move ordering is consulted.
    """
    rules = cfg.ruleset
    if len(root.dialogue) != 1 or root.move is not None:
        return Verification(False, "root is not an initial dialogue")
    try:
        initial_dialogue(root.dialogue.initial_formula)
    except IllegalMove as e:
        return Verification(False, f"illegal opening: {e}")

    stack: list[tuple[StrategyNode, tuple[int, ...]]] = [(root, ())]
    while stack:
        node, path = stack.pop()
        d = node.dialogue
        if len(d) > cfg.depth_limit:
            return Verification(False, f"dialogue longer than {cfg.depth_limit}", path)
        for child in node.children:
            if child.move is None:
                return Verification(False, "edge without a move", path)
            rule = check_move(d, child.move, rules)
            if rule is not None:
                return Verification(False, f"illegal move {render_move(len(d), child.move)} ({rule})", path)
            if child.dialogue.moves != d.moves + (child.move,):
                return Verification(False, "child dialogue does not extend its parent", path)
        legal = legal_moves(d, rules)
        if d.to_move is OPP:
            if set(c.move for c in node.children) != set(legal) or len(node.children) != len(legal):
                if not node.children and legal:
                    return Verification(False, "leaf where the Opponent can still move", path)
                return Verification(False, "Opponent node does not answer every legal move", path)
        else:
            if len(node.children) != 1:
                return Verification(False, f"Proponent node with {len(node.children)} children", path)
        for k, child in enumerate(node.children):
            stack.append((child, path + (k,)))
    return Verification(True)


# --- export ----------------------------------------------------------------

def _node_label(node: StrategyNode) -> str:
    d = node.dialogue
    return render_move(len(d) - 1, d.moves[-1])


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def strategy_to_dot(root: StrategyNode, name: str = "strategy") -> str:
    """DOT graph of a strategy: Proponent moves as boxes, Opponent moves as circles."""
    lines = [f'digraph "{_dot_escape(name)}" {{', "  node [fontname=monospace];"]
    counter = 0
    stack: list[tuple[StrategyNode, Optional[int]]] = [(root, None)]
    while stack:
        node, parent = stack.pop()
        me = counter
        counter += 1
        shape = "box" if node.dialogue.moves[-1].player is PRO else "circle"
        lines.append(f'  n{me} [shape={shape}, label="{_dot_escape(_node_label(node))}"];')
        if parent is not None:
            lines.append(f"  n{parent} -> n{me};")
        for child in reversed(node.children):
            stack.append((child, me))
    lines.append("}")
    return "\n".join(lines) + "\n"


def strategy_to_text(root: StrategyNode) -> str:
    """The strategy as an indented move list, one move per line."""
    lines = []
    stack: list[tuple[StrategyNode, int]] = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        lines.append("  " * depth + _node_label(node))
        for child in reversed(node.children):
            stack.append((child, depth + 1))
    return "\n".join(lines) + "\n"


# --- SZS classification ----------------------------------------------------

class SzsStatus(enum.Enum):
    THEOREM = "Theorem"
    NON_THEOREM = "NonTheorem"
    GAVE_UP = "GaveUp"
    TIMEOUT = "Timeout"
    INAPPROPRIATE = "Inappropriate"
    ERROR = "Error"


@dataclass(frozen=True)
class SzsResult:
    status: SzsStatus
    reason: str = ""


def classify(outcome: SearchOutcome, propositional: bool) -> SzsResult:
    """SZS status of a search outcome.

    ``propositional`` must be true only for quantifier-free inputs, whose game
    tree is finite; only then does an exhausted search refute the formula.
    """
    if isinstance(outcome, StrategyFound):
        return SzsResult(SzsStatus.THEOREM)
    if isinstance(outcome, ExhaustedNoStrategy):
        if propositional and not outcome.policy_pruned:
            return SzsResult(SzsStatus.NON_THEOREM)
        return SzsResult(SzsStatus.GAVE_UP, "exhausted-unsound-context")
    if isinstance(outcome, DepthCutoff):
        return SzsResult(SzsStatus.GAVE_UP, "depth")
    if isinstance(outcome, TimedOut):
        return SzsResult(SzsStatus.TIMEOUT, "timeout")
    raise TypeError(f"not a search outcome: {outcome!r}")


def decide(f: Formula, cfg: SearchConfig,
           trace: Optional[Callable[[Dialogue], None]] = None) -> tuple[SearchOutcome, SzsResult]:
    """Search and classify, retrying without Strict pruning when it blocked a verdict.

    A Strict run that exhausts its restricted space proves nothing, so the
    remaining time budget goes to a Heuristic run over the full space.
    """
    propositional = is_quantifier_free(f)
    started = time.monotonic()
    outcome = search(f, cfg, trace)
    if (isinstance(outcome, ExhaustedNoStrategy) and outcome.policy_pruned
            and cfg.prefer_defense is PreferDefense.STRICT):
        left = None
        if cfg.time_limit is not None:
            left = cfg.time_limit - (time.monotonic() - started)
        if left is None or left > 0:
            retry = replace(cfg, prefer_defense=PreferDefense.HEURISTIC, time_limit=left)
            outcome = search(f, retry, trace)
            if isinstance(outcome, TimedOut):
                outcome = TimedOut(time.monotonic() - started, outcome.nodes)
        else:
            outcome = TimedOut(time.monotonic() - started, outcome.nodes)
    return outcome, classify(outcome, propositional)
