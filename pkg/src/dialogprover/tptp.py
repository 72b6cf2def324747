"""Reading TPTP FOF problems and turning them into a single game formula.

Only the fragment the prover understands is accepted: ``~ & | => <=>`` and the
two quantifiers, without equality and without ``$true``/``$false``.  ``<=>`` is
expanded on the fly into a conjunction of two implications.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from .formula import (
    And, Atom, Binary, Exists, Fn, Forall, Formula, Implies, Not, Or,
    Quantified, Term, Var, conj, free_variables, iff,
)

__all__ = [
    "AnnotatedFormula", "TptpProblem", "TptpError", "TptpSyntaxError",
    "FragmentViolation", "ProblemError", "NoConjecture", "MultipleConjectures",
    "ROLES", "parse_problem", "parse_file", "combine", "render_problem",
    "render_formula", "read_intended_status", "INCLUDE_DEPTH_LIMIT",
]

ROLES = ("axiom", "hypothesis", "definition", "lemma", "theorem", "conjecture")
INCLUDE_DEPTH_LIMIT = 16


class TptpError(Exception):
    """Base class for everything that can go wrong reading a problem."""


class TptpSyntaxError(TptpError):
    def __init__(self, message: str, line: int, column: int, source: str = ""):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class FragmentViolation(TptpError):
    """The problem is well formed but lies outside the supported fragment."""

    KINDS = ("EqualityPresent", "VerumFalsumPresent", "UnsupportedConnective")

    def __init__(self, kind: str, location: str, detail: str = ""):
        assert kind in self.KINDS, kind
        self.kind = kind
        self.location = location
        msg = f"{kind} in formula {location}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class ProblemError(TptpError):
    pass


class NoConjecture(ProblemError):
    pass


class MultipleConjectures(ProblemError):
    pass


@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula


@dataclass(frozen=True)
class TptpProblem:
    formulas: tuple[AnnotatedFormula, ...]
    source: str = ""

    @property
    def conjectures(self) -> list[AnnotatedFormula]:
        return [a for a in self.formulas if a.role == "conjecture"]

    @property
    def premises(self) -> list[AnnotatedFormula]:
        return [a for a in self.formulas if a.role != "conjecture"]


# --- lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<line_comment>%[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<op><=>|<~>|=>|<=|~\||~&|!=|[~&|=!?:,.()\[\]])
  | (?P<dollar>\$\$?[a-z][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<squote>'(?:[^'\\]|\\.)*')
  | (?P<dquote>"(?:[^"\\]|\\.)*")
  | (?P<number>[+-]?[0-9]+(?:\.[0-9]+)?(?:[Ee][+-]?[0-9]+)?)
""", re.VERBOSE | re.DOTALL)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, source: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TptpSyntaxError(f"unexpected character {text[pos]!r}",
                                  line, pos - line_start + 1, source)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "line_comment", "block_comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# --- parser ----------------------------------------------------------------

_UNSUPPORTED = {"<~>", "~|", "~&", "<="}


class _Parser:
    def __init__(self, text: str, source: str, arities: dict[tuple[str, str], int]):
        self.toks = _tokenize(text, source)
        self.i = 0
        self.source = source
        self.arities = arities
        self.current_name = ""

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[_Tok] = None) -> TptpSyntaxError:
        tok = tok or self.tok
        return TptpSyntaxError(message, tok.line, tok.col, self.source)

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        tok = self.tok
        self.i += 1
        return tok

    def advance(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    # top level
    def statements(self) -> Iterator[tuple]:
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind != "lower":
                raise self.error(f"expected a TPTP statement, got {tok.text!r}")
            if tok.text == "fof":
                yield ("fof",) + self.fof()
            elif tok.text == "include":
                yield ("include",) + self.include()
            elif tok.text in ("cnf", "tff", "thf", "tcf"):
                raise self.error(f"unsupported TPTP dialect {tok.text!r}")
            else:
                raise self.error(f"unknown statement {tok.text!r}")

    def name(self) -> str:
        tok = self.tok
        if tok.kind in ("lower", "upper", "number"):
            self.i += 1
            return tok.text
        if tok.kind == "squote":
            self.i += 1
            return tok.text[1:-1]
        raise self.error(f"expected a formula name, got {tok.text!r}")

    def fof(self) -> tuple[str, str, Formula]:
        self.advance()
        self.expect("(")
        name = self.name()
        self.current_name = name
        self.expect(",")
        role_tok = self.tok
        if role_tok.kind != "lower":
            raise self.error("expected a formula role")
        role = self.advance().text
        if role not in ROLES:
            raise self.error(f"unsupported formula role {role!r}", role_tok)
        self.expect(",")
        formula = self.formula()
        if self.at(","):
            self.advance()
            self.skip_annotations()
        self.expect(")")
        self.expect(".")
        return name, role, _universal_closure(formula)

    def include(self) -> tuple[str, Optional[list[str]]]:
        self.advance()
        self.expect("(")
        tok = self.tok
        if tok.kind != "squote":
            raise self.error("expected a quoted file name in include")
        self.advance()
        selection = None
        if self.at(","):
            self.advance()
            self.expect("[")
            selection = []
            if not self.at("]"):
                selection.append(self.name())
                while self.at(","):
                    self.advance()
                    selection.append(self.name())
            self.expect("]")
        self.expect(")")
        self.expect(".")
        return tok.text[1:-1], selection

    def skip_annotations(self) -> None:
        depth = 0
        while True:
            tok = self.tok
            if tok.kind == "eof":
                raise self.error("unterminated annotation")
            if tok.kind == "op" and tok.text in "([":
                depth += 1
            elif tok.kind == "op" and tok.text in ")]":
                if depth == 0:
                    return
                depth -= 1
            self.i += 1

    # formulas
    def formula(self) -> Formula:
        left = self.unitary()
        tok = self.tok
        if tok.kind != "op":
            return left
        op = tok.text
        if op in _UNSUPPORTED:
            raise FragmentViolation("UnsupportedConnective", self.current_name,
                                    f"connective {op!r} at {tok.line}:{tok.col}")
        if op in ("&", "|"):
            cls = And if op == "&" else Or
            while self.at(op):
                self.advance()
                left = cls(left, self.unitary())
            self.no_mixed_binary()
            return left
        if op in ("=>", "<=>"):
            self.advance()
            right = self.unitary()
            self.no_mixed_binary()
            return Implies(left, right) if op == "=>" else iff(left, right)
        return left

    def no_mixed_binary(self) -> None:
        tok = self.tok
        if tok.kind == "op" and tok.text in {"&", "|", "=>", "<=>"} | _UNSUPPORTED:
            if tok.text in _UNSUPPORTED:
                raise FragmentViolation("UnsupportedConnective", self.current_name,
                                        f"connective {tok.text!r} at {tok.line}:{tok.col}")
            raise self.error(f"ambiguous use of {tok.text!r}; parenthesize")

    def unitary(self) -> Formula:
        tok = self.tok
        if tok.kind == "op":
            if tok.text in ("!", "?"):
                self.advance()
                self.expect("[")
                variables = [self.variable()]
                while self.at(","):
                    self.advance()
                    variables.append(self.variable())
                self.expect("]")
                self.expect(":")
                body = self.unitary()
                cls = Forall if tok.text == "!" else Exists
                for v in reversed(variables):
                    body = cls(v, body)
                return body
            if tok.text == "~":
                self.advance()
                return Not(self.unitary())
            if tok.text == "(":
                self.advance()
                f = self.formula()
                self.expect(")")
                return f
            raise self.error(f"unexpected {tok.text!r}")
        return self.atomic()

    def variable(self) -> str:
        tok = self.tok
        if tok.kind != "upper":
            raise self.error(f"expected a variable, got {tok.text!r}")
        self.advance()
        return tok.text

    def atomic(self) -> Formula:
        tok = self.tok
        if tok.kind == "dollar":
            if tok.text in ("$true", "$false"):
                raise FragmentViolation("VerumFalsumPresent", self.current_name,
                                        f"{tok.text} at {tok.line}:{tok.col}")
            raise self.error(f"unsupported defined symbol {tok.text!r}")
        if tok.kind in ("upper", "number", "dquote"):
            # only legal as the left side of an equation
            self.term()
            self.check_equality()
            raise self.error("expected an atomic formula", tok)
        if tok.kind not in ("lower", "squote"):
            raise self.error(f"expected an atomic formula, got {tok.text or 'end of input'!r}")
        symbol = self.advance().text
        if tok.kind == "squote":
            symbol = symbol[1:-1]
        args = self.arguments()
        self.check_equality()
        self.check_arity("predicate", symbol, len(args), tok)
        return Atom(symbol, args)

    def check_equality(self) -> None:
        tok = self.tok
        if tok.kind == "op" and tok.text in ("=", "!="):
            raise FragmentViolation("EqualityPresent", self.current_name,
                                    f"{tok.text!r} at {tok.line}:{tok.col}")

    def arguments(self) -> tuple[Term, ...]:
        if not self.at("("):
            return ()
        self.advance()
        args = [self.term()]
        while self.at(","):
            self.advance()
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "upper":
            self.advance()
            return Var(tok.text)
        if tok.kind in ("lower", "squote", "number", "dquote"):
            self.advance()
            symbol = tok.text[1:-1] if tok.kind == "squote" else tok.text
            args = self.arguments()
            self.check_arity("function", symbol, len(args), tok)
            return Fn(symbol, args)
        if tok.kind == "dollar":
            raise self.error(f"unsupported defined term {tok.text!r}")
        raise self.error(f"expected a term, got {tok.text or 'end of input'!r}")

    def check_arity(self, kind: str, symbol: str, arity: int, tok: _Tok) -> None:
        known = self.arities.setdefault((kind, symbol), arity)
        if known != arity:
            raise self.error(f"{kind} {symbol} used with arity {arity} and {known}", tok)


def _universal_closure(f: Formula) -> Formula:
    fv = free_variables(f)
    if not fv:
        return f
    for v in sorted(fv, reverse=True):
        f = Forall(v, f)
    return f


def parse_problem(text: str, source: str = "", include_dir: Optional[os.PathLike | str] = None,
                  _depth: int = 0, _arities: Optional[dict] = None) -> TptpProblem:
    """Parse FOF text into a problem.

    Raises TptpSyntaxError, FragmentViolation or ProblemError (duplicate names,
    unresolvable includes).
    """
    if _depth > INCLUDE_DEPTH_LIMIT:
        raise ProblemError(f"include nesting deeper than {INCLUDE_DEPTH_LIMIT} at {source}")
    arities: dict = {} if _arities is None else _arities
    parser = _Parser(text, source, arities)
    out: list[AnnotatedFormula] = []
    for stmt in parser.statements():
        if stmt[0] == "fof":
            _, name, role, formula = stmt
            out.append(AnnotatedFormula(name, role, formula))
        else:
            _, filename, selection = stmt
            path = _resolve_include(filename, source, include_dir)
            try:
                included_text = path.read_text(encoding="utf-8")
            except OSError as e:
                raise ProblemError(f"cannot read include {filename!r}: {e}") from e
            sub = parse_problem(included_text, str(path), include_dir, _depth + 1, arities)
            for a in sub.formulas:
                if selection is None or a.name in selection:
                    out.append(a)
    seen: set[str] = set()
    for a in out:
        if a.name in seen:
            raise ProblemError(f"duplicate formula name {a.name!r}")
        seen.add(a.name)
    return TptpProblem(tuple(out), source)


def _resolve_include(filename: str, source: str, include_dir) -> Path:
    candidates = []
    if include_dir is not None:
        candidates.append(Path(include_dir) / filename)
    if os.environ.get("TPTP"):
        candidates.append(Path(os.environ["TPTP"]) / filename)
    if source:
        here = Path(source).parent
        candidates.append(here / filename)
        candidates.append(here.parent / filename)
    for c in candidates:
        if c.is_file():
            return c
    raise ProblemError(f"cannot resolve include {filename!r}")


def parse_file(path: os.PathLike | str, include_dir=None) -> TptpProblem:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_problem(text, str(path), include_dir)


def combine(problem: TptpProblem) -> Formula:
    """The single formula a game for ``problem`` starts from.

    Premises are conjoined right-nested in file order and made the antecedent
    of an implication whose consequent is the conjecture.
    """
    conjectures = problem.conjectures
    if not conjectures:
        raise NoConjecture(f"{problem.source or 'problem'} has no conjecture")
    if len(conjectures) > 1:
        names = ", ".join(a.name for a in conjectures)
        raise MultipleConjectures(f"{problem.source or 'problem'} has several conjectures: {names}")
    goal = conjectures[0].formula
    premises = [a.formula for a in problem.premises]
    if not premises:
        return goal
    return Implies(conj(premises), goal)


# --- rendering -------------------------------------------------------------

def _term_tptp(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    name = t.functor if re.fullmatch(r"[a-z][A-Za-z0-9_]*", t.functor) else f"'{t.functor}'"
    if not t.args:
        return name
    return f"{name}({','.join(_term_tptp(a) for a in t.args)})"


def render_formula(f: Formula) -> str:
    """Fully parenthesized TPTP rendering that parses back to ``f``."""
    memo: dict[int, str] = {}

    def go(g: Formula) -> str:
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            pred = g.predicate if re.fullmatch(r"[a-z][A-Za-z0-9_]*", g.predicate) else f"'{g.predicate}'"
            s = pred if not g.args else f"{pred}({','.join(_term_tptp(a) for a in g.args)})"
        elif isinstance(g, Not):
            s = f"~ {go(g.body)}"
        elif isinstance(g, Binary):
            s = f"({go(g.left)} {g.symbol} {go(g.right)})"
        elif isinstance(g, Quantified):
            s = f"{g.symbol} [{g.var}] : {go(g.body)}"
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = s
        return s

    return go(f)


def render_problem(problem: TptpProblem) -> str:
    lines = []
    for a in problem.formulas:
        name = a.name if re.fullmatch(r"[a-z][A-Za-z0-9_]*|[0-9]+", a.name) else f"'{a.name}'"
        lines.append(f"fof({name}, {a.role}, {render_formula(a.formula)}).")
    return "\n".join(lines) + "\n"


_STATUS_RE = re.compile(r"^%\s*Status\s*\(intuit\.?\)\s*:\s*([A-Za-z-]+)", re.MULTILINE)


def read_intended_status(text: str) -> Optional[str]:
    """Intended intuitionistic status from an ILTP-style header, if present."""
    m = _STATUS_RE.search(text)
    return m.group(1) if m else None
