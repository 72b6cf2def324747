"""Command-line entry point: prove one problem, or evaluate a directory of them.

``prove`` prints exactly one line on standard output,
``% SZS status <Status> for <problem>``, and exits with 0 (decided),
1 (undecided: GaveUp/Timeout) or 2 (unusable input: Inappropriate/Error).
Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

from .engine import Dialogue, RepeatIdentity, Ruleset, Variant, render_move
from .formula import Formula, is_quantifier_free
from .search import (
    PreferDefense, SearchConfig, SearchOutcome, StrategyFound,
    SzsStatus, decide, strategy_to_dot, strategy_to_text, verify_strategy,
)
from .tptp import FragmentViolation, TptpError, combine, parse_file, read_intended_status

__all__ = ["ProveOptions", "ProveResult", "prove", "batch", "problem_name",
           "problem_files", "exit_code", "main"]

log = logging.getLogger("dialogprover")

PROBLEM_SUFFIXES = (".p", ".tptp")
_EXIT = {
    SzsStatus.THEOREM: 0, SzsStatus.NON_THEOREM: 0,
    SzsStatus.GAVE_UP: 1, SzsStatus.TIMEOUT: 1,
    SzsStatus.INAPPROPRIATE: 2, SzsStatus.ERROR: 2,
}


@dataclass(frozen=True)
class ProveOptions:
    """Search settings as given on the command line.

    ``prefer_defense`` None means: Strict for quantifier-free problems,
    Heuristic otherwise.
    """

    variant: Variant = Variant.E
    no_repeats: bool = True
    repeat_identity: RepeatIdentity = RepeatIdentity.RELEVANT_ATOMS
    prefer_defense: Optional[PreferDefense] = None
    depth: int = 30
    timeout: Optional[float] = 60.0
    include_dir: Optional[str] = None

    def config_for(self, f: Formula) -> SearchConfig:
        policy = self.prefer_defense
        if policy is None:
            policy = PreferDefense.STRICT if is_quantifier_free(f) else PreferDefense.HEURISTIC
        rules = Ruleset(variant=self.variant, no_repeats=self.no_repeats,
                        repeat_identity=self.repeat_identity)
        return SearchConfig(ruleset=rules, prefer_defense=policy, depth_limit=self.depth,
                            time_limit=self.timeout)


@dataclass
class ProveResult:
    name: str
    status: SzsStatus
    reason: str = ""
    seconds: float = 0.0
    intended: Optional[str] = None
    outcome: Optional[SearchOutcome] = field(default=None, repr=False)
    config: Optional[SearchConfig] = field(default=None, repr=False)

    @property
    def szs_line(self) -> str:
        return f"% SZS status {self.status.value} for {self.name}"


def problem_name(path: os.PathLike | str) -> str:
    p = Path(path)
    return p.name[: -len(p.suffix)] if p.suffix in PROBLEM_SUFFIXES else p.name


def exit_code(status: SzsStatus) -> int:
    return _EXIT[status]


def prove(path: os.PathLike | str, options: ProveOptions = ProveOptions(),
          trace: Optional[Callable[[Dialogue], None]] = None) -> ProveResult:
    """Parse, combine, search and classify one problem file.  Never raises."""
    name = problem_name(path)
    started = time.monotonic()
    result = ProveResult(name, SzsStatus.ERROR)
    try:
        text = Path(path).read_text(encoding="utf-8")
        result.intended = read_intended_status(text)
        problem = parse_file(path, include_dir=options.include_dir)
        f = combine(problem)
        cfg = options.config_for(f)
        result.config = cfg
        outcome, szs = decide(f, cfg, trace)
        result.outcome = outcome
        result.status, result.reason = szs.status, szs.reason
        if isinstance(outcome, StrategyFound):
            check = verify_strategy(outcome.root, cfg)
            if not check:
                result.status = SzsStatus.ERROR
                result.reason = f"strategy failed verification: {check.reason}"
    except FragmentViolation as e:
        result.status, result.reason = SzsStatus.INAPPROPRIATE, e.kind
        log.info("%s: %s", name, e)
    except (TptpError, OSError, UnicodeDecodeError) as e:
        result.status, result.reason = SzsStatus.ERROR, f"{type(e).__name__}: {e}"
        log.info("%s: %s", name, result.reason)
    except RecursionError:
        result.status, result.reason = SzsStatus.ERROR, "formula nesting too deep"
        log.info("%s: %s", name, result.reason)
    except Exception as e:  # a batch must survive anything one problem does
        result.status, result.reason = SzsStatus.ERROR, f"{type(e).__name__}: {e}"
        log.exception("%s: internal error", name)
    result.seconds = time.monotonic() - started
    return result


def problem_files(directory: os.PathLike | str) -> list[Path]:
    """TPTP problem files directly inside ``directory``, sorted by name."""
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and p.suffix in PROBLEM_SUFFIXES)


def _batch_worker(args: tuple[Path, ProveOptions]):
    from .report import BatchRecord
    path, options = args
    r = prove(path, options)
    return BatchRecord(r.name, r.intended, r.status.value, r.reason, r.seconds)


def batch(directory: os.PathLike | str, options: ProveOptions = ProveOptions(),
          jobs: int = 1) -> list:
    """Prove every problem in ``directory``; records come back in file order."""
    work = [(p, options) for p in problem_files(directory)]
    if jobs <= 1 or len(work) <= 1:
        return [_batch_worker(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_batch_worker, work))


# --- command line ----------------------------------------------------------

def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ruleset", choices=["d", "e"], default="e",
                   help="structural rules: d (Lorenzen/Felscher D) or e (D plus the E rule); default e")
    rep = p.add_mutually_exclusive_group()
    rep.add_argument("--no-repeats", dest="no_repeats", action="store_true", default=True,
                     help="forbid repeated moves (default)")
    rep.add_argument("--allow-repeats", dest="no_repeats", action="store_false",
                     help="drop the No-Repeats filter")
    p.add_argument("--repeat-identity", choices=[r.value for r in RepeatIdentity],
                   default=RepeatIdentity.RELEVANT_ATOMS.value,
                   help="when two moves count as the same move (default relevant-atoms)")
    p.add_argument("--prefer-defense", choices=[x.value for x in PreferDefense], default=None,
                   help="move policy; default strict for quantifier-free problems, heuristic otherwise")
    p.add_argument("--depth", type=int, default=30, help="maximum dialogue length (default 30)")
    p.add_argument("--timeout", type=float, default=60.0,
                   help="seconds per problem, 0 for none (default 60)")
    p.add_argument("--include-dir", default=None, help="root directory for include() files")


def _options(args: argparse.Namespace) -> ProveOptions:
    if args.depth < 1:
        raise SystemExit("--depth must be at least 1")
    return ProveOptions(
        variant=Variant(args.ruleset),
        no_repeats=args.no_repeats,
        repeat_identity=RepeatIdentity(args.repeat_identity),
        prefer_defense=None if args.prefer_defense is None else PreferDefense(args.prefer_defense),
        depth=args.depth,
        timeout=args.timeout if args.timeout > 0 else None,
        include_dir=args.include_dir,
    )


def _tracer(out: TextIO) -> Callable[[Dialogue], None]:
    def trace(d: Dialogue) -> None:
        out.write("% " + "  " * (len(d) - 1) + render_move(len(d) - 1, d.moves[-1]) + "\n")
    return trace


def _cmd_prove(args: argparse.Namespace) -> int:
    options = _options(args)
    trace = _tracer(sys.stdout) if args.trace else None
    result = prove(args.file, options, trace)
    print(result.szs_line, flush=True)
    if exit_code(result.status) != 0:
        print(f"{result.name}: {result.status.value} ({result.reason})", file=sys.stderr)
    if args.emit_strategy and isinstance(result.outcome, StrategyFound):
        if args.emit_strategy == "dot":
            text = strategy_to_dot(result.outcome.root, result.name)
            default = f"{result.name}.dot"
        else:
            text = strategy_to_text(result.outcome.root)
            default = f"{result.name}.strategy.txt"
        target = Path(args.strategy_out or default)
        target.write_text(text, encoding="utf-8")
        print(f"strategy written to {target}", file=sys.stderr)
    return exit_code(result.status)


def _cmd_batch(args: argparse.Namespace) -> int:
    from .report import plot_batch, summary_line, write_csv

    options = _options(args)
    directory = Path(args.directory)
    try:
        problem_files(directory)
    except OSError as e:
        print(f"cannot read problem directory {directory}: {e}", file=sys.stderr)
        return 2
    records = batch(directory, options, jobs=args.jobs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, out)
    print(summary_line(records), flush=True)
    if not args.no_figure:
        figure = plot_batch(records, out.with_suffix(".png"), title=directory.name)
        print(f"figure written to {figure}", file=sys.stderr)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    from .formula import is_propositional
    from .oracle import CountermodelFound, check_bounded_kripke, decide_intuitionistic

    try:
        f = combine(parse_file(args.file, include_dir=args.include_dir))
    except TptpError as e:
        print(f"{problem_name(args.file)}: {e}", file=sys.stderr)
        return 2
    if not is_propositional(f):
        print(f"{problem_name(args.file)}: the oracle only handles propositional formulas",
              file=sys.stderr)
        return 2
    verdict = decide_intuitionistic(f)
    kripke = check_bounded_kripke(f, args.worlds)
    found = "countermodel" if isinstance(kripke, CountermodelFound) else "none"
    print(f"% {problem_name(args.file)}: G4ip {verdict.value}; "
          f"Kripke countermodel up to {args.worlds} worlds: {found}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogprover",
        description="Intuitionistic first-order prover based on dialogue games.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove one TPTP problem and print its SZS status")
    p.add_argument("file")
    _add_search_flags(p)
    p.add_argument("--emit-strategy", choices=["dot", "text"], default=None,
                   help="write the winning strategy, if one is found")
    p.add_argument("--strategy-out", default=None,
                   help="file for --emit-strategy (default <problem>.dot or <problem>.strategy.txt)")
    p.add_argument("--trace", action="store_true",
                   help="stream every explored dialogue position to stdout")
    p.set_defaults(func=_cmd_prove)

    b = sub.add_parser("batch", help="prove every problem in a directory; write CSV and figure")
    b.add_argument("directory")
    _add_search_flags(b)
    b.add_argument("--out", default="results.csv", help="CSV output file (default results.csv)")
    b.add_argument("--jobs", type=int, default=1, help="problems to run in parallel (default 1)")
    b.add_argument("--no-figure", action="store_true", help="skip the PNG next to the CSV")
    b.set_defaults(func=_cmd_batch)

    o = sub.add_parser("oracle", help="decide a propositional problem with the reference oracles")
    o.add_argument("file")
    o.add_argument("--worlds", type=int, default=3, choices=[1, 2, 3, 4])
    o.add_argument("--include-dir", default=None)
    o.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
