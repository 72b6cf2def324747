import pytest
from hypothesis import given, settings, strategies as st

from conftest import closed_fo_formulas, p, prop_formulas, q
from dialogprover.engine import (
    ATTACK, DEFEND, LEFT, OPP, PRO, QUESTION, RIGHT, Dialogue, IllegalMove,
    Move, Outcome, RepeatIdentity, Ruleset, Variant, WhichInstance, apply_move,
    attack_options, check_move, defense_options, initial_dialogue, is_repeat,
    legal_moves, render_dialogue, render_move, winner,
)
from dialogprover.formula import (
    And, Atom, Exists, Fn, Forall, Implies, Not, Or, Var, const,
)

E = Ruleset(variant=Variant.E)
D = Ruleset(variant=Variant.D)
c, d0 = const("c"), const("d")
X = Var("X")


def play(f, *moves, rules=E):
    dlg = initial_dialogue(f)
    for m in moves:
        dlg = apply_move(dlg, m, rules)
    return dlg


class TestInitialDialogue:
    def test_single_move(self):
        dlg = initial_dialogue(Implies(p, p))
        assert dlg.moves == (Move(PRO, Implies(p, p)),)
        assert dlg.to_move is OPP and dlg.open_attacks == ()

    def test_seeded_fresh_constant(self):
        dlg = initial_dialogue(Forall("X", Atom("p", (X,))))
        assert dlg.pool == (const("c0"),) and dlg.fresh_count == 1

    def test_pool_from_formula(self):
        dlg = initial_dialogue(Or(Atom("p", (c,)), Atom("q", (d0,))))
        assert set(dlg.pool) == {c, d0} and dlg.fresh_count == 0

    def test_fresh_names_avoid_problem_symbols(self):
        dlg = initial_dialogue(Forall("X", Atom("p", (Fn("c0", (X,)),))))
        assert dlg.pool == (const("c1"),)

    def test_open_formula_rejected(self):
        with pytest.raises(ValueError):
            initial_dialogue(Atom("p", (X,)))

    def test_atomic_conjecture_cannot_start(self):
        with pytest.raises(IllegalMove) as e:
            initial_dialogue(p)
        assert e.value.rule == "pro-atom"


class TestParticleRules:
    def test_attacks(self):
        assert attack_options(And(p, q)) == [LEFT, RIGHT]
        assert attack_options(Or(p, q)) == [QUESTION]
        assert attack_options(Implies(p, q)) == [p]
        assert attack_options(Not(p)) == [p]
        assert attack_options(Forall("X", Atom("p", (X,))), [const("c0")]) == [WhichInstance(const("c0"))]
        assert attack_options(Exists("X", Atom("p", (X,)))) == [QUESTION]

    def test_atoms_cannot_be_attacked(self):
        with pytest.raises(ValueError):
            attack_options(p)

    def test_defenses(self):
        assert defense_options(And(p, q), LEFT) == [p]
        assert defense_options(And(p, q), RIGHT) == [q]
        assert defense_options(Or(p, q), QUESTION) == [p, q]
        assert defense_options(Implies(p, q), p) == [q]
        assert defense_options(Not(p), p) == []
        assert defense_options(Forall("X", Atom("p", (X,))), WhichInstance(c)) == [Atom("p", (c,))]
        assert defense_options(Exists("Y", Atom("q", (Var("Y"),))), QUESTION, [c]) == [Atom("q", (c,))]

    def test_mismatched_pair(self):
        with pytest.raises(ValueError):
            defense_options(And(p, q), QUESTION)
        with pytest.raises(ValueError):
            defense_options(Implies(p, q), q)

    def test_instance_attack_needs_closed_term(self):
        with pytest.raises(ValueError):
            WhichInstance(X)

    def test_vacuous_quantifier(self):
        f = Forall("X", p)
        assert defense_options(f, WhichInstance(c)) == [p]


class TestLegalMoves:
    def test_conjunction_attacks(self):
        dlg = initial_dialogue(And(p, q))
        assert legal_moves(dlg, E) == [Move(OPP, LEFT, ATTACK, 0), Move(OPP, RIGHT, ATTACK, 0)]

    def test_pro_defends_with_conceded_atom(self):
        dlg = play(Implies(p, p), Move(OPP, p, ATTACK, 0))
        assert Move(PRO, p, DEFEND, 1) in legal_moves(dlg, E)

    def test_pro_atom_rule_blocks_unconceded_atom(self):
        dlg = play(Or(p, Not(p)), Move(OPP, QUESTION, ATTACK, 0))
        assert legal_moves(dlg, E) == [Move(PRO, Not(p), DEFEND, 1)]
        assert check_move(dlg, Move(PRO, p, DEFEND, 1), E) == "pro-atom"

    def test_excluded_middle_game(self):
        # hand-enumerated: ? ; ~p ; p (Opp attacks the negation) ; Pro stuck
        dlg = play(Or(p, Not(p)), Move(OPP, QUESTION, ATTACK, 0))
        assert winner(dlg, E) is Outcome.ONGOING
        dlg = apply_move(dlg, Move(PRO, Not(p), DEFEND, 1), E)
        assert winner(dlg, E) is Outcome.ONGOING
        assert legal_moves(dlg, E) == [Move(OPP, p, ATTACK, 2)]
        dlg = apply_move(dlg, Move(OPP, p, ATTACK, 2), E)
        # Pro would now like to defend p against move 1, but the most recent
        # open attack is move 3, and ~p has no defense.
        assert legal_moves(dlg, E) == []
        assert winner(dlg, E) is Outcome.OPP_WINS

    def test_identity_game_is_won(self):
        dlg = play(Implies(p, p), Move(OPP, p, ATTACK, 0), Move(PRO, p, DEFEND, 1))
        assert legal_moves(dlg, E) == [] and winner(dlg, E) is Outcome.PRO_WINS

    def test_compound_start_is_ongoing(self):
        for f in [Not(p), And(p, q), Or(p, q), Implies(p, q), Forall("X", Atom("p", (X,)))]:
            assert winner(initial_dialogue(f), E) is Outcome.ONGOING

    def test_opp_d_may_attack_older_moves(self):
        f = Implies(p, Implies(q, p))
        dlg = play(f, Move(OPP, p, ATTACK, 0), Move(PRO, Implies(q, p), DEFEND, 1), rules=D)
        # move 0 is already attacked; move 2 is open to attack in both variants
        assert {m.reference for m in legal_moves(dlg, D) if m.stance is ATTACK} == {2}
        dlg2 = play(And(Implies(p, p), Not(q)), rules=D)
        dlg2 = apply_move(dlg2, Move(OPP, LEFT, ATTACK, 0), D)
        dlg2 = apply_move(dlg2, Move(PRO, Implies(p, p), DEFEND, 1), D)
        assert check_move(dlg2, Move(OPP, p, ATTACK, 2), D) is None

    def test_universal_candidates_include_fresh_constant(self):
        f = Forall("X", Atom("p", (X,)))
        dlg = initial_dialogue(Implies(Atom("p", (c,)), f))
        dlg = apply_move(dlg, Move(OPP, Atom("p", (c,)), ATTACK, 0), E)
        dlg = apply_move(dlg, Move(PRO, f, DEFEND, 1), E)
        opp = legal_moves(dlg, E)
        assert [m.statement for m in opp] == [WhichInstance(c), WhichInstance(const("c0"))]

    def test_fresh_cap(self):
        f = Forall("X", Atom("p", (X,)))
        dlg = initial_dialogue(f)  # seed c0 uses up one of the allowance
        capped = Ruleset(max_fresh_constants=1)
        assert [m.statement for m in legal_moves(dlg, capped)] == [WhichInstance(const("c0"))]
        with pytest.raises(ValueError):
            Ruleset(max_fresh_constants=0)


class TestApplyMove:
    def test_bookkeeping(self):
        dlg = play(And(p, q), Move(OPP, LEFT, ATTACK, 0))
        assert len(dlg) == 2 and dlg.open_attacks == (1,) and dlg.attacked == {0}

    def test_defend_once(self):
        f = Implies(Implies(p, q), Implies(p, q))
        dlg = play(f, Move(OPP, Implies(p, q), ATTACK, 0),
                   Move(PRO, Implies(p, q), DEFEND, 1),
                   Move(OPP, p, ATTACK, 2),
                   Move(PRO, p, ATTACK, 1),
                   Move(OPP, q, DEFEND, 4))
        assert dlg.open_attacks == (3,)
        assert check_move(dlg, Move(PRO, q, DEFEND, 1), E) == "defend-once"
        assert check_move(dlg, Move(PRO, q, DEFEND, 3), E) is None

    def test_last_open_attack(self):
        f = Implies(Implies(Implies(p, p), q), q)
        dlg = play(f, Move(OPP, Implies(Implies(p, p), q), ATTACK, 0),
                   Move(PRO, Implies(p, p), ATTACK, 1),
                   Move(OPP, p, ATTACK, 2))
        assert dlg.open_attacks == (1, 2, 3)
        with pytest.raises(IllegalMove) as e:
            apply_move(dlg, Move(PRO, q, DEFEND, 1), E)
        assert e.value.rule == "last-open-attack"
        assert check_move(dlg, Move(PRO, p, DEFEND, 3), E) is None

    def test_defend_non_latest_open_attack(self):
        # two open attacks by Opp: 1 (on move 0) and 3 (on move 2)
        f = Implies(p, Not(Not(p)))
        dlg = play(f, Move(OPP, p, ATTACK, 0), Move(PRO, Not(Not(p)), DEFEND, 1),
                   Move(OPP, Not(p), ATTACK, 2))
        dlg = apply_move(dlg, Move(PRO, p, ATTACK, 3), E)
        assert dlg.open_attacks == (3, 4)
        # Opp cannot defend ~p; Pro's attack 4 is the latest open attack
        assert legal_moves(dlg, E) == []
        with pytest.raises(IllegalMove) as e:
            apply_move(dlg, Move(OPP, p, DEFEND, 3), E)
        assert e.value.rule in ("reference", "particle", "E-immediacy")

    def test_e_immediacy(self):
        f = Implies(p, And(p, p))
        dlg = play(f, Move(OPP, p, ATTACK, 0), Move(PRO, And(p, p), DEFEND, 1))
        with pytest.raises(IllegalMove) as e:
            apply_move(dlg, Move(OPP, LEFT, ATTACK, 0), E)
        assert e.value.rule == "E-immediacy"

    def test_attack_once_on_pro(self):
        f = Implies(p, And(p, p))
        dlg = play(f, Move(OPP, p, ATTACK, 0), Move(PRO, And(p, p), DEFEND, 1), rules=D)
        assert check_move(dlg, Move(OPP, p, ATTACK, 0), D) == "attack-once"

    def test_alternation_and_reference(self):
        dlg = initial_dialogue(And(p, q))
        assert check_move(dlg, Move(PRO, LEFT, ATTACK, 0), E) == "alternation"
        assert check_move(dlg, Move(OPP, LEFT, ATTACK, 5), E) == "reference"
        assert check_move(dlg, Move(OPP, QUESTION, ATTACK, 0), E) == "particle"

    def test_no_repeats(self):
        f = Not(Not(Or(p, Not(p))))
        dlg = play(f, Move(OPP, Not(Or(p, Not(p))), ATTACK, 0),
                   Move(PRO, Or(p, Not(p)), ATTACK, 1),
                   Move(OPP, QUESTION, ATTACK, 2),
                   Move(PRO, Not(p), DEFEND, 3),
                   Move(OPP, p, ATTACK, 4))
        again = Move(PRO, Or(p, Not(p)), ATTACK, 1)
        strict = Ruleset(repeat_identity=RepeatIdentity.MOVE)
        assert check_move(dlg, again, strict) == "no-repeats"
        assert check_move(dlg, again, Ruleset(no_repeats=False)) is None
        # the refined identity allows one repeat after p was conceded ...
        dlg = apply_move(dlg, again, E)
        dlg = apply_move(dlg, Move(OPP, QUESTION, ATTACK, 6), E)
        # ... but not another one without a fresh relevant concession
        assert check_move(dlg, again, E) == "no-repeats"
        assert Move(PRO, p, DEFEND, 7) in legal_moves(dlg, E)

    def test_refined_repeat_after_relevant_concession(self):
        f = Not(Not(Or(p, Not(p))))
        dlg = play(f, Move(OPP, Not(Or(p, Not(p))), ATTACK, 0),
                   Move(PRO, Or(p, Not(p)), ATTACK, 1),
                   Move(OPP, QUESTION, ATTACK, 2),
                   Move(PRO, Not(p), DEFEND, 3),
                   Move(OPP, p, ATTACK, 4))
        again = Move(PRO, Or(p, Not(p)), ATTACK, 1)
        assert not is_repeat(dlg, again, E)
        assert is_repeat(dlg, again, Ruleset(repeat_identity=RepeatIdentity.MOVE))
        assert again in legal_moves(dlg, E)

    def test_rendering(self):
        dlg = play(Implies(p, p), Move(OPP, p, ATTACK, 0), Move(PRO, p, DEFEND, 1))
        assert render_dialogue(dlg).splitlines() == [
            "0. P assert (p => p)", "1. O attack(0) p", "2. P defend(1) p"]
        assert render_move(3, Move(OPP, WhichInstance(c), ATTACK, 2)) == "3. O attack(2) ?[c]"
        assert render_move(1, Move(OPP, RIGHT, ATTACK, 0)) == "1. O attack(0) ^R"


# --- random plays -----------------------------------------------------------

def _formulas():
    return st.one_of(prop_formulas(max_leaves=6), closed_fo_formulas(max_depth=4))


@st.composite
def random_plays(draw):
    f = draw(_formulas().filter(lambda g: not isinstance(g, Atom)))
    rules = draw(st.sampled_from([E, D, Ruleset(no_repeats=False),
                                  Ruleset(repeat_identity=RepeatIdentity.MOVE)]))
    dlg = initial_dialogue(f)
    steps = [dlg]
    for _ in range(draw(st.integers(0, 14))):
        moves = legal_moves(dlg, rules)
        if not moves:
            break
        m = moves[draw(st.integers(0, len(moves) - 1))]
        assert check_move(dlg, m, rules) is None
        dlg = apply_move(dlg, m, rules)
        steps.append(dlg)
    return rules, steps


@settings(max_examples=300, deadline=None)
@given(random_plays())
def test_dialogue_invariants(play_):
    rules, steps = play_
    final = steps[-1]
    moves = final.moves
    # replay soundness
    assert Dialogue.replay(moves).bookkeeping() == final.bookkeeping()
    # alternation and references
    for i, m in enumerate(moves):
        assert m.player is (PRO if i % 2 == 0 else OPP)
        if i:
            assert m.reference < i and moves[m.reference].player is not m.player
            if rules.variant is Variant.E and m.player is OPP:
                assert m.reference == i - 1
    # Pro-atom safety
    for i, m in enumerate(moves):
        if m.player is PRO and isinstance(m.statement, Atom):
            assert m.statement in steps[i - 1].opp_formulas
    # defend-once / attack-once
    defended = [m.reference for m in moves if m.stance is DEFEND]
    assert len(defended) == len(set(defended))
    attacked_pro = [m.reference for m in moves if m.stance is ATTACK and m.player is OPP]
    assert len(attacked_pro) == len(set(attacked_pro))
    # monotone term pool
    for a, b in zip(steps, steps[1:]):
        assert set(a.pool) <= set(b.pool)
    # closure: the final dialogue's moves are all applicable
    for m in legal_moves(final, rules):
        assert isinstance(apply_move(final, m, rules), Dialogue)
    # winner agrees with move availability
    w = winner(final, rules)
    if w is Outcome.ONGOING:
        assert legal_moves(final, rules)
    else:
        assert (w is Outcome.PRO_WINS) == (final.to_move is OPP)
