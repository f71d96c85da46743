import random

import pytest

from regtrans.automata import Dfa, marked_universe, regex_to_dfa
from regtrans.mso_logic import (TRUE, Edge, Eq, EvalError, FormulaError, Path, and_,
                                brute_force_functional, check_functional, compile_formula,
                                compiled_holds, evaluate, expand_derived, first_of_block, free_vars,
                                functionality_counterexample, language_dfa, next_sym,
                                parse_formula, relativize, split_single_occurrence, string_shape,
                                to_text, union_of_pieces)
from regtrans.string_graphs import LEFT, RIGHT, UNLAB, ngr_encode, tape_encode
from conftest import words
from formula_suite import MOVES, formula_suite


def test_eval_examples():
    g = ngr_encode("ababb")
    first, last = g.nodes[0], g.nodes[-1]
    assert evaluate(g, parse_formula("(lab a x)"), {"x": first})
    assert evaluate(g, parse_formula("(path x y)"), {"x": first, "y": last})
    assert evaluate(ngr_encode(""), string_shape())


def test_unbound_variable():
    with pytest.raises((EvalError, FormulaError, KeyError)):
        evaluate(ngr_encode("a"), parse_formula("(lab a x)"))


def test_text_round_trip():
    for f in formula_suite().values():
        assert parse_formula(to_text(f)) == f


def test_compile_true_and_shape():
    d = language_dfa(TRUE, "ab")
    assert all(d.accepts(w) for w in words(4))
    d = language_dfa(string_shape(), "ab")
    assert all(d.accepts(w) for w in words(4))


def test_compile_some_a():
    d = language_dfa(parse_formula("(ex x (lab a x))"), "ab")
    assert all(d.accepts(w) == ("a" in w) for w in words(6))


def test_compile_rejects_foreign_labels():
    with pytest.raises(Exception):
        compile_formula(parse_formula("(ex x (lab c x))"), "ab", "ngr", ())


@pytest.mark.parametrize("name", sorted(formula_suite()))
def test_compiled_agrees_with_naive(name):
    phi = formula_suite()[name]
    vs = tuple(sorted(free_vars(phi)))
    d = compile_formula(phi, "ab", "ngr", vs)
    for w in words(5):
        g = ngr_encode(w)
        vals = [{}] if not vs else [{vs[0]: u} for u in g.nodes]
        for nu in vals:
            pos = {v: g.nodes.index(u) for v, u in nu.items()}
            assert compiled_holds(d, w, pos, vs) == evaluate(g, phi, nu), (w, nu)


def test_path_expansion_agrees():
    phi = parse_formula("(and (path x y) (path+ y x))")
    psi = parse_formula("(path+ x y)")
    g = ngr_encode("abab")
    for f in (phi, psi):
        e = expand_derived(f, (UNLAB,))
        for u in g.nodes:
            for v in g.nodes:
                assert evaluate(g, f, {"x": u, "y": v}) == evaluate(g, e, {"x": u, "y": v})




@pytest.mark.parametrize("name", sorted(MOVES))
def test_check_functional_matches_brute_force(name):
    phi = MOVES[name]
    assert check_functional(phi, "ab") == brute_force_functional(phi, "ab", 4)


def test_functional_examples():
    assert check_functional(Edge(UNLAB, "x", "y"), "ab")
    assert check_functional(Eq("x", "y"), "ab")
    assert check_functional(next_sym("a"), "ab")
    assert check_functional(first_of_block("a"), "ab")
    w = functionality_counterexample(Path("x", "y"), "ab")
    assert w == LEFT + RIGHT          # the shortest witness: ⊢ reaches itself and ⊣
    with pytest.raises(FormulaError):
        check_functional(parse_formula("(lab a z)"), "ab")


def test_relativize_examples():
    phi = parse_formula("(ex y (lab a y))")
    left = relativize(phi, "left", "x")
    g = tape_encode("ab")
    assert evaluate(g, left, {"x": g.nodes[2]})
    assert not evaluate(g, left, {"x": g.nodes[0]})
    assert evaluate(g, relativize(TRUE, "right", "x"), {"x": g.nodes[1]})


@pytest.mark.parametrize("text", ["(ex y (lab a y))", "(all y (lab a y))",
                                  "(ex y (ex z (and (edge * y z) (lab b z))))"])
def test_relativize_at_last_position(text):
    phi = parse_formula(text)
    left = relativize(phi, "left", "x")
    for w in words(5):
        g = tape_encode(w)
        assert evaluate(g, left, {"x": g.nodes[-1]}) == evaluate(ngr_encode(LEFT + w), phi)


def test_split_simple():
    A = regex_to_dfa("0*10*", "01")
    pieces = split_single_occurrence(A, ["1"])
    assert len(pieces) == 1
    l, a, r = pieces[0]
    assert a == "1"
    assert l.equivalent(regex_to_dfa("0*", "0")) and r.equivalent(regex_to_dfa("0*", "0"))


def test_split_precondition():
    with pytest.raises(ValueError):
        split_single_occurrence(regex_to_dfa("0*1*", "01"), ["1"])


def test_split_random_recombines():
    rng = random.Random(3)
    for _ in range(5):
        n = 4
        delta = [[rng.randrange(n) for _ in "abc"] for _ in range(n)]
        base = Dfa("abc", delta, 0, {s for s in range(n) if rng.random() < .5})
        one_c = regex_to_dfa("(a|b)*c(a|b)*", "abc")
        A = base.intersect(one_c).minimize()
        pieces = split_single_occurrence(A, ["c"])
        assert union_of_pieces(pieces, "abc").equivalent(A)
