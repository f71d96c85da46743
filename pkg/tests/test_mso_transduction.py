import pytest

from regtrans.corpus import (eps_two_outputs, guess_square, prefix_a_egr, segment_copy,
                             segment_copy_mso)
from regtrans.mso_logic import FormulaError, Lab, TRUE, parse_formula
from regtrans.mso_transduction import (Alternatives, MsoTransduction, ParseError, Pipeline,
                                       SignatureError, apply, apply_string, domains_disjoint,
                                       ed2nd, edge_relabelling_to_mso, egr_to_ngr, gr_id,
                                       gr_id_inv, identity, ladder, mark_egr, mark_ngr, nd2ed,
                                       ngr_to_egr, parse_transductions, pullback_through_gr_id,
                                       relabel_strings, relabelling_to_mso, union)
from regtrans.string_graphs import LEFT, RIGHT, UNLAB, Graph, egr_encode, ngr_encode
from regtrans.two_way_machines import run_deterministic
from conftest import words


def test_ladder_shape():
    (g,) = apply(ladder("ab"), ngr_encode("ab"))
    expect = Graph(range(4), {i: UNLAB for i in range(4)},
                   [(0, UNLAB, 1), (0, "a", 2), (1, "b", 3), (3, UNLAB, 2)])
    assert g == expect


def test_identity_both_encodings():
    ngr = identity(("a", "b"), (UNLAB,))
    egr = identity((UNLAB,), ("a", "b"))
    for w in words(4):
        assert apply(ngr, ngr_encode(w)) == {ngr_encode(w)}
        assert apply_string(egr, w) == {w}


def test_guess_square_outputs():
    for n in range(4):
        expect = {w + "#" + w for w in words(n, min_len=n)}
        assert apply_string(guess_square(), "a" * n) == expect
    assert apply_string(guess_square(), "ab") == set()


def test_eps_two_outputs():
    assert apply_string(eps_two_outputs(), "") == {"a", "b"}


def test_graph_form_matches_machine():
    t, m = segment_copy_mso(), segment_copy()
    for w in words(5):
        assert apply_string(t, w) == {run_deterministic(m, w)}, w


def test_literal_formula_breaks():
    from regtrans.corpus import segment_copy_mso as build
    bad = build(literal=True)
    with pytest.raises(Exception):
        assert apply_string(bad, "ab") == {"abb"}


def test_encodings_round_trip():
    for w in words(4, min_len=1):
        assert apply_string(ed2nd("ab"), w) == {w}
        assert apply_string(nd2ed("ab"), w) == {w}
        assert apply(mark_ngr("ab"), ngr_encode(w)) == {ngr_encode(LEFT + w + RIGHT)}
    for w in words(4):
        assert apply_string(gr_id("ab"), w) == {w}
        assert apply_string(gr_id_inv("ab"), w) == {LEFT + w + RIGHT}
        assert apply(mark_egr("ab"), egr_encode(w)) == {egr_encode(LEFT + w + RIGHT)}
    assert apply(mark_ngr("ab"), ngr_encode("")) == set()


def test_relabelling():
    R = [("a", "a"), ("a", "b"), ("b", "b")]
    t, te = relabelling_to_mso(R), edge_relabelling_to_mso(R)
    for w in words(5):
        assert apply_string(t, w) == relabel_strings(R, w)
        assert apply_string(te, w) == relabel_strings(R, w)


def test_union_and_disjointness():
    only_a = MsoTransduction("as", ["1"], parse_formula("(all x (lab a x))"),
                             {("1", "a"): Lab("a", "x")}, {("1", "1", UNLAB): parse_formula("(edge * x y)")},
                             (), (("a", "b"), (UNLAB,)), (("a", "b"), (UNLAB,)))
    has_b = MsoTransduction("bs", ["1", "2"], parse_formula("(ex x (lab b x))"),
                            {("1", "b"): TRUE}, {}, (), (("a", "b"), (UNLAB,)),
                            (("a", "b"), (UNLAB,)))
    assert domains_disjoint(only_a, has_b, "ab", "ngr")
    assert not domains_disjoint(only_a, only_a, "ab", "ngr")
    u = union(only_a, has_b)
    for w in words(4, min_len=1):
        expect = apply(only_a, ngr_encode(w)) | apply(has_b, ngr_encode(w))
        assert apply(u, ngr_encode(w)) == expect
    with pytest.raises(SignatureError):
        union(only_a, guess_square())


def test_alternatives_overlap_detected():
    t = identity(("a", "b"), (UNLAB,))
    with pytest.raises(ValueError):
        Alternatives([t, t]).apply(ngr_encode("a"))


def test_pipeline_flattens_and_composes():
    p = Pipeline([Pipeline([gr_id_inv("ab")]), gr_id("ab")])
    assert len(p.stages) == 3
    for w in words(3):
        assert apply_string(p, w) == {w}


def test_pullback_through_gr_id():
    t = pullback_through_gr_id(prefix_a_egr(), "ab")
    for w in words(4):
        assert apply_string(t, w) == {"a" + w}


def test_encoding_sandwiches():
    swap = MsoTransduction("swap", ["1"], TRUE,
                           {("1", "a"): Lab("b", "x"), ("1", "b"): Lab("a", "x")},
                           {("1", "1", UNLAB): parse_formula("(edge * x y)")}, (),
                           (("a", "b"), (UNLAB,)), (("a", "b"), (UNLAB,)), ("ngr", "ngr"))
    as_egr = ngr_to_egr(swap, "ab", "ab")
    for w in words(4):
        assert apply_string(as_egr, w) == {w.translate(str.maketrans("ab", "ba"))}
    back = egr_to_ngr(prefix_a_egr(), "ab", "ab")
    for w in words(3, min_len=1):
        assert apply_string(back, w) == {"a" + w}
    # prefix-a maps ε to "a", so the ngr form cannot contain that pair
    assert apply_string(back, "") == set()


def test_text_round_trip():
    for t in (segment_copy_mso(), guess_square(), eps_two_outputs(), ladder("ab"), prefix_a_egr()):
        u = parse_transductions(t.to_text())
        assert u.to_text() == t.to_text()
        assert u.copies == t.copies and u.params == t.params


def test_pipeline_text_parses():
    p = parse_transductions(Pipeline([ed2nd("ab"), nd2ed("ab")], "there-and-back").to_text())
    assert isinstance(p, Pipeline) and p.name == "there-and-back"
    assert apply_string(p, "ab") == {"ab"}


@pytest.mark.parametrize("text", [
    "copies 1\n",
    "transduction t\nnode 1 a (lab a x)\n",
    "transduction t\ncopies 1\nnode 1 a (lab a y)\n",
    "transduction t\ncopies 1\nnode 1 a (lab a x\n",
    "transduction t\ncopies 1\nfrobnicate\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_transductions(text)


def test_bad_parameter_name():
    with pytest.raises(FormulaError):
        MsoTransduction("t", ["1"], TRUE, {}, {}, ("x",))
