"""Fixture machines and transductions used by the tests, demos and CLI.

Text fixtures live in ``regtrans/data``; the 5-tuple machines are built
here and their files are regenerated with ``write_data_files``.
"""

from importlib import resources

from .mso_logic import (FALSE, TRUE, Edge, Eq, In, Lab, Path, and_, exists, first_of_block,
                        next_sym, not_, or_, parse_formula, tape_shape, egr_shape)
from .mso_transduction import MsoTransduction, parse_transductions
from .string_graphs import LEFT, RIGHT, UNLAB
from .two_way_machines import (Branch, Instruction, Machine, MsoMove, MsoTest, SymTest,
                               parse_machine, to_eight_tuple)

L, R = LEFT, RIGHT


def data_path(name):
    return resources.files("regtrans") / "data" / name


def load_machine(name):
    return parse_machine(data_path(name).read_text(encoding="utf-8"))


def load_transduction(name):
    return parse_transductions(data_path(name).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# the segment-copy family and friends


def segment_copy():
    """Copies each a-segment, then rereads it backwards writing b's when a b follows."""
    return load_machine("segment_copy.machine")


def segment_copy_jumps():
    """Same transduction with formula tests and jumps."""
    return load_machine("segment_copy_jumps.machine")


def segment_copy_jumps_built():
    """The jump machine rebuilt from the formula library (checked against the file)."""
    succ_a = exists("y", and_(Edge(UNLAB, "x", "y"), Lab("a", "y")))
    succ_b = exists("y", and_(Edge(UNLAB, "x", "y"), Lab("b", "y")))
    later_a = exists("y", and_(Path("x", "y", True), Lab("a", "y")))
    step = MsoMove(Edge(UNLAB, "x", "y"))
    stay = MsoMove(Eq("x", "y"))
    to_end = MsoMove(Lab(R, "y"))
    insts = [
        Instruction("1", MsoTest(succ_a), Branch("1", "a", step), Branch("1'", "", stay)),
        Instruction("1'", MsoTest(succ_b), Branch("2", "b", MsoMove(first_of_block("a"))),
                    Branch("3", "", to_end)),
        Instruction("2", MsoTest(succ_a), Branch("2", "b", step), Branch("2'", "", stay)),
        Instruction("2'", MsoTest(later_a), Branch("1", "a", MsoMove(next_sym("a"))),
                    Branch("3", "", to_end)),
    ]
    return Machine("segment-copy-jumps", "mso", "ab", "ab", ["1", "1'", "2", "2'", "3"], "2'", "3", insts)


PASS_PERMUTER = {
    # (state, symbol): (next state, output, move)
    (1, L): (1, "", 1), (2, L): (3, "b", 0), (3, L): (3, "", 1), (4, L): (5, "b", 0), (5, L): (5, "", 1),
    (1, "a"): (1, "a", 1), (2, "a"): (2, "a", -1), (3, "a"): (3, "a", 1), (4, "a"): (4, "a", -1), (5, "a"): (5, "a", 1),
    (1, "b"): (2, "", -1), (2, "b"): (4, "", -1), (3, "b"): (1, "", 1), (4, "b"): (5, "", 1), (5, "b"): (3, "", 1),
    (1, R): (2, "c", 0), (2, R): (2, "", -1), (3, R): (4, "c", 0), (4, R): (4, "", -1), (5, R): (6, "", 0),
}


def pass_permuter_tuples():
    order = (L, "a", "b", R)
    return [(str(p), s, str(q), a, m)
            for p in range(1, 6) for s in order
            for (q, a, m) in [PASS_PERMUTER[(p, s)]]]


def pass_permuter(deterministic=True):
    """Five passes per a-segment; each b permutes the passes of its neighbours."""
    return to_eight_tuple(pass_permuter_tuples(), deterministic,
                          "pass-permuter" if deterministic else "pass-permuter-dummy",
                          "ab", "abc", "1", "6", [str(i) for i in range(1, 7)])


def segment_copy_mso(literal=False):
    """Hand-written graph transduction computing the segment copier.

    ``literal=True`` drops the lab_a(z) guard on the 3→5 edge formula.  The
    unguarded version never fires (every a has a predecessor), so the output
    falls apart on inputs such as ``ab``.
    """
    if not literal:
        return load_transduction("segment_copy.transduction")
    t = load_transduction("segment_copy.transduction")
    e31 = t.edge_formulas[("3", "1", "b")]
    e33 = Edge(UNLAB, "z", "x")
    from .mso_logic import rename
    literal35 = not_(exists("z", or_(rename(e31, {"y": "z"}), e33)))
    edges = dict(t.edge_formulas)
    edges[("3", "5", "b")] = literal35
    return MsoTransduction("segment-copy-mso-literal", t.copies, t.domain, t.node_formulas, edges,
                           t.params, t.input_labels, t.output_labels, t.encoding)


def guess_square():
    """a^n ↦ w#w with |w| = n, guessed through the partition X_a, X_b."""
    return load_transduction("guess_square.transduction")


def eps_two_outputs():
    """{(ε,a), (ε,b)} in edge representation, one parameter."""
    return load_transduction("eps_two_outputs.transduction")


# --------------------------------------------------------------------------
# the deterministic corpus (5-tuples, chained into 8-tuples)


def _det(name, tuples, final, outputs="ab", initial="0"):
    return to_eight_tuple(tuples, True, name, "ab", outputs, initial, final)


def _copy_pass(p, q, direction=1, out=True):
    return [(p, "a", p, "a" if out else "", direction), (p, "b", p, "b" if out else "", direction)]


def m_identity():
    return _det("identity", [("0", L, "1", "", 1)] + _copy_pass("1", "1") +
                [("1", R, "2", "", 0)], "2")


def m_reverse():
    return _det("reverse", [("0", L, "0", "", 1)] + _copy_pass("0", "0", 1, False) +
                [("0", R, "1", "", -1)] + _copy_pass("1", "1", -1) + [("1", L, "2", "", 0)], "2")


def m_square():
    return _det("ww", [("0", L, "1", "", 1)] + _copy_pass("1", "1") + [("1", R, "2", "", -1)] +
                _copy_pass("2", "2", -1, False) + [("2", L, "3", "", 1)] + _copy_pass("3", "3") +
                [("3", R, "4", "", 0)], "4")


def m_double_a():
    return _det("double-a", [("0", L, "1", "", 1), ("1", "a", "1", "aa", 1), ("1", "b", "1", "b", 1),
                             ("1", R, "2", "", 0)], "2")


def m_delete_b():
    return _det("delete-b", [("0", L, "1", "", 1), ("1", "a", "1", "a", 1), ("1", "b", "1", "", 1),
                             ("1", R, "2", "", 0)], "2")


def m_palindrome():
    return _det("w-rev-w", [("0", L, "1", "", 1)] + _copy_pass("1", "1") + [("1", R, "2", "", -1)] +
                _copy_pass("2", "2", -1) + [("2", L, "3", "", 0)], "3")


def m_swap():
    return _det("swap", [("0", L, "1", "", 1), ("1", "a", "1", "b", 1), ("1", "b", "1", "a", 1),
                         ("1", R, "2", "", 0)], "2")


def m_prefix_a():
    return _det("prefix-a", [("0", L, "1", "a", 1)] + _copy_pass("1", "1") +
                [("1", R, "2", "", 0)], "2")


def m_last_symbol():
    return _det("last-symbol", [("0", L, "0", "", 1)] + _copy_pass("0", "0", 1, False) +
                [("0", R, "1", "", -1), ("1", "a", "2", "a", 0), ("1", "b", "2", "b", 0),
                 ("1", L, "2", "", 0)], "2")


def m_even_identity():
    return _det("even-identity", [("0", L, "1", "", 1), ("1", "a", "2", "a", 1), ("1", "b", "2", "b", 1),
                                  ("2", "a", "1", "a", 1), ("2", "b", "1", "b", 1),
                                  ("1", R, "3", "", 0)], "3")


def deterministic_corpus():
    return [segment_copy(), pass_permuter(True), m_identity(), m_reverse(), m_square(),
            m_double_a(), m_delete_b(), m_palindrome(), m_swap(), m_prefix_a(),
            m_last_symbol(), m_even_identity()]


# --------------------------------------------------------------------------
# nondeterministic machines


def guesser():
    """a^n ↦ every w over {a,b} of length n, in one pass."""
    return load_machine("guesser.machine")


def doubler():
    """w ↦ w#w, deterministic, three passes."""
    return _det("doubler", [("0", L, "1", "", 1)] + _copy_pass("1", "1") + [("1", R, "2", "#", -1)] +
                _copy_pass("2", "2", -1, False) + [("2", L, "3", "", 1)] + _copy_pass("3", "3") +
                [("3", R, "4", "", 0)], "4", "ab#")


def hennie_copy():
    """The 3-visit Hennie machine: rewrite-and-emit pass, return, copy pass."""
    return load_machine("hennie_copy.machine")


def two_guesses():
    """Guesses w1 and w2 independently: a^n ↦ w1#w2.  Approximates
    {(a^n, w#w)} from above; no single-gsm design can hit it exactly."""
    return load_machine("two_guesses.machine")


def repeat_copy():
    """{(a^n, a^(mn)) : m, n ≥ 1}: copy the input, then optionally go back."""
    return load_machine("repeat_copy.machine")


def nondeterministic_corpus():
    return [guesser(), two_guesses(), repeat_copy(), pass_permuter(False)]


# --------------------------------------------------------------------------


def write_data_files(directory=None):
    """Regenerate the machine files that are built from 5-tuples."""
    from pathlib import Path as P
    d = P(directory) if directory else P(str(data_path("")))
    (d / "pass_permuter.machine").write_text(pass_permuter(True).to_text(), encoding="utf-8")
    (d / "pass_permuter_dummy.machine").write_text(pass_permuter(False).to_text(), encoding="utf-8")
    (d / "doubler.machine").write_text(doubler().to_text(), encoding="utf-8")
    for m in deterministic_corpus()[2:]:
        (d / f"{m.name}.machine").write_text(m.to_text(), encoding="utf-8")


def prefix_a_egr():
    """Edge-string transduction w ↦ aw; defined on ε as well."""
    from .mso_logic import first_node
    first = first_node("x", ("a", "b"))
    nodes = {("p", UNLAB): first, ("1", UNLAB): TRUE}
    edges = {("p", "1", "a"): Eq("x", "y"),
             ("1", "1", "a"): Edge("a", "x", "y"), ("1", "1", "b"): Edge("b", "x", "y")}
    return MsoTransduction("prefix-a-egr", ["p", "1"], egr_shape("ab"), nodes, edges, (),
                           ((UNLAB,), ("a", "b")), ((UNLAB,), ("a", "b")), ("egr", "egr"))
