import pytest

from regtrans import corpus
from regtrans.string_graphs import LEFT, RIGHT
from regtrans.two_way_machines import (MachineError, ParseError, computations,
                                       enumerate_nondeterministic, normalize_short_output,
                                       outputs, parse_machine, run_deterministic,
                                       separate_final_state, to_eight_tuple, trace_deterministic,
                                       validate)
from conftest import words


def segment_copy_oracle(w):
    parts = w.split("b")
    return "".join(p + "b" * len(p) for p in parts[:-1]) + parts[-1]


ORACLES = {
    "identity": lambda w: w,
    "reverse": lambda w: w[::-1],
    "ww": lambda w: w + w,
    "double-a": lambda w: w.replace("a", "aa"),
    "delete-b": lambda w: w.replace("b", ""),
    "w-rev-w": lambda w: w + w[::-1],
    "swap": lambda w: w.translate(str.maketrans("ab", "ba")),
    "prefix-a": lambda w: "a" + w,
    "last-symbol": lambda w: w[-1:],
    "even-identity": lambda w: w if len(w) % 2 == 0 else None,
    "doubler": lambda w: w + "#" + w,
}


def test_segment_copy_sample():
    assert run_deterministic(corpus.segment_copy(), "aaabbaba") == "aaabbbaba"


@pytest.mark.parametrize("build", [corpus.segment_copy, corpus.segment_copy_jumps,
                                   corpus.segment_copy_jumps_built])
def test_segment_copy_against_oracle(build):
    M = build()
    for w in words(6):
        assert run_deterministic(M, w) == segment_copy_oracle(w), w


def test_built_jump_machine_matches_file():
    assert corpus.segment_copy_jumps_built().instructions == corpus.segment_copy_jumps().instructions


@pytest.mark.parametrize("M", corpus.deterministic_corpus()[2:] + [corpus.doubler()],
                         ids=lambda m: m.name)
def test_corpus_against_oracles(M):
    f = ORACLES[M.name]
    for w in words(5):
        assert run_deterministic(M, w) == f(w), w


def test_visit_counts_bounded():
    for M in corpus.deterministic_corpus():
        for w in words(4):
            comp, _ = trace_deterministic(M, w)
            if comp is not None:
                assert max(comp.visit_counts()) <= len(M.states)


def test_foreign_input_rejected():
    with pytest.raises(MachineError):
        run_deterministic(corpus.segment_copy(), "abc")


def test_loop_reported():
    det = to_eight_tuple([("0", LEFT, "1", "", 1), ("1", "a", "2", "", -1), ("2", LEFT, "1", "", 1),
                          ("1", RIGHT, "3", "", 0)], True, "bounce", final="3")
    comp, why = trace_deterministic(det, "a")
    assert comp is None and "loop" in why
    assert run_deterministic(det, "") == ""


def test_validate_reports():
    rep = validate(corpus.segment_copy_jumps())
    assert rep.ok and rep.deterministic
    bad = parse_machine(corpus.segment_copy_jumps().to_text().replace("(lab R y)", "(path x y)"))
    rep = validate(bad)
    assert not rep.functional
    assert any("not functional" in p for p in rep.problems)
    rep = validate(corpus.guesser())
    assert not rep.deterministic and any("instructions" in p for p in rep.problems)


def test_normalize_short_output():
    M = corpus.m_double_a()
    assert not validate(M).short_output
    N = normalize_short_output(M)
    assert validate(N).short_output and N.deterministic
    for w in words(5):
        assert run_deterministic(N, w) == run_deterministic(M, w)


def test_separate_final_state():
    M = corpus.m_identity()
    assert separate_final_state(M) is M


def test_eight_tuple_rejects_clash():
    with pytest.raises(MachineError):
        to_eight_tuple([("0", "a", "1", "", 1), ("0", "a", "2", "", 1)], True)


def test_eight_tuple_chains_alternatives():
    M = corpus.pass_permuter(True)
    assert M.deterministic
    assert "1^5" in M.states and "1^6" not in M.states


def test_guesser_outputs():
    for n in range(4):
        assert outputs(corpus.guesser(), "a" * n) == set(words(n, min_len=n))


@pytest.mark.parametrize("M", [corpus.two_guesses(), corpus.repeat_copy(), corpus.guesser()],
                         ids=lambda m: m.name)
def test_enumeration_monotone_in_k(M):
    for w in ("", "a", "aa"):
        prev = set()
        for k in range(1, 6):
            cur = enumerate_nondeterministic(M, w, k)
            assert prev <= cur
            prev = cur


def test_computations_agree_with_enumeration():
    M = corpus.two_guesses()
    for w in ("a", "aa"):
        outs = {c.output for c in computations(M, w, 3)}
        assert outs == enumerate_nondeterministic(M, w, 3)
    assert len(list(computations(M, "aa", 3, limit=2))) == 2


def test_repeat_copy_values():
    got = enumerate_nondeterministic(corpus.repeat_copy(), "a", 5)
    assert got and all(set(s) == {"a"} for s in got)
    assert "a" in got and "aa" in got


def test_nondeterministic_dummy_matches():
    D, N = corpus.pass_permuter(True), corpus.pass_permuter(False)
    for w in words(3):
        r = run_deterministic(D, w)
        assert enumerate_nondeterministic(N, w, 6) == (set() if r is None else {r})


def test_text_round_trip():
    for path in sorted(p.name for p in corpus.data_path("").iterdir() if p.name.endswith(".machine")):
        M = corpus.load_machine(path)
        assert parse_machine(M.to_text()).to_text() == M.to_text()


@pytest.mark.parametrize("text", [
    "machine m\nkind gsm\ninput a\noutput a\nstates 0\ninitial 0\nfinal 9\n",
    "machine m\nkind zzz\ninput a\noutput a\nstates 0 1\ninitial 0\nfinal 1\n",
    "machine m\nkind gsm\ninput a\noutput a\nstates 0 1\ninitial 0\nfinal 1\n"
    "inst 0 sym a => 1 c +1 / 0 - 0\n",
    "machine m\nkind gsm\ninput a\noutput a\nstates 0 1\ninitial 0\nfinal 1\n"
    "inst 0 sym a => 1 a +2 / 0 - 0\n",
    "machine m\nkind gsm\ninput a\noutput a\nstates 0 1\ninitial 0\nfinal 1\ninst 0 sym a =>\n",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, MachineError)):
        parse_machine(text)
