import pytest

from regtrans import corpus
from regtrans.finite_visit import (STAR, Track, TrackError, Visit, VisitingSequence,
                                   decompose_finite_visit, detect_output_loop, extract_track,
                                   hennie_tracks, mrel_apply, output_segments, parse_track,
                                   predict_insertion, rearrangement_substitution, replay_output,
                                   run_hennie, track_automaton, track_problems, validate_track)
from regtrans.string_graphs import LEFT, RIGHT
from regtrans.two_way_machines import (MachineError, computations, enumerate_nondeterministic,
                                       run_deterministic, to_eight_tuple, trace_deterministic)
from conftest import words
from track_mutations import mutants

# the seven visiting sequences of the segment copier on aaabbaba, cells 1..7
EXPECTED_CELLS = [
    "(+1,1,+1,a) (-1,2,-1,b) (+1,1',+1,)",
    "(+1,1,+1,a) (-1,2,-1,b) (+1,1',+1,)",
    "(+1,1,+1,a) (-1,2,-1,b) (+1,1',+1,)",
]


def segment_track(w="aaabbaba"):
    M = corpus.segment_copy()
    comp, _ = trace_deterministic(M, w)
    return M, extract_track(comp, M)


def test_track_of_sample_run():
    M, t = segment_track()
    assert t.word == "aaabbaba"
    assert validate_track(t, M, len(M.states))
    assert track_automaton(M, len(M.states)).accepts(t)
    assert replay_output(t) == "aaabbbaba"
    assert parse_track(t.to_text()) == t
    assert len(t) == 10
    assert t[0].visits[0].before == STAR
    assert sum(1 for s in t for v in s.visits if v.after == STAR) == 1


def test_crossings_in_time_order():
    _, t = segment_track()
    for i in range(len(t) - 1):
        rc, lc = t[i].right_crossings(), t[i + 1].left_crossings()
        assert [d for d, _ in rc] == [{"in": "out", "out": "in"}[d] for d, _ in lc]


def test_track_text_errors():
    with pytest.raises(TrackError):
        parse_track("pos 1 a : (+1,1,+1,a)")
    with pytest.raises(TrackError):
        parse_track("pos 0 L : (*,0,+2,)")
    with pytest.raises(TrackError):
        parse_track("pos 0 L : (*,0,+1)")


def test_two_final_visits_invalid():
    M, t = segment_track("a")
    seqs = list(t)
    last = seqs[-1]
    v = last.visits[-1]
    extra = VisitingSequence(seqs[1].symbol, seqs[1].visits[:-1] +
                             (Visit(seqs[1].visits[-1].before, v.state, STAR, ""),))
    seqs[1] = extra
    probs = track_problems(Track(seqs), M, len(M.states))
    assert probs


def test_visit_bound_enforced():
    M, t = segment_track()
    assert not validate_track(t, M, 1)
    assert not track_automaton(M, 1).tracks("aaabbaba")


def test_unvisited_cells_have_empty_sequences():
    M = corpus.m_prefix_a()
    A = track_automaton(M, 3)
    for w in words(3):
        for c in computations(M, w, 3):
            assert A.accepts(extract_track(c, M))


def test_no_instructions_no_tracks():
    M = corpus.segment_copy().replace(instructions=[])
    A = track_automaton(M, 2)
    assert A.tracks("ab") == []
    dec, _, _ = decompose_finite_visit(M, 2)
    assert dec.apply("ab") == set()


def collect(M, k, max_len):
    pairs = []
    for w in words(max_len, "".join(M.input_alphabet)):
        valid = [extract_track(c, M) for c in computations(M, w, k)]
        if valid:
            pairs.append((M, k, valid))
    return pairs


@pytest.mark.parametrize("M,k", [(corpus.segment_copy(), 6), (corpus.guesser(), 2),
                                 (corpus.two_guesses(), 3), (corpus.m_reverse(), 3)],
                         ids=lambda x: getattr(x, "name", str(x)))
def test_runs_give_accepted_tracks(M, k):
    A = track_automaton(M, k)
    for _, _, valid in collect(M, k, 3):
        for t in valid:
            assert validate_track(t, M, k) and A.accepts(t)
        assert set(A.tracks(valid[0].word)) == set(valid)


def test_mutants_rejected():
    pairs = collect(corpus.segment_copy(), 6, 3) + collect(corpus.two_guesses(), 3, 2)
    ms = mutants(pairs, 30, seed=7)
    assert len(ms) == 30
    autos = {}
    for M, k, t in ms:
        A = autos.setdefault((M.name, k), track_automaton(M, k))
        assert not validate_track(t, M, k)
        assert not A.accepts(t)


def test_mrel_examples():
    R = {(LEFT, "x"), ("a", "1"), ("a", "2"), ("b", "3"), (RIGHT, "y")}
    assert mrel_apply(R, "ab") == {"x13y", "x23y"}
    assert mrel_apply(R, "") == {"xy"}
    assert mrel_apply(R - {("b", "3")}, "ab") == set()


@pytest.mark.parametrize("build,k,n", [(corpus.segment_copy, 6, 4), (corpus.guesser, 2, 4),
                                       (corpus.two_guesses, 3, 3), (corpus.doubler, 9, 2)],
                         ids=["segment-copy", "guesser", "two-guesses", "doubler"])
def test_decomposition_matches_enumeration(build, k, n):
    M = build()
    dec, R, D = decompose_finite_visit(M, k)
    assert D.deterministic
    for w in words(n, "".join(M.input_alphabet)):
        assert dec.apply(w) == enumerate_nondeterministic(M, w, k), w


def test_pruned_equals_brute_force():
    dec, _, _ = decompose_finite_visit(corpus.guesser(), 2)
    for w in words(3, "a"):
        assert dec.apply(w, prune=True) == dec.apply(w, prune=False)


def test_encode_decode():
    M, t = segment_track("ab")
    dec, _, D = decompose_finite_visit(M, len(M.states))
    u = dec.encode(t)
    assert dec.decode(u) == t
    assert run_deterministic(D, u) == "ab"


def test_hennie_copy():
    H = corpus.hennie_copy()
    for n in range(4):
        assert run_hennie(H, "a" * n) == {w + "#" + w for w in words(n, min_len=n)}
    for t in hennie_tracks(H, "aa"):
        assert validate_track(t, H, 3)
        assert all(len(s.visits) <= 3 for s in t)
    with pytest.raises(MachineError):
        run_hennie(corpus.segment_copy(), "a")


def test_output_loops():
    assert detect_output_loop(corpus.repeat_copy(), "aa")
    assert not detect_output_loop(corpus.segment_copy(), "aabab")
    assert not detect_output_loop(corpus.guesser(), "aa")


def test_rearrangement():
    M = corpus.pass_permuter()
    comp, _ = trace_deterministic(M, "aaaaa")
    assert output_segments(comp, 3) == ["aaa", "aacaa", "aaabaaa", "aacaa", "aaabaaa", "aa"]
    assert rearrangement_substitution(0) == {"z1": ("z1",), "z2": ("z2",), "z3": ("z3",)}
    assert rearrangement_substitution(1) == {"z1": (), "z2": ("z1",), "z3": ("z2", "z3")}
    for i in range(5):
        w = "aaa" + "b" * i + "aa"
        assert predict_insertion(comp, 3, i) == run_deterministic(M, w), i


def test_final_visit_writes_nothing():
    M, t = segment_track("a")
    seqs = list(t)
    v = seqs[-1].visits[-1]
    seqs[-1] = VisitingSequence(RIGHT, seqs[-1].visits[:-1] + (Visit(v.before, v.state, STAR, "a"),))
    bad = Track(seqs)
    assert not validate_track(bad, M, 6)
    assert not track_automaton(M, 6).accepts(bad)
