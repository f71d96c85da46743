import random

import pytest

from regtrans.automata import AlphabetMismatch, Dfa, Nfa, dfa_to_regex, regex_to_dfa
from conftest import words


def random_dfa(rng, n=5, alphabet="ab"):
    delta = [[rng.randrange(n) for _ in alphabet] for _ in range(n)]
    acc = {s for s in range(n) if rng.random() < 0.4}
    return Dfa(alphabet, delta, 0, acc)


def test_complement_involution():
    rng = random.Random(1)
    for _ in range(10):
        d = random_dfa(rng)
        cc = d.complement().complement()
        assert all(cc.accepts(w) == d.accepts(w) for w in words(6))


def test_determinize_a_star_b():
    n = Nfa("ab", 2, {(0, "a"): {0}, (0, "b"): {1}}, [0], {1})
    d = n.determinize()
    assert d.accepts("ab") and d.accepts("aab") and not d.accepts("ba")


def test_minimize_preserves_language():
    rng = random.Random(7)
    for _ in range(20):
        d = random_dfa(rng)
        m = d.minimize()
        assert m.n_states <= d.n_states
        assert all(m.accepts(w) == d.accepts(w) for w in words(6))


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        Dfa.universal("ab").intersect(Dfa.universal("abc"))


def test_regex_round_trip():
    for text in ["a*b", "(ab|b)*", "L(a|b)*R", "a(ba)*"]:
        d = regex_to_dfa(text, ("⊢", "a", "b", "⊣"))
        assert regex_to_dfa(dfa_to_regex(d), d.alphabet).equivalent(d)


def test_witness_and_emptiness():
    d = regex_to_dfa("aab", "ab")
    assert tuple(d.witness()) == tuple("aab")
    assert Dfa.empty("ab").is_empty()
    assert d.difference(d).witness() is None
