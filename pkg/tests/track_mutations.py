"""Random edits of valid tracks, used to check that broken tracks are rejected."""

import random
from dataclasses import replace

from regtrans.finite_visit import Track, VisitingSequence


def _edit(seq, rng, states, outputs):
    vs = list(seq.visits)
    kind = rng.choice(["state", "out", "after", "drop", "dup", "swap"])
    if not vs:
        kind = "dup-empty"
    if kind == "dup-empty":
        return None
    i = rng.randrange(len(vs))
    v = vs[i]
    if kind == "state":
        vs[i] = replace(v, state=rng.choice([s for s in states if s != v.state] or [v.state]))
    elif kind == "out":
        vs[i] = replace(v, out=rng.choice([o for o in [""] + list(outputs) if o != v.out]))
    elif kind == "after":
        vs[i] = replace(v, after=rng.choice([d for d in (-1, 0, 1) if d != v.after]))
    elif kind == "drop":
        del vs[i]
    elif kind == "dup":
        vs.insert(i, v)
    elif kind == "swap":
        if len(vs) < 2:
            return None
        j = rng.randrange(len(vs))
        vs[i], vs[j] = vs[j], vs[i]
    return VisitingSequence(seq.symbol, tuple(vs))


def mutate(track, M, rng):
    """A track differing from ``track`` in one cell (same input word), or None."""
    for _ in range(20):
        i = rng.randrange(len(track))
        s = _edit(track[i], rng, M.states, M.output_alphabet)
        if s is not None and s != track[i]:
            t = list(track)
            t[i] = s
            return Track(t)
    return None


def mutants(pairs, count, seed=0):
    """``count`` (machine, k, valid tracks of the word, mutant) tuples drawn
    from ``pairs`` = [(machine, k, [valid tracks of one word])]."""
    rng = random.Random(seed)
    out = []
    tries = 0
    while len(out) < count and tries < 100 * count:
        tries += 1
        M, k, valid = rng.choice(pairs)
        m = mutate(rng.choice(valid), M, rng)
        if m is not None and m not in valid:
            out.append((M, k, m))
    return out
