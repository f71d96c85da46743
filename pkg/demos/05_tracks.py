"""Visiting sequences, and how the five-pass machine rearranges its output."""

from regtrans import corpus
from regtrans.finite_visit import (extract_track, output_segments, predict_insertion,
                                   rearrangement_substitution, track_automaton, validate_track)
from regtrans.two_way_machines import run_deterministic, trace_deterministic

M = corpus.segment_copy()
comp, _ = trace_deterministic(M, "aaabbaba")
t = extract_track(comp, M)
print("track of the segment copier on aaabbaba:")
print(t.to_text())
k = len(M.states)
print(f"valid: {validate_track(t, M, k)}; accepted by the track automaton: "
      f"{track_automaton(M, k).accepts(t)}")

P = corpus.pass_permuter()
comp, _ = trace_deterministic(P, "aaaaa")
print(f"\nfive-pass machine on aaaaa, output cut at the border after cell 3:")
print(" ", output_segments(comp, 3))
for i in range(4):
    sub = rearrangement_substitution(i)
    w = "aaa" + "b" * i + "aa"
    pred = predict_insertion(comp, 3, i)
    print(f"  {i} b's: z1,z2,z3 -> {[''.join(sub[z]) or 'ε' for z in ('z1', 'z2', 'z3')]}"
          f"  predicted {pred}  actual {run_deterministic(P, w)}")
