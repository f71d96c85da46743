"""A deterministic machine as a chain of graph transductions.

Stage one builds the graph of all configurations, stage two keeps the path
of the actual run, stage three contracts the silent steps.  The output
graph spells the machine's output on its edges.
"""

from regtrans import corpus
from regtrans.conversions import computation_space, dgsm_to_msoe
from regtrans.mso_transduction import apply, apply_string
from regtrans.string_graphs import tape_encode
from regtrans.two_way_machines import run_deterministic

M = corpus.segment_copy()
w = "aab"
g = tape_encode(w)
(space,) = apply(computation_space(M), g)
print(f"input {w}: the configuration graph has {len(space.nodes)} nodes and {len(space.edges)} edges")

P = dgsm_to_msoe(M)
print(f"\nthe full pipeline has {len(P.stages)} stages: {[s.name for s in P.stages]}")
for w in ["", "ab", "aab", "abab", "aaabbaba"]:
    r = run_deterministic(M, w)
    print(f"  {w or 'ε':9s} pipeline {sorted(apply_string(P, w))}  machine {r!r}")

E = corpus.m_even_identity()
P = dgsm_to_msoe(E)
print("\nundefined stays undefined (even-length identity):")
for w in ["ab", "aba"]:
    print(f"  {w:4s} pipeline {sorted(apply_string(P, w))}  machine {run_deterministic(E, w)!r}")
