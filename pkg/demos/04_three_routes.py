"""Three ways to map aⁿ to every w#w with |w| = n, and one that fails.

A formula transduction with set parameters, a guessing gsm followed by a
deterministic copier, and a tape-rewriting machine with three visits per
cell agree.  A single two-way gsm that guesses the two halves separately
can only approximate the relation: it cannot tie the second half to the first.
"""

from regtrans import corpus
from regtrans.finite_visit import decompose_finite_visit, run_hennie
from regtrans.mso_transduction import apply_string
from regtrans.two_way_machines import enumerate_nondeterministic, outputs

tau = corpus.guess_square()
G, D, H = corpus.guesser(), corpus.doubler(), corpus.hennie_copy()
for n in range(4):
    w = "a" * n
    logic = apply_string(tau, w)
    composed = {D_out for u in outputs(G, w) for D_out in outputs(D, u)}
    hennie = run_hennie(H, w)
    print(f"n={n}: {len(logic)} outputs; all three agree: {logic == composed == hennie}")

dec, R, replay = decompose_finite_visit(G, 4)
print(f"\nthe guesser as relabelling + replay machine: {len(dec.code)} visiting sequences, "
      f"{len(replay.states)} replay states; on aa it gives {sorted(dec.apply('aa'))}")

T = corpus.two_guesses()
print("\nsingle machine, visit bound k:")
for k in (2, 4, 8):
    got = enumerate_nondeterministic(T, "a", k)
    print(f"  k={k}: on 'a' it produces {sorted(got)}")
print("  the mixed pairs a#b and b#a never go away (a demonstration, not a proof)")
