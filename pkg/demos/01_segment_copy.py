"""The segment copier in three machine styles.

A symbol-test machine, a look-around machine and a formula machine with
jumps all compute the same function; the conversions move between them.
"""

from regtrans import corpus
from regtrans.conversions import gsm_to_rla, mso_to_rla, rla_to_mso
from regtrans.two_way_machines import run_deterministic, trace_deterministic

w = "aaabbaba"
M = corpus.segment_copy()
J = corpus.segment_copy_jumps()
print(f"input {w}")
print(f"  symbol tests  -> {run_deterministic(M, w)}")
print(f"  formula jumps -> {run_deterministic(J, w)}")

comp, _ = trace_deterministic(M, w)
print(f"\nthe run takes {len(comp.branches)} steps; visits per cell {comp.visit_counts()}")
print(f"(never more than the {len(M.states)} states, as a deterministic run cannot repeat itself)")

print("\nconverting:")
chain = [("look-around", gsm_to_rla(M))]
chain.append(("formula tests", rla_to_mso(chain[-1][1])))
chain.append(("look-around again", mso_to_rla(chain[-1][1])))
chain.append(("jump machine as look-around", mso_to_rla(J)))
for label, X in chain:
    print(f"  {label:28s} {len(X.states):3d} states, output {run_deterministic(X, w)}")
