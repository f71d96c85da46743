"""From formulas to automata, and which binary formulas describe jumps."""

from regtrans.automata import marked_universe
from regtrans.mso_logic import (check_functional, functionality_counterexample, language_dfa,
                                parse_formula, to_text)

show = lambda w: "".join(w) or "ε"

print("closed formulas and their minimal automata over {a, b}:")
for text in ["(ex x (lab a x))",
             "(not (ex x (and (lab a x) (ex y (and (edge * x y) (lab a y))))))",
             "(exS X (and (all y (all z (imp (edge * y z) (or (and (in y X) (not (in z X)))"
             " (and (not (in y X)) (in z X)))))) (all y (imp (not (ex z (edge * z y))) (in y X)))"
             " (all y (imp (not (ex z (edge * y z))) (not (in y X))))))"]:
    d = language_dfa(parse_formula(text), "ab").minimize()
    sample = [w for w in ("", "a", "ab", "aa", "abab", "aab") if d.accepts(w)]
    print(f"  {d.n_states} states, accepts {sample}\n    {text[:70]}{'...' if len(text) > 70 else ''}")

print("\nmoves: a jump needs at most one target for every source")
for text in ["(edge * x y)", "(lab R y)", "(path x y)", "(and (path+ x y) (lab a y))"]:
    phi = parse_formula(text)
    ok = check_functional(phi, "ab")
    extra = "" if ok else f"; shortest witness {show(functionality_counterexample(phi, 'ab'))}"
    print(f"  {to_text(phi):32s} functional: {ok}{extra}")
print(f"\nwitnesses are tapes over {''.join(marked_universe('ab'))}")
