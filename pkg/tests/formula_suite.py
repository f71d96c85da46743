"""Formulas with at most one free node variable, shared by the logic tests
and the acceptance script."""

from regtrans.mso_logic import (exists, first_node, first_of_block, last_node, next_sym,
                                parse_formula, string_shape)

_TEXT = {
    "lab-a": "(lab a x)",
    "some-a": "(ex x (lab a x))",
    "all-a": "(all x (lab a x))",
    "factor-ab": "(ex x (ex y (and (edge * x y) (lab a x) (lab b y))))",
    "has-successor": "(ex y (edge * x y))",
    "path-to-last": "(ex y (and (path x y) (not (ex z (edge * y z)))))",
    "later-b": "(ex y (and (path+ x y) (lab b y)))",
    "a-suffix": "(all y (imp (path x y) (lab a y)))",
    "no-aa": "(not (ex x (and (lab a x) (ex y (and (edge * x y) (lab a y))))))",
    "set-of-as": "(exS X (and (in x X) (all y (imp (in y X) (lab a y)))))",
    "even-length": "(exS X (and (all y (all z (imp (edge * y z) (or (and (in y X) (not (in z X)))"
                   " (and (not (in y X)) (in z X)))))) (all y (imp (not (ex z (edge * z y)))"
                   " (in y X))) (all y (imp (not (ex z (edge * y z))) (not (in y X))))))",
    "b-here": "(ex y (and (= x y) (lab b y)))",
    "closed-set-reach": "(allS X (imp (and (in x X) (all y (all z (imp (and (in y X) (edge * y z))"
                        " (in z X))))) (ex y (and (in y X) (lab b y)))))",
}


def formula_suite():
    suite = {k: parse_formula(v) for k, v in _TEXT.items()}
    suite["string-shape"] = string_shape()
    suite["next-a"] = exists("y", next_sym("a"))
    suite["first-in-block-a"] = exists("y", first_of_block("a"))
    suite["first-node"] = first_node("x")
    suite["last-node"] = last_node("x")
    return suite


MOVES = {k: parse_formula(v) for k, v in {
    "step": "(edge * x y)",
    "stay": "(= x y)",
    "back": "(edge * y x)",
    "path": "(path x y)",
    "to-end": "(lab R y)",
    "later-a": "(and (path+ x y) (lab a y))",
    "next-a": "(and (path+ x y) (lab a y) (not (ex z (and (path+ x z) (path+ z y) (lab a z)))))",
}.items()}
MOVES["next-sym-a"] = next_sym("a")
MOVES["first-in-block-a"] = first_of_block("a")
