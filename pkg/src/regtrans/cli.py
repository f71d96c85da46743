"""Command-line interface.

Exit codes: 0 success (defined output, equal, found), 1 negative result
(undefined output, counterexample, no track), 2 usage, parse or
validation errors.  Results go to standard output, diagnostics to
standard error.  A program argument is a file path or the name of a shipped
fixture (``segment_copy.machine``, ``guess_square``, ...).
"""

import argparse
import itertools
import logging
import sys
from pathlib import Path

from . import conversions as conv
from .automata import marked_universe
from .corpus import data_path
from .finite_visit import decompose_finite_visit, extract_track, run_hennie
from .mso_logic import compile_formula, free_vars, parse_formula
from .mso_transduction import Alternatives, MsoTransduction, Pipeline, apply_string
from .string_graphs import GraphError
from .two_way_machines import (Machine, MachineError, computations, enumerate_nondeterministic,
                               parse_machine, trace_deterministic, validate)

log = logging.getLogger("regtrans")


class CliError(Exception):
    """Reported with exit code 2."""


# --------------------------------------------------------------------------
# loading


def read_program_text(name):
    p = Path(name)
    if p.exists():
        return p.read_text(encoding="utf-8")
    for cand in (name, name + ".machine", name + ".transduction"):
        d = data_path(cand)
        if d.is_file():
            return d.read_text(encoding="utf-8")
    raise CliError(f"no such file or fixture: {name}")


def load_program(name):
    """Machine, transduction or pipeline from a file or fixture name."""
    text = read_program_text(name)
    first = next((l.split()[0] for l in text.splitlines()
                  if l.strip() and not l.lstrip().startswith("#")), "")
    try:
        if first == "machine":
            return parse_machine(text)
        from .mso_transduction import parse_transductions
        return parse_transductions(text)
    except (ValueError, KeyError) as e:
        raise CliError(f"{name}: {e}") from None


def prog_outputs(prog, w, k=None):
    """Output set of any prog on w; inputs outside its alphabet have none."""
    if isinstance(prog, Machine):
        if set(w) - set(prog.input_alphabet):
            return set()
        if prog.kind == "hennie":
            return run_hennie(prog, w, k)
        if prog.deterministic:
            comp, _ = trace_deterministic(prog, w)
            return set() if comp is None else {comp.output}
        return enumerate_nondeterministic(prog, w, k or prog.visits or len(prog.states))
    sig = _input_symbols(prog)
    if sig is not None and set(w) - set(sig):
        return set()
    return apply_string(prog, w)


def _input_symbols(prog):
    if isinstance(prog, Pipeline):
        return _input_symbols(prog.stages[0])
    if isinstance(prog, Alternatives):
        return _input_symbols(prog.parts[0])
    if prog.input_labels is None:
        return None
    nodes, edges = prog.input_labels
    return [s for s in tuple(nodes) + tuple(edges) if len(s) == 1 and s.isalnum()]


def show(s):
    return s if s else "ε"


def _write(text, out):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# --------------------------------------------------------------------------
# commands


def cmd_run(a):
    M = load_program(a.prog)
    if not isinstance(M, Machine):
        raise CliError("run needs a machine file")
    if a.kind_check:
        rep = validate(M)
        for line in rep.lines():
            print(line, file=sys.stderr)
        if not rep.ok:
            return 2
    if not M.deterministic or M.kind == "hennie":
        if not a.enumerate:
            raise CliError(f"machine {M.name} is not deterministic; use --enumerate")
        outs = prog_outputs(M, a.input, a.visits)
        for o in sorted(outs):
            print(show(o))
        return 0 if outs else 1
    comp, reason = trace_deterministic(M, a.input)
    if comp is None:
        print("undefined")
        print(reason, file=sys.stderr)
        return 1
    print(comp.output)
    return 0


def cmd_enumerate(a):
    prog = load_program(a.prog)
    outs = prog_outputs(prog, a.input, a.visits)
    for o in sorted(outs):
        print(show(o))
    return 0 if outs else 1


def cmd_convert(a):
    prog = load_program(a.prog)
    to = a.to
    if to == "gsm":
        raise CliError("rla → gsm is not provided as a machine construction (it needs "
                       "composition of deterministic machines); see the README's non-goals")
    if to == "machine":
        if isinstance(prog, Machine):
            raise CliError("--to machine expects a transduction file")
        t = prog.stages[0] if isinstance(prog, Pipeline) and len(prog.stages) == 1 else prog
        if isinstance(t, MsoTransduction) and t.encoding and t.encoding[0] == "tape":
            M = conv.mso_to_dgsm_mso(t)
        elif isinstance(t, MsoTransduction) and t.input_labels and \
                any(s in ("⊢", "⊣") for s in t.input_labels[0]):
            M = conv.mso_to_dgsm_mso(t)
        else:
            M = conv.msoe_to_dgsm(t)
        _write(M.to_text(), a.output)
        return 0
    if not isinstance(prog, Machine):
        raise CliError(f"--to {to} expects a machine file")
    if to == "gsm-rla":
        R = conv.gsm_to_rla(prog)
    elif to == "rla-mso":
        R = conv.rla_to_mso(prog)
    elif to == "mso-rla":
        R = conv.mso_to_rla(prog, shortcuts=not a.no_shortcuts)
    elif to == "mso-pipeline":
        R = conv.dgsm_to_mso_pipeline(prog)
    elif to == "msoe-pipeline":
        R = conv.dgsm_to_msoe(prog)
    else:
        raise CliError(f"unknown target {to}")
    _write(R.to_text(), a.output)
    return 0


def cmd_compose(a):
    first, second = load_program(a.first), load_program(a.second)
    outs = set()
    for u in sorted(prog_outputs(first, a.input, a.visits)):
        outs |= prog_outputs(second, u, a.visits)
    for o in sorted(outs):
        print(show(o))
    return 0 if outs else 1


def words(alphabet, max_len):
    for n in range(max_len + 1):
        for t in itertools.product(sorted(alphabet), repeat=n):
            yield "".join(t)


def cmd_equiv(a):
    s1, s2 = load_program(a.first), load_program(a.second)
    n = 0
    for w in words(a.alphabet, a.max_len):
        o1, o2 = prog_outputs(s1, w, a.visits), prog_outputs(s2, w, a.visits)
        n += 1
        if o1 != o2:
            print(f"counterexample: {show(w)}")
            print("first:  {" + ", ".join(show(o) for o in sorted(o1)) + "}")
            print("second: {" + ", ".join(show(o) for o in sorted(o2)) + "}")
            return 1
    print(f"equal on {n} inputs up to length {a.max_len}")
    return 0


def cmd_track(a):
    M = load_program(a.prog)
    if not isinstance(M, Machine) or M.kind not in ("gsm", "hennie"):
        raise CliError("track needs a gsm or Hennie machine")
    k = a.visits or M.visits or len(M.states)
    found = 0
    for c in computations(M, a.input, k, limit=a.limit):
        if found:
            print()
        print(extract_track(c, M).to_text())
        found += 1
    if not found:
        print(f"no accepting {k}-visiting computation", file=sys.stderr)
        return 1
    return 0


def cmd_compile_formula(a):
    text = read_program_text(a.formula[1:]) if a.formula.startswith("@") else a.formula
    phi = parse_formula(text)
    vs = tuple(a.vars.split(",")) if a.vars else tuple(sorted(free_vars(phi)))
    if a.encoding == "tape":
        d = compile_formula(phi, marked_universe(a.alphabet), "ngr", vs)
    else:
        d = compile_formula(phi, tuple(a.alphabet), a.encoding, vs)
    d = d.minimize()
    print(f"# variables: {' '.join(vs) or '-'}; states: {d.n_states}")
    print(d.to_text())
    return 0


def cmd_decompose(a):
    M = load_program(a.prog)
    if not isinstance(M, Machine):
        raise CliError("decompose needs a machine file")
    k = a.visits or M.visits or len(M.states)
    dec, R, D = decompose_finite_visit(M, k)
    print(f"# {len(dec.code)} visiting sequences, replay machine with {len(D.states)} states")
    for c, s in sorted(dec.code.items()):
        print(f"seq U+{ord(c):04X} {s.symbol} : {s.to_text()}")
    if a.output:
        Path(a.output).write_text(D.to_text() + "\n", encoding="utf-8")
    if a.input is not None:
        outs = dec.apply(a.input)
        for o in sorted(outs):
            print(show(o))
        return 0 if outs else 1
    return 0


def cmd_hennie_run(a):
    H = load_program(a.prog)
    if not isinstance(H, Machine) or H.kind != "hennie":
        raise CliError("hennie-run needs a Hennie machine")
    outs = run_hennie(H, a.input, a.visits)
    for o in sorted(outs):
        print(show(o))
    return 0 if outs else 1


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="regtrans", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def visits(q):
        q.add_argument("--visits", "-k", type=int, default=None,
                       help="visit bound for nondeterministic machines (default |Q|)")

    q = sub.add_parser("run", help="run a deterministic machine")
    q.add_argument("prog")
    q.add_argument("input")
    q.add_argument("--kind-check", action="store_true", help="validate the machine first")
    q.add_argument("--enumerate", action="store_true", help="allow nondeterministic machines")
    visits(q)
    q.set_defaults(func=cmd_run)

    q = sub.add_parser("enumerate", help="all outputs of a machine or transduction")
    q.add_argument("prog")
    q.add_argument("input")
    visits(q)
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("convert", help="convert between machine variants and transductions")
    q.add_argument("prog")
    q.add_argument("--to", required=True,
                   choices=["gsm-rla", "rla-mso", "mso-rla", "mso-pipeline", "msoe-pipeline",
                            "machine", "gsm"])
    q.add_argument("--no-shortcuts", action="store_true",
                   help="mso-rla: walk even for plain steps")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_convert)

    q = sub.add_parser("compose", help="outputs of the second program applied to the first one's")
    q.add_argument("first")
    q.add_argument("second")
    q.add_argument("input")
    visits(q)
    q.set_defaults(func=cmd_compose)

    q = sub.add_parser("equiv", help="compare output sets on all short inputs")
    q.add_argument("first")
    q.add_argument("second")
    q.add_argument("--max-len", "-n", type=int, default=4)
    q.add_argument("--alphabet", default="ab")
    visits(q)
    q.set_defaults(func=cmd_equiv)

    q = sub.add_parser("track", help="tracks of accepting computations")
    q.add_argument("prog")
    q.add_argument("input")
    q.add_argument("--limit", type=int, default=1, help="number of computations (default 1)")
    visits(q)
    q.set_defaults(func=cmd_track)

    q = sub.add_parser("compile-formula", help="automaton of an MSO formula on strings")
    q.add_argument("formula", help="formula text, or @file")
    q.add_argument("--alphabet", default="ab")
    q.add_argument("--encoding", choices=["ngr", "egr", "tape"], default="ngr")
    q.add_argument("--vars", help="comma-separated variable order")
    q.set_defaults(func=cmd_compile_formula)

    q = sub.add_parser("decompose", help="marked relabelling and replay machine")
    q.add_argument("prog")
    q.add_argument("--input", help="also print the composed outputs on this input")
    q.add_argument("-o", "--output", help="write the replay machine here")
    visits(q)
    q.set_defaults(func=cmd_decompose)

    q = sub.add_parser("hennie-run", help="outputs of a Hennie machine")
    q.add_argument("prog")
    q.add_argument("input")
    visits(q)
    q.set_defaults(func=cmd_hennie_run)
    return p


def main(argv=None):
    p = build_parser()
    try:
        a = p.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(a, "visits", None) is not None and a.visits < 1:
        print("error: --visits must be at least 1", file=sys.stderr)
        return 2
    try:
        return a.func(a)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (MachineError, GraphError, conv.ConversionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
