"""Two-way machines with a read-only input tape ⊢w⊣ and a one-way output.

Instructions are 8-tuples ``(p, test, q1, α1, μ1, q0, α0, μ0)``: when the
test holds at the head position the machine takes the first branch,
otherwise the second.  Tests and moves come in three flavours:

* ``gsm``: the test compares the symbol under the head, moves are -1/0/+1;
* ``rla``: the test also checks the prefix and suffix against regular languages;
* ``mso``: the test is a formula φ(x), the move a functional formula φ(x,y).

``hennie`` machines are gsm machines whose branches may rewrite the cell.
"""

import logging
from dataclasses import dataclass, field

from .automata import Dfa, dfa_to_regex, marked_universe, regex_to_dfa
from .mso_logic import (TRUE, EvalError, FormulaError, Structure, check_functional,
                        compile_formula, compiled_holds, free_vars,
                        functionality_counterexample, has_set_quantifier,
                        parse_formula, read_sexp, _sexp_tokens, to_text)
from .string_graphs import LEFT, RIGHT, label_from_text, label_to_text, tape_encode

log = logging.getLogger(__name__)

KINDS = ("gsm", "rla", "mso", "hennie")
COMPILE_ABOVE = 10   # input length above which mso formulas go through automata


class MachineError(ValueError):
    pass


# --------------------------------------------------------------------------
# instruction parts


@dataclass(frozen=True)
class SymTest:
    sym: str

    def to_text(self):
        return f"sym {label_to_text(self.sym)}"


@dataclass(frozen=True, eq=False)
class RlaTest:
    """Prefix in ``left``, current symbol ``sym``, suffix in ``right``."""
    left: Dfa
    sym: str
    right: Dfa
    left_text: str = None
    right_text: str = None

    def to_text(self):
        lt = self.left_text or dfa_to_regex(self.left)
        rt = self.right_text or dfa_to_regex(self.right)
        return f"rla {lt} {label_to_text(self.sym)} {rt}"

    def __eq__(self, other):
        return (isinstance(other, RlaTest) and self.sym == other.sym
                and self.left.equivalent(other.left) and self.right.equivalent(other.right))

    def __hash__(self):
        return hash(("rla", self.sym))


@dataclass(frozen=True)
class MsoTest:
    formula: object

    def to_text(self):
        return f"mso {to_text(self.formula)}"


@dataclass(frozen=True)
class MsoMove:
    formula: object

    def to_text(self):
        return f"mso {to_text(self.formula)}"


def move_text(m):
    if isinstance(m, MsoMove):
        return m.to_text()
    return {-1: "-1", 0: "0", 1: "+1"}[m]


@dataclass(frozen=True)
class Branch:
    state: str
    out: str = ""
    move: object = 0
    write: str = None     # hennie machines only

    def to_text(self):
        s = f"{self.state} {self.out or '-'} {move_text(self.move)}"
        if self.write is not None:
            s += f" @{label_to_text(self.write)}"
        return s


@dataclass(frozen=True)
class Instruction:
    state: str
    test: object
    then: Branch
    else_: Branch

    def to_text(self):
        return f"inst {self.state} {self.test.to_text()} => {self.then.to_text()} / {self.else_.to_text()}"


def rla_test(left, sym, right, sigma, left_text=None, right_text=None):
    """Build an rla test normalised so that left·sym·right ⊆ ⊢Σ*⊣."""
    U = marked_universe(sigma)
    if isinstance(left, str):
        left_text, left = left, regex_to_dfa(left, U)
    if isinstance(right, str):
        right_text, right = right, regex_to_dfa(right, U)
    inner = regex_to_dfa("(" + "|".join(sigma) + ")*", U)
    if sym == LEFT:
        lnorm = Dfa.epsilon(U)
    else:
        lnorm = regex_to_dfa("L", U).concat(inner)
    if sym == RIGHT:
        rnorm = Dfa.epsilon(U)
    else:
        rnorm = inner.concat(regex_to_dfa("R", U))
    nl = left.intersect(lnorm).minimize()
    nr = right.intersect(rnorm).minimize()
    # keep the user's text only when normalisation changed nothing
    if left_text is not None and not nl.equivalent(left):
        left_text = None
    if right_text is not None and not nr.equivalent(right):
        right_text = None
    return RlaTest(nl, sym, nr, left_text, right_text)


def trivial_rla_test(sym, sigma):
    """The look-around test equivalent to the plain symbol test."""
    return rla_test(Dfa.universal(marked_universe(sigma)), sym,
                    Dfa.universal(marked_universe(sigma)), sigma)


# --------------------------------------------------------------------------
# machines


class Machine:
    def __init__(self, name, kind, input_alphabet, output_alphabet, states, initial, final,
                 instructions, visits=None, work=None):
        if kind not in KINDS:
            raise MachineError(f"unknown machine kind {kind!r}")
        self.name = name
        self.kind = kind
        self.input_alphabet = tuple(input_alphabet)
        self.output_alphabet = tuple(output_alphabet)
        self.states = tuple(dict.fromkeys(states))
        self.initial = initial
        self.final = final
        self.instructions = tuple(instructions)
        self.visits = visits
        self.work = tuple(work) if work is not None else None
        self._check()
        self.by_state = {}
        for ins in self.instructions:
            self.by_state.setdefault(ins.state, []).append(ins)

    def _check(self):
        ss = set(self.states)
        for s in (self.initial, self.final):
            if s not in ss:
                raise MachineError(f"state {s!r} is not declared")
        outs = set(self.output_alphabet)
        tape_syms = set(self.tape_alphabet()) | {LEFT, RIGHT}
        for ins in self.instructions:
            if ins.state == self.final:
                raise MachineError("no instruction may start in the final state")
            for st in (ins.state, ins.then.state, ins.else_.state):
                if st not in ss:
                    raise MachineError(f"state {st!r} is not declared")
            for br in (ins.then, ins.else_):
                bad = set(br.out) - outs
                if bad:
                    raise MachineError(f"output symbols {sorted(bad)} outside the output alphabet")
                if br.write is not None:
                    if self.kind != "hennie":
                        raise MachineError("only hennie machines rewrite their tape")
                    if br.write not in self.tape_alphabet():
                        raise MachineError(f"rewrite symbol {br.write!r} outside the work alphabet")
                if isinstance(br.move, MsoMove):
                    if self.kind != "mso":
                        raise MachineError("formula moves need kind mso")
                    if not free_vars(br.move.formula) <= {"x", "y"}:
                        raise MachineError("move formulas have free variables x and y only")
                elif br.move not in (-1, 0, 1):
                    raise MachineError(f"bad move {br.move!r}")
            t = ins.test
            if isinstance(t, SymTest):
                if self.kind in ("rla", "mso"):
                    raise MachineError(f"{self.kind} machines use {self.kind} tests")
                if t.sym not in tape_syms:
                    raise MachineError(f"test symbol {t.sym!r} outside the tape alphabet")
            elif isinstance(t, RlaTest):
                if self.kind != "rla":
                    raise MachineError("look-around tests need kind rla")
            elif isinstance(t, MsoTest):
                if self.kind != "mso":
                    raise MachineError("formula tests need kind mso")
                if not free_vars(t.formula) <= {"x"}:
                    raise MachineError("test formulas have free variable x only")
            else:
                raise MachineError(f"unknown test {t!r}")

    def tape_alphabet(self):
        if self.kind == "hennie" and self.work is not None:
            return tuple(dict.fromkeys(self.input_alphabet + self.work))
        return self.input_alphabet

    @property
    def deterministic(self):
        return all(len(v) <= 1 for v in self.by_state.values())

    def __repr__(self):
        return (f"Machine({self.name!r}, kind={self.kind}, states={len(self.states)}, "
                f"instructions={len(self.instructions)})")

    def replace(self, **kw):
        d = dict(name=self.name, kind=self.kind, input_alphabet=self.input_alphabet,
                 output_alphabet=self.output_alphabet, states=self.states, initial=self.initial,
                 final=self.final, instructions=self.instructions, visits=self.visits,
                 work=self.work)
        d.update(kw)
        return Machine(**d)

    def to_text(self):
        sym = lambda xs: " ".join(label_to_text(s) for s in xs)
        lines = [f"machine {self.name}", f"kind {self.kind}",
                 f"input {sym(self.input_alphabet)}", f"output {sym(self.output_alphabet)}"]
        if self.work is not None:
            lines.append(f"work {sym(self.work)}")
        if self.visits is not None:
            lines.append(f"visits {self.visits}")
        lines += [f"states {' '.join(self.states)}", f"initial {self.initial}",
                  f"final {self.final}"]
        lines += [ins.to_text() for ins in self.instructions]
        return "\n".join(lines) + "\n"


def fresh_state(base, taken):
    name = base
    i = 1
    while name in taken:
        name = f"{base}.{i}"
        i += 1
    taken.add(name)
    return name


# --------------------------------------------------------------------------
# validation and normal forms


@dataclass
class ValidationReport:
    deterministic: bool
    short_output: bool
    rla_normalized: bool = True
    functional: bool = True
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.rla_normalized and self.functional

    def lines(self):
        out = [f"deterministic: {'yes' if self.deterministic else 'no'}",
               f"output chunks of length <= 1: {'yes' if self.short_output else 'no'}",
               f"look-around tests normalised: {'yes' if self.rla_normalized else 'no'}",
               f"move formulas functional: {'yes' if self.functional else 'no'}"]
        return out + [f"problem: {p}" for p in self.problems]


_FUNCTIONAL = {}


def move_is_functional(phi, sigma):
    key = (phi, tuple(sigma))
    if key not in _FUNCTIONAL:
        _FUNCTIONAL[key] = functionality_counterexample(phi, tuple(sigma))
    return _FUNCTIONAL[key]


def validate(M):
    rep = ValidationReport(M.deterministic,
                           all(len(b.out) <= 1 for i in M.instructions for b in (i.then, i.else_)))
    for p, insts in M.by_state.items():
        if len(insts) > 1:
            rep.problems.append(f"state {p} has {len(insts)} instructions")
    U = marked_universe(M.input_alphabet)
    for ins in M.instructions:
        t = ins.test
        if isinstance(t, RlaTest):
            norm = rla_test(t.left, t.sym, t.right, M.input_alphabet)
            if not (t.left.equivalent(norm.left) and t.right.equivalent(norm.right)):
                rep.rla_normalized = False
                rep.problems.append(f"look-around test of state {ins.state} is not normalised")
            if t.left.alphabet != U or t.right.alphabet != U:
                rep.rla_normalized = False
                rep.problems.append(f"look-around test of state {ins.state} has a foreign alphabet")
        for br in (ins.then, ins.else_):
            if isinstance(br.move, MsoMove):
                w = move_is_functional(br.move.formula, M.input_alphabet)
                if w is not None:
                    rep.functional = False
                    rep.problems.append(f"move {to_text(br.move.formula)} of state {ins.state} "
                                        f"is not functional (witness {''.join(map(label_to_text, w))})")
    return rep


def always_test(M, sigma=None):
    """A test for chaining instructions whose two branches coincide."""
    if M.kind == "rla":
        return trivial_rla_test(LEFT, M.input_alphabet)
    if M.kind == "mso":
        return MsoTest(TRUE)
    return SymTest(LEFT)


def normalize_short_output(M):
    """Equivalent machine whose branches write at most one symbol."""
    taken = set(M.states)
    states = list(M.states)
    out = []
    for ins in M.instructions:
        branches = []
        for br in (ins.then, ins.else_):
            if len(br.out) <= 1:
                branches.append(br)
                continue
            chain = [fresh_state(f"{ins.state}>{br.state}.{len(out)}", taken)
                     for _ in range(len(br.out) - 1)]
            states += chain
            branches.append(Branch(chain[0], br.out[0], 0, br.write))
            for j, s in enumerate(chain):
                nxt = chain[j + 1] if j + 1 < len(chain) else br.state
                mv = 0 if j + 1 < len(chain) else br.move
                b = Branch(nxt, br.out[j + 1], mv)
                out.append(Instruction(s, always_test(M), b, b))
        out.append(Instruction(ins.state, ins.test, branches[0], branches[1]))
    # chain instructions were appended before their source; order by source state
    order = {s: i for i, s in enumerate(states)}
    out.sort(key=lambda i: order[i.state])
    return M.replace(states=states, instructions=out)


def separate_final_state(M):
    """Equivalent machine whose initial and final states differ."""
    if M.initial != M.final:
        return M
    taken = set(M.states)
    q = fresh_state(f"{M.initial}.start", taken)
    b = Branch(M.final, "", 0)
    return M.replace(states=(q,) + M.states, initial=q,
                     instructions=(Instruction(q, always_test(M), b, b),) + M.instructions)


def to_eight_tuple(five_tuples, deterministic, name="m", input_alphabet="ab",
                   output_alphabet=None, initial=None, final=None, states=None, kind="gsm"):
    """Machine from 5-tuples (p, σ, q, α, move).

    Nondeterministic: every 5-tuple gets a dummy else branch (p, ε, 0).
    Deterministic: the k alternatives of p are tried one after another
    through copies p, p^2, ..., p^(k+1); the last copy has no instruction.
    """
    five = [tuple(t) for t in five_tuples]
    order = list(states) if states is not None else []
    for (p, _, q, _, _) in five:
        for s in (p, q):
            if s not in order:
                order.append(s)
    if initial is None:
        initial = order[0] if order else "0"
    if final is None:
        final = order[-1] if order else initial
    for s in (initial, final):
        if s not in order:
            order.append(s)
    if output_alphabet is None:
        output_alphabet = sorted({c for t in five for c in t[3]})
    test = (lambda s: SymTest(s)) if kind == "gsm" else (lambda s: trivial_rla_test(s, input_alphabet))
    insts = []
    if not deterministic:
        for (p, s, q, a, m) in five:
            insts.append(Instruction(p, test(s), Branch(q, a, m), Branch(p, "", 0)))
        return Machine(name, kind, input_alphabet, output_alphabet, order, initial, final, insts)
    groups = {}
    for t in five:
        groups.setdefault(t[0], []).append(t)
    taken = set(order)
    for p, alts in groups.items():
        for (_, s, _, _, _) in alts:
            if sum(1 for a in alts if a[1] == s) > 1:
                raise MachineError(f"state {p} has two alternatives for symbol {s!r}")
        copies = [p] + [fresh_state(f"{p}^{j}", taken) for j in range(2, len(alts) + 2)]
        for c in copies[1:]:
            order.insert(order.index(p) + copies.index(c), c)
        for j, (_, s, q, a, m) in enumerate(alts):
            insts.append(Instruction(copies[j], test(s), Branch(q, a, m),
                                     Branch(copies[j + 1], "", 0)))
    return Machine(name, kind, input_alphabet, output_alphabet, order, initial, final, insts)


# --------------------------------------------------------------------------
# simulation


class _Context:
    """Evaluates tests and moves of one machine on one input."""

    def __init__(self, M, w, evaluator="auto"):
        self.M = M
        self.w = w
        self.tape = LEFT + w + RIGHT
        self.n2 = len(self.tape)
        self.cache = {}
        self.evaluator = evaluator
        self._structure = None

    def structure(self):
        if self._structure is None:
            self._structure = Structure(tape_encode(self.w))
        return self._structure

    def _compiled(self, f):
        if self.evaluator == "naive":
            return False
        if self.evaluator == "compiled":
            return True
        return len(self.w) > COMPILE_ABOVE or has_set_quantifier(f)

    def test(self, t, pos, tape=None):
        cell = (tape or self.tape)[pos]
        if isinstance(t, SymTest):
            return cell == t.sym
        key = (id(t), pos)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if isinstance(t, RlaTest):
            r = (cell == t.sym and t.left.accepts(self.tape[:pos])
                 and t.right.accepts(self.tape[pos + 1:]))
        elif isinstance(t, MsoTest):
            f = t.formula
            if self._compiled(f):
                d = compile_formula(f, marked_universe(self.M.input_alphabet), "ngr", ("x",))
                r = compiled_holds(d, self.tape, {"x": pos}, ("x",))
            else:
                r = self.structure().holds(f, {"x": pos})
        else:
            raise MachineError(f"unknown test {t!r}")
        self.cache[key] = r
        return r

    def move(self, m, pos):
        """New head position, or None when the branch fails."""
        if not isinstance(m, MsoMove):
            np = pos + m
            return np if 0 <= np < self.n2 else None
        key = ("mv", id(m), pos)
        if key in self.cache:
            return self.cache[key]
        f = m.formula
        if self._compiled(f):
            d = compile_formula(f, marked_universe(self.M.input_alphabet), "ngr", ("x", "y"))
            hits = [v for v in range(self.n2)
                    if compiled_holds(d, self.tape, {"x": pos, "y": v}, ("x", "y"))]
        else:
            S = self.structure()
            hits = [v for v in range(self.n2) if S.holds(f, {"x": pos, "y": v})]
        if len(hits) > 1:
            raise MachineError(f"move {to_text(f)} is not functional at position {pos} "
                               f"of {self.tape!r}")
        r = hits[0] if hits else None
        self.cache[key] = r
        return r

    def steps(self, state, pos, tape):
        """(instruction index, branch, new position, new tape) for each instruction."""
        for ins in self.M.by_state.get(state, ()):
            br = ins.then if self.test(ins.test, pos, tape) else ins.else_
            np = self.move(br.move, pos)
            if np is None:
                continue
            nt = tape
            if br.write is not None and tape[pos] not in (LEFT, RIGHT):
                nt = tape[:pos] + br.write + tape[pos + 1:]
            yield ins, br, np, nt


@dataclass
class Computation:
    """An accepting computation: configurations and the branches between them."""
    word: str
    configs: list          # (state, position) pairs, first (q_in, 0)
    branches: list         # branch taken from configs[i] to configs[i+1]
    tapes: list = None     # hennie: tape contents at each configuration

    @property
    def output(self):
        return "".join(b.out for b in self.branches)

    def visit_counts(self):
        c = [0] * (len(self.word) + 2)
        for (_, p) in self.configs:
            c[p] += 1
        return c


def _check_input(M, w):
    bad = set(w) - set(M.input_alphabet)
    if bad:
        raise MachineError(f"input symbols {sorted(bad)} outside the input alphabet")


def trace_deterministic(M, w, evaluator="auto"):
    """(Computation, None) when M accepts w, else (None, reason)."""
    if not M.deterministic:
        raise MachineError(f"machine {M.name} is not deterministic")
    _check_input(M, w)
    ctx = _Context(M, w, evaluator)
    state, pos, tape = M.initial, 0, ctx.tape
    configs, branches, tapes = [(state, pos)], [], [tape]
    seen = {(state, pos, tape)}
    while state != M.final:
        ins = M.by_state.get(state)
        if not ins:
            return None, f"no instruction for state {state}"
        (ins,) = ins
        br = ins.then if ctx.test(ins.test, pos, tape) else ins.else_
        np = ctx.move(br.move, pos)
        if np is None:
            return None, f"move from position {pos} in state {state} fails"
        if br.write is not None and tape[pos] not in (LEFT, RIGHT):
            tape = tape[:pos] + br.write + tape[pos + 1:]
        state, pos = br.state, np
        conf = (state, pos, tape)
        if conf in seen:
            return None, f"loop at state {state}, position {pos}"
        seen.add(conf)
        configs.append((state, pos))
        branches.append(br)
        tapes.append(tape)
    comp = Computation(w, configs, branches, tapes if M.kind == "hennie" else None)
    if M.kind != "hennie":
        # a deterministic run never repeats a configuration, so no cell is
        # visited more often than there are states
        counts = comp.visit_counts()
        assert max(counts) <= len(M.states), (M.name, w, counts)
    return comp, None


def run_deterministic(M, w, evaluator="auto"):
    """Output string, or None when the transduction is undefined on w."""
    comp, _ = trace_deterministic(M, w, evaluator)
    return None if comp is None else comp.output


def _initial_visits(n2):
    v = [0] * n2
    v[0] = 1
    return tuple(v)


def enumerate_nondeterministic(M, w, k, evaluator="auto"):
    """Outputs of all accepting computations visiting no cell more than k times."""
    if k < 1:
        raise ValueError("visit bound must be at least 1")
    _check_input(M, w)
    ctx = _Context(M, w, evaluator)
    memo = {}

    def go(state, pos, tape, visits):
        if state == M.final:
            return frozenset([""])
        key = (state, pos, tape, visits)
        hit = memo.get(key)
        if hit is not None:
            return hit
        res = set()
        for ins, br, np, nt in ctx.steps(state, pos, tape):
            if br.state == state and np == pos and not br.out and nt == tape:
                continue       # a silent self-loop never helps
            if visits[np] >= k:
                continue
            v = list(visits)
            v[np] += 1
            for tail in go(br.state, np, nt, tuple(v)):
                res.add(br.out + tail)
        r = frozenset(res)
        memo[key] = r
        return r

    return set(go(M.initial, 0, ctx.tape, _initial_visits(ctx.n2)))


def computations(M, w, k, limit=None, evaluator="auto"):
    """Yield the accepting k-visiting computations in branch order."""
    _check_input(M, w)
    ctx = _Context(M, w, evaluator)
    found = 0
    stack_configs = [(M.initial, 0)]
    stack_br = []
    stack_tapes = [ctx.tape]

    def go(state, pos, tape, visits):
        nonlocal found
        if state == M.final:
            found += 1
            yield Computation(w, list(stack_configs), list(stack_br),
                              list(stack_tapes) if M.kind == "hennie" else None)
            return
        for ins, br, np, nt in ctx.steps(state, pos, tape):
            if br.state == state and np == pos and not br.out and nt == tape:
                continue
            if visits[np] >= k:
                continue
            v = list(visits)
            v[np] += 1
            stack_configs.append((br.state, np))
            stack_br.append(br)
            stack_tapes.append(nt)
            yield from go(br.state, np, nt, tuple(v))
            stack_configs.pop()
            stack_br.pop()
            stack_tapes.pop()
            if limit is not None and found >= limit:
                return

    yield from go(M.initial, 0, ctx.tape, _initial_visits(ctx.n2))


def outputs(M, w, k=None):
    """Output set of M on w: the deterministic run, or k-visit enumeration."""
    if M.deterministic and M.kind != "hennie":
        r = run_deterministic(M, w)
        return set() if r is None else {r}
    if k is None:
        k = M.visits or len(M.states)
    return enumerate_nondeterministic(M, w, k)


# --------------------------------------------------------------------------
# text format


class ParseError(ValueError):
    pass


def _take_formula(s, i):
    """Read one formula term from s[i:]; returns (formula, next index)."""
    while i < len(s) and s[i].isspace():
        i += 1
    if i >= len(s):
        raise ParseError("missing formula")
    if s[i] != "(":
        j = i
        while j < len(s) and not s[j].isspace():
            j += 1
        return parse_formula(s[i:j]), j
    depth = 0
    for j in range(i, len(s)):
        if s[j] == "(":
            depth += 1
        elif s[j] == ")":
            depth -= 1
            if depth == 0:
                return parse_formula(s[i:j + 1]), j + 1
    raise ParseError("unbalanced parentheses in formula")


def _take_token(s, i):
    while i < len(s) and s[i].isspace():
        i += 1
    j = i
    while j < len(s) and not s[j].isspace():
        j += 1
    if i == j:
        raise ParseError("unexpected end of line")
    return s[i:j], j


def _parse_move(s, i):
    tok, j = _take_token(s, i)
    if tok == "mso":
        f, j = _take_formula(s, j)
        return MsoMove(f), j
    if tok in ("-1", "0", "+1", "1"):
        return int(tok), j
    raise ParseError(f"bad move {tok!r}")


def _parse_branch(s, i):
    q, i = _take_token(s, i)
    out, i = _take_token(s, i)
    out = "" if out == "-" else out
    mv, i = _parse_move(s, i)
    write = None
    k = i
    while k < len(s) and s[k].isspace():
        k += 1
    if k < len(s) and s[k] == "@":
        tok, i = _take_token(s, k)
        write = label_from_text(tok[1:])
    return Branch(q, out, mv, write), i


def _parse_inst(s, sigma):
    i = 0
    p, i = _take_token(s, i)
    kind, i = _take_token(s, i)
    if kind == "sym":
        tok, i = _take_token(s, i)
        test = SymTest(label_from_text(tok))
    elif kind == "rla":
        lt, i = _take_token(s, i)
        tok, i = _take_token(s, i)
        rt, i = _take_token(s, i)
        test = rla_test(lt, label_from_text(tok), rt, sigma)
    elif kind == "mso":
        f, i = _take_formula(s, i)
        test = MsoTest(f)
    else:
        raise ParseError(f"unknown test kind {kind!r}")
    arrow, i = _take_token(s, i)
    if arrow != "=>":
        raise ParseError("expected '=>' after the test")
    b1, i = _parse_branch(s, i)
    slash, i = _take_token(s, i)
    if slash != "/":
        raise ParseError("expected '/' between the branches")
    b0, i = _parse_branch(s, i)
    if s[i:].strip():
        raise ParseError(f"trailing text {s[i:].strip()!r}")
    return Instruction(p, test, b1, b0)


def parse_machine(text):
    head = {}
    inst_lines = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "inst":
            inst_lines.append((n, rest))
        elif key in ("machine", "kind", "input", "output", "states", "initial", "final",
                     "visits", "work"):
            head[key] = rest
        else:
            raise ParseError(f"line {n}: unknown keyword {key!r}")
    for key in ("machine", "kind", "input", "states", "initial", "final"):
        if key not in head:
            raise ParseError(f"missing '{key}' line")
    sigma = tuple(label_from_text(t) for t in head["input"].split())
    insts = []
    for n, rest in inst_lines:
        try:
            insts.append(_parse_inst(rest, sigma))
        except (ParseError, FormulaError, ValueError) as e:
            raise ParseError(f"line {n}: {e}") from None
    try:
        return Machine(head["machine"], head["kind"], sigma,
                       tuple(head.get("output", "").split()), head["states"].split(),
                       head["initial"], head["final"], insts,
                       int(head["visits"]) if "visits" in head else None,
                       tuple(label_from_text(t) for t in head["work"].split())
                       if "work" in head else None)
    except MachineError as e:
        raise ParseError(str(e)) from None
