"""Constructive conversions between the machine variants and MSO transductions.

gsm → rla → mso → rla rewrite instructions one by one.  ``dgsm_to_mso_pipeline``
builds the computation-space pipeline of a deterministic gsm, and
``mso_to_dgsm_mso`` turns a deterministic transduction from tapes to edge
strings into a machine with formula tests and jumps.
"""

from functools import lru_cache

from .automata import Dfa, marked_universe
from .mso_logic import (FALSE, TRUE, Edge, Eq, Lab, Path, and_, compile_formula, dfa_formula,
                        exists, fresh, marked_tape_language, not_, or_, relativize, rename,
                        split_single_occurrence, tape_shape, widen)
from .mso_transduction import (MsoTransduction, Pipeline, gr_id_inv, pullback_through_gr_id)
from .string_graphs import LEFT, RIGHT, UNLAB
from .two_way_machines import (Branch, Instruction, Machine, MsoMove, MsoTest,
                               RlaTest, fresh_state, normalize_short_output, rla_test,
                               separate_final_state, trivial_rla_test)

EPS = "~"          # edge label standing for the empty output in computation spaces
INIT, FIN = "init", "fin"


class ConversionError(ValueError):
    pass


def _require(M, kind):
    if M.kind != kind:
        raise ConversionError(f"expected a {kind} machine, got kind {M.kind}")


# --------------------------------------------------------------------------
# gsm → rla → mso


def gsm_to_rla(M):
    """Symbol tests become look-around tests with trivial languages."""
    _require(M, "gsm")
    insts = [Instruction(i.state, trivial_rla_test(i.test.sym, M.input_alphabet), i.then, i.else_)
             for i in M.instructions]
    return M.replace(kind="rla", instructions=insts)


def _step_formula(m):
    return {1: Edge(UNLAB, "x", "y"), 0: Eq("x", "y"), -1: Edge(UNLAB, "y", "x")}[m]


def _side_formula(d, side, sigma, sym):
    """Formula for 'the prefix (suffix) at x lies in L(d)'; true when d
    accepts every prefix (suffix) a tape can have at a σ-position."""
    U = marked_universe(sigma)
    full = (rla_test(Dfa.universal(U), sym, Dfa.universal(U), sigma))
    if (d.equivalent(full.left) if side == "left" else d.equivalent(full.right)):
        return TRUE
    return relativize(dfa_formula(d), side, "x")


def rla_to_mso(M):
    """Look-around tests become relativised formulas, steps become edge formulas."""
    _require(M, "rla")
    sigma = M.input_alphabet
    insts = []
    for i in M.instructions:
        t = i.test
        f = and_(_side_formula(t.left, "left", sigma, t.sym), Lab(t.sym, "x"),
                 _side_formula(t.right, "right", sigma, t.sym))
        br = [Branch(b.state, b.out, MsoMove(_step_formula(b.move))) for b in (i.then, i.else_)]
        insts.append(Instruction(i.state, MsoTest(f), br[0], br[1]))
    return M.replace(kind="mso", instructions=insts)


# --------------------------------------------------------------------------
# mso → rla


def _plain(d, U):
    """Dfa over flagged letters with all flags zero ↦ Dfa over the plain tape alphabet."""
    d = d.rename(lambda l: l[0])
    return widen(d, U).minimize() if tuple(d.alphabet) != tuple(U) else d


def unary_pieces(phi, sigma):
    """(R_ℓ, σ, R_r) over the tape alphabet whose disjoint union describes
    the marked tapes ⊢w⊣ with a position x satisfying φ(x)."""
    U = marked_universe(sigma)
    d = compile_formula(phi, U, "ngr", ("x",))
    d = d.intersect(marked_tape_language(sigma, ("x",))).minimize()
    marked = [(a, (1,)) for a in U]
    pieces = split_single_occurrence(d, marked)
    out = []
    for left, (a, _), right in pieces:
        out.append((_plain(left, U), a, _plain(right, U)))
    return out


def binary_pieces(phi, sigma):
    """Five-part descriptions (R_ℓ, σ, R_m, τ, R_r, direction) of the pairs
    (x, y) with φ(x, y) and x ≠ y; ``direction`` is +1 when y lies right of x.
    σ sits at the leftmost of the two positions."""
    U = marked_universe(sigma)
    d = compile_formula(and_(phi, not_(Eq("x", "y"))), U, "ngr", ("x", "y"))
    d = d.intersect(marked_tape_language(sigma, ("x", "y"))).minimize()
    useful = d.trim_states()
    zero = [(a, (0, 0)) for a in U]
    out = []
    for bits in ((1, 0), (0, 1)):
        other = (1 - bits[0], 1 - bits[1])
        for p in sorted(useful):
            for a in U:
                q = d.step(p, (a, bits))
                if q not in useful:
                    continue
                left = d.with_accepting({p}).restrict(zero).minimize()
                if left.is_empty():
                    continue
                tail = d.with_start(q).restrict(zero + [(b, other) for b in U]).minimize()
                for mid, (b, _), right in split_single_occurrence(tail, [(b, other) for b in U]):
                    out.append((_plain(left, U), a, _plain(mid, U), b, _plain(right, U),
                                1 if bits == (1, 0) else -1))
    return out


class _Builder:
    """Accumulates states and instructions of a machine under construction."""

    def __init__(self, M):
        self.M = M
        self.taken = set(M.states)
        self.states = list(M.states)
        self.insts = []
        self._dead = None

    def state(self, base):
        s = fresh_state(base, self.taken)
        self.states.append(s)
        return s

    def dead(self):
        if self._dead is None:
            self._dead = self.state("dead")
        return self._dead

    def add(self, p, test, then, else_):
        self.insts.append(Instruction(p, test, then, else_))

    def chain(self, p, tests, thens, else_):
        """Try tests one after another at the same position."""
        if not tests:
            self.add(p, rla_never(self.M.input_alphabet), else_, else_)
            return
        cur = p
        for j, (t, th) in enumerate(zip(tests, thens)):
            last = j == len(tests) - 1
            nxt = else_ if last else Branch(self.state(f"{p}/{j + 1}"), "", 0)
            self.add(cur, t, th, nxt)
            cur = nxt.state


def rla_never(sigma):
    U = marked_universe(sigma)
    return RlaTest(Dfa.empty(U), LEFT, Dfa.empty(U))


def _rla_tests(pieces, sigma):
    return [rla_test(l, a, r, sigma) for (l, a, r) in pieces]


@lru_cache(maxsize=None)
def _cached_unary(phi, sigma):
    return tuple(unary_pieces(phi, sigma))


@lru_cache(maxsize=None)
def _cached_binary(phi, sigma):
    return tuple(binary_pieces(phi, sigma))


def _simple_move(phi):
    """Plain step for the three formulas a step translates to."""
    if phi == Eq("x", "y") or phi == Eq("y", "x"):
        return 0
    if phi == Edge(UNLAB, "x", "y"):
        return 1
    if phi == Edge(UNLAB, "y", "x"):
        return -1
    return None


def mso_to_rla(M, shortcuts=True):
    """Replace formula tests by chains of look-around tests and jumps by walks.

    A jump (q, α, φ) first writes α, then probes whether the target lies at,
    right of or left of the head, picks the five-part piece of φ that
    applies, and walks there while running an automaton for the middle part.
    """
    _require(M, "mso")
    sigma = M.input_alphabet
    U = marked_universe(sigma)
    B = _Builder(M)
    jumps = {}

    def jump(q, phi, p):
        """State that performs the jump φ and continues in q."""
        if shortcuts and _simple_move(phi) is not None:
            return None, _simple_move(phi)
        if (q, phi) in jumps:
            return jumps[(q, phi)], 0
        probe = jumps[(q, phi)] = B.state(f"{p}>{q}")
        stay = exists("y", and_(Eq("x", "y"), phi))
        right = exists("y", and_(Path("x", "y", True), phi))
        left = exists("y", and_(Path("y", "x", True), phi))
        s_right = B.state(f"{probe}:R")
        s_left = B.state(f"{probe}:L")
        s2 = B.state(f"{probe}:r?")
        s3 = B.state(f"{probe}:l?")
        # probes, each a chain of look-around tests
        unary(probe, stay, Branch(q, "", 0), Branch(s2, "", 0))
        unary(s2, right, Branch(s_right, "", 0), Branch(s3, "", 0))
        unary(s3, left, Branch(s_left, "", 0), Branch(B.dead(), "", 0))
        pieces = _cached_binary(phi, sigma)
        for direction, s_dir in ((1, s_right), (-1, s_left)):
            mine = [pc for pc in pieces if pc[5] == direction]
            tests, thens = [], []
            for (l, a, m, b, r, _) in mine:
                mid_dfa = m if direction == 1 else m.reverse().determinize().minimize()
                if direction == 1:
                    # at x (symbol a): prefix in l, suffix in m·b·r
                    suffix = m.concat(_letter(U, b)).concat(r).minimize()
                    tests.append(rla_test(l, a, suffix, sigma))
                    arrive = rla_test(Dfa.universal(U), b, r, sigma)
                else:
                    # y (symbol a) comes first: at x (symbol b) the prefix is in l·a·m
                    prefix = l.concat(_letter(U, a)).concat(m).minimize()
                    tests.append(rla_test(prefix, b, r, sigma))
                    arrive = rla_test(l, a, Dfa.universal(U), sigma)
                w = walker(mid_dfa, arrive, direction, q)
                thens.append(Branch(w, "", direction))
            B.chain(s_dir, tests, thens, Branch(B.dead(), "", 0))
        return probe, 0

    def walker(mid, arrive, direction, q):
        """Walk in ``direction`` reading the middle part with ``mid``; stop
        where ``mid`` accepts and the arrival test holds."""
        live = mid.trim_states()
        names = {}
        todo = [mid.start]
        base = B.state("walk")
        while todo:
            s = todo.pop()
            if s in names:
                continue
            names[s] = base if not names else B.state(f"{base}.{s}")
            todo.extend(t for t in (mid.step(s, a) for a in sigma) if t in live)
        for s, name in names.items():
            reader = name
            if s in mid.accepting:
                reader = B.state(f"{name}.read")
                B.add(name, arrive, Branch(q, "", 0), Branch(reader, "", 0))
            syms = [a for a in sigma if mid.step(s, a) in names]
            B.chain(reader, [trivial_rla_test(a, sigma) for a in syms],
                    [Branch(names[mid.step(s, a)], "", direction) for a in syms],
                    Branch(B.dead(), "", 0))
        return base

    def unary(p, phi, then, else_):
        if phi == TRUE:
            B.add(p, trivial_rla_test(LEFT, sigma), then, then)
            return
        if phi == FALSE:
            B.add(p, rla_never(sigma), else_, else_)
            return
        tests = _rla_tests(_cached_unary(phi, sigma), sigma)
        B.chain(p, tests, [then] * len(tests), else_)

    for ins in M.instructions:
        brs = []
        for br in (ins.then, ins.else_):
            mv = br.move
            if isinstance(mv, MsoMove):
                st, step = jump(br.state, mv.formula, ins.state)
                brs.append(Branch(br.state, br.out, step) if st is None
                           else Branch(st, br.out, 0))
            else:
                brs.append(br)
        t = ins.test
        if isinstance(t, MsoTest):
            unary(ins.state, t.formula, brs[0], brs[1])
        elif isinstance(t, RlaTest):
            B.add(ins.state, t, brs[0], brs[1])
        else:
            B.add(ins.state, trivial_rla_test(t.sym, sigma), brs[0], brs[1])
    return Machine(M.name, "rla", M.input_alphabet, M.output_alphabet, B.states, M.initial,
                   M.final, B.insts)


def _letter(U, a):
    return Dfa.from_function(U, 0, lambda s, b: 1 if (s == 0 and b == a) else None,
                             lambda s: s == 1)


# --------------------------------------------------------------------------
# deterministic gsm → computation-space pipeline


def _tape_symbols(M):
    return (LEFT,) + tuple(M.input_alphabet) + (RIGHT,)


def _prepare(M, normalize):
    if M.kind != "gsm":
        raise ConversionError("the computation-space construction needs a gsm machine")
    if not M.deterministic:
        raise ConversionError("the computation-space construction needs a deterministic machine")
    if normalize:
        M = separate_final_state(normalize_short_output(M))
    if any(len(b.out) > 1 for i in M.instructions for b in (i.then, i.else_)):
        raise ConversionError("branches must write at most one symbol")
    if M.initial == M.final:
        raise ConversionError("initial and final state must differ")
    return M


def computation_space(M, normalize=True):
    """Stage one: ngr(⊢w⊣) ↦ the graph of all configurations and their steps."""
    M = _prepare(M, normalize)
    tape = _tape_symbols(M)
    steps = {}    # (p, q, α, ε) → symbols
    for ins in M.instructions:
        s = ins.test.sym
        b1, b0 = ins.then, ins.else_
        steps.setdefault((ins.state, b1.state, b1.out or EPS, b1.move), set()).add(s)
        steps.setdefault((ins.state, b0.state, b0.out or EPS, b0.move), set()).update(
            t for t in tape if t != s)
    edges = {}
    for (p, q, a, e), syms in steps.items():
        cond = or_(*[Lab(s, "x") for s in tape if s in syms])
        f = and_(_step_formula(e), cond)
        key = (p, q, a)
        edges[key] = or_(edges.get(key, FALSE), f)
    nodes = {}
    for q in M.states:
        init = Lab(LEFT, "x") if q == M.initial else FALSE
        fin = TRUE if q == M.final else FALSE
        nodes[(q, INIT)] = init
        nodes[(q, FIN)] = fin
        nodes[(q, UNLAB)] = and_(not_(init), not_(fin))
    out_edges = tuple(M.output_alphabet) + (EPS,)
    return MsoTransduction(f"space({M.name})", M.states, tape_shape(M.input_alphabet), nodes,
                           edges, (), (tape, (UNLAB,)), ((UNLAB, INIT, FIN), out_edges))


@lru_cache(maxsize=None)
def select_path(sigma2):
    """Stage two: keep the nodes on the path from the init node to a fin node."""
    sigma2 = tuple(sigma2)
    labels = sigma2 + (EPS,)
    dom = exists("x", exists("y", and_(Lab(INIT, "x"), Lab(FIN, "y"), Path("x", "y"))))
    keep = exists("y", exists("z", and_(Lab(INIT, "y"), Path("y", "x"),
                                        Lab(FIN, "z"), Path("x", "z"))))
    edges = {("1", "1", a): Edge(a, "x", "y") for a in labels}
    return MsoTransduction("select-path", ["1"], dom, {("1", UNLAB): keep}, edges, (),
                           ((UNLAB, INIT, FIN), labels), ((UNLAB,), labels))


@lru_cache(maxsize=None)
def contract_eps(sigma2):
    """Stage three: drop nodes with an outgoing ε-edge, contracting ε-paths to their end."""
    sigma2 = tuple(sigma2)
    keep = not_(exists("y", Edge(EPS, "x", "y")))
    edges = {("1", "1", a): exists("z", and_(Edge(a, "x", "z"), Path("z", "y", False, EPS)))
             for a in sigma2}
    return MsoTransduction("contract-eps", ["1"], TRUE, {("1", UNLAB): keep}, edges, (),
                           ((UNLAB,), sigma2 + (EPS,)), ((UNLAB,), sigma2), (None, "egr"))


def dgsm_to_mso_pipeline(M, normalize=True):
    """Three-stage pipeline mapping ngr(⊢w⊣) to egr(M(w))."""
    M = _prepare(M, normalize)
    t1 = computation_space(M, normalize=False)
    return Pipeline([t1, select_path(M.output_alphabet), contract_eps(M.output_alphabet)],
                    f"space-pipeline({M.name})")


def dgsm_to_msoe(M):
    """Pipeline mapping egr(w) to egr(M(w)): ``gr_id_inv`` followed by the above."""
    P = dgsm_to_mso_pipeline(M)
    return Pipeline([gr_id_inv(M.input_alphabet)] + P.stages, f"egr({M.name})")


# --------------------------------------------------------------------------
# MSO transduction → deterministic formula machine


def mso_to_dgsm_mso(tau, sigma=None, output_alphabet=None):
    """Machine with formula tests and jumps following the edges of a
    deterministic transduction from tapes ngr(⊢w⊣) to edge strings."""
    if tau.params:
        raise ConversionError("the machine construction needs a parameter-free transduction")
    for (c, s) in tau.node_formulas:
        if s != UNLAB:
            raise ConversionError("output nodes of an edge string are unlabelled")
    if sigma is None:
        if tau.input_labels is None:
            raise ConversionError("input alphabet unknown; pass sigma")
        sigma = tuple(s for s in tau.input_labels[0] if s not in (LEFT, RIGHT))
    sigma = tuple(sigma)
    if output_alphabet is None:
        output_alphabet = tuple(dict.fromkeys(s for (_, _, s) in tau.edge_formulas))
    dom = tau.domain
    star = {c: tau.node_formulas.get((c, UNLAB), FALSE) for c in tau.copies}

    def at(f, v):
        return rename(f, {"x": v}) if v != "x" else f

    psi = {}
    for (c1, c2, s), f in tau.edge_formulas.items():
        psi[(c1, c2, s)] = and_(f, star[c1], at(star[c2], "y"), dom)
    taken = set()
    states = []

    def new(base):
        st = fresh_state(base, taken)
        states.append(st)
        return st

    q_in = new("start")
    copy_state = {c: new(f"c{c}") for c in tau.copies}
    q_f = new("final")
    dead = None
    insts = []

    # initial search for the first output node, copy by copy
    first_tests = []
    for c2 in tau.copies:
        z = fresh("z", {"x", "y"})
        inco = exists(z, or_(*[rename(p, {"x": z}) for (a, b, _), p in psi.items() if b == c2]))
        target = and_(dom, at(star[c2], "y"), not_(inco))
        first_tests.append((c2, target))
    cur = q_in
    for j, (c2, target) in enumerate(first_tests):
        if j == len(first_tests) - 1:
            if dead is None:
                dead = new("dead")
            nxt = Branch(dead, "", MsoMove(Eq("x", "y")))
        else:
            nxt = Branch(new(f"start/{j + 1}"), "", MsoMove(Eq("x", "y")))
        insts.append(Instruction(cur, MsoTest(exists("y", target)),
                                 Branch(copy_state[c2], "", MsoMove(target)), nxt))
        cur = nxt.state

    # from copy c1, try each outgoing edge formula in turn; none → accept
    for c1 in tau.copies:
        alts = [(c2, s, p) for (a, c2, s), p in psi.items() if a == c1]
        cur = copy_state[c1]
        if not alts:
            b = Branch(q_f, "", MsoMove(Eq("x", "y")))
            insts.append(Instruction(cur, MsoTest(TRUE), b, b))
            continue
        for j, (c2, s, p) in enumerate(alts):
            if j == len(alts) - 1:
                nxt = Branch(q_f, "", MsoMove(Eq("x", "y")))
            else:
                nxt = Branch(new(f"c{c1}/{j + 1}"), "", MsoMove(Eq("x", "y")))
            insts.append(Instruction(cur, MsoTest(exists("y", p)),
                                     Branch(copy_state[c2], s, MsoMove(p)), nxt))
            cur = nxt.state
    order = [q_in] + [s for s in states if s != q_in]
    return Machine(f"machine({tau.name})", "mso", sigma, output_alphabet, order, q_in, q_f, insts)


def msoe_to_dgsm(tau, sigma=None, output_alphabet=None):
    """Machine for a deterministic transduction between edge strings: pull the
    formulas back through ``gr_id`` and build the formula machine."""
    if isinstance(tau, Pipeline):
        if len(tau.stages) != 1:
            raise ConversionError("a multi-stage pipeline needs symbolic composition, which "
                                  "is not provided; convert a single transduction")
        tau = tau.stages[0]
    if sigma is None:
        if tau.input_labels is None:
            raise ConversionError("input alphabet unknown; pass sigma")
        sigma = tuple(tau.input_labels[1])
    return mso_to_dgsm_mso(pullback_through_gr_id(tau, sigma), sigma, output_alphabet)
