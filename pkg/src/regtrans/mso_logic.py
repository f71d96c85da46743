"""Monadic second-order logic on graphs.

Formulas are small immutable trees.  Two evaluators are provided: a direct
one that works on any ``Graph`` (set quantifiers enumerate subsets) and a
compiler that turns a formula into a Dfa reading valuated strings.

Variables whose name starts with a lowercase letter range over nodes,
uppercase names range over node sets.
"""

from dataclasses import dataclass
from itertools import count, product

from .automata import Dfa, AlphabetMismatch
from .string_graphs import (Graph, LEFT, RIGHT, UNLAB, ValuatedGraph,
                            label_from_text, label_to_text, ngr_encode)

MAX_SET_NODES = 14


class FormulaError(ValueError):
    pass


class EvalError(ValueError):
    pass


def is_set_var(v):
    return v[:1].isupper()


# --------------------------------------------------------------------------
# syntax


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return and_(self, other)

    def __or__(self, other):
        return or_(self, other)

    def __invert__(self):
        return not_(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Lab(Formula):
    sym: str
    x: str


@dataclass(frozen=True)
class Edge(Formula):
    sym: str
    x: str
    y: str


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class In(Formula):
    x: str
    X: str


@dataclass(frozen=True)
class Not(Formula):
    f: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Imp(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Path(Formula):
    """Directed path from x to y; ``strict`` adds x≠y, ``label`` restricts
    the edges used (None means any edge)."""
    x: str
    y: str
    strict: bool = False
    label: object = None


TRUE = Const(True)
FALSE = Const(False)


def and_(*fs):
    out = []
    for f in fs:
        if isinstance(f, And):
            out.extend(f.args)
        elif f == TRUE:
            continue
        elif f == FALSE:
            return FALSE
        else:
            out.append(f)
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def or_(*fs):
    out = []
    for f in fs:
        if isinstance(f, Or):
            out.extend(f.args)
        elif f == FALSE:
            continue
        elif f == TRUE:
            return TRUE
        else:
            out.append(f)
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def not_(f):
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.f
    return Not(f)


def imp(a, b):
    if a == TRUE:
        return b
    if a == FALSE or b == TRUE:
        return TRUE
    return Imp(a, b)


def exists(v, body):
    if isinstance(body, Const) and (is_set_var(v) or body == FALSE):
        return body
    return Exists(v, body)


def forall(v, body):
    if isinstance(body, Const) and (is_set_var(v) or body == TRUE):
        return body
    return Forall(v, body)


def exists_all(vs, body):
    for v in reversed(list(vs)):
        body = exists(v, body)
    return body


def edge_any(x, y, labels):
    return or_(*[Edge(l, x, y) for l in labels])


def path(x, y):
    return Path(x, y)


def path_plus(x, y):
    return Path(x, y, True)


# --------------------------------------------------------------------------
# variables


_FV_CACHE = {}


def free_vars(f):
    key = id(f)
    hit = _FV_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    r = _free_vars(f)
    _FV_CACHE[key] = (f, r)
    return r


def _free_vars(f):
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Lab):
        return frozenset([f.x])
    if isinstance(f, (Edge, Eq, Path)):
        return frozenset([f.x, f.y])
    if isinstance(f, In):
        return frozenset([f.x, f.X])
    if isinstance(f, Not):
        return free_vars(f.f)
    if isinstance(f, (And, Or)):
        r = frozenset()
        for a in f.args:
            r |= free_vars(a)
        return r
    if isinstance(f, Imp):
        return free_vars(f.a) | free_vars(f.b)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f):
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.f)
    if isinstance(f, (And, Or)):
        r = frozenset()
        for a in f.args:
            r |= all_vars(a)
        return r
    if isinstance(f, Imp):
        return all_vars(f.a) | all_vars(f.b)
    return free_vars(f)


def fresh(base, avoid):
    if base not in avoid:
        return base
    for i in count(1):
        v = f"{base}{i}"
        if v not in avoid:
            return v


def rename(f, mapping):
    """Substitute variables for free variables, renaming bound ones to
    avoid capture."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    return _rename(f, mapping)


def _rename(f, m):
    g = m.get
    if isinstance(f, Const):
        return f
    if isinstance(f, Lab):
        return Lab(f.sym, g(f.x, f.x))
    if isinstance(f, Edge):
        return Edge(f.sym, g(f.x, f.x), g(f.y, f.y))
    if isinstance(f, Eq):
        return Eq(g(f.x, f.x), g(f.y, f.y))
    if isinstance(f, In):
        return In(g(f.x, f.x), g(f.X, f.X))
    if isinstance(f, Path):
        return Path(g(f.x, f.x), g(f.y, f.y), f.strict, f.label)
    if isinstance(f, Not):
        return Not(_rename(f.f, m))
    if isinstance(f, And):
        return And(tuple(_rename(a, m) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_rename(a, m) for a in f.args))
    if isinstance(f, Imp):
        return Imp(_rename(f.a, m), _rename(f.b, m))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in m.items() if k != f.var}
        if not inner:
            return f
        var = f.var
        body = f.body
        targets = set(inner.values())
        if var in targets:
            new = fresh(var, targets | all_vars(body) | set(inner))
            inner[var] = new
            var = new
        return type(f)(var, _rename(body, inner))
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# text format


def to_text(f):
    t = label_to_text
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Lab):
        return f"(lab {t(f.sym)} {f.x})"
    if isinstance(f, Edge):
        return f"(edge {t(f.sym)} {f.x} {f.y})"
    if isinstance(f, Eq):
        return f"(= {f.x} {f.y})"
    if isinstance(f, In):
        return f"(in {f.x} {f.X})"
    if isinstance(f, Path):
        op = "path+" if f.strict else "path"
        if f.label is None:
            return f"({op} {f.x} {f.y})"
        return f"(l{op} {t(f.label)} {f.x} {f.y})"
    if isinstance(f, Not):
        return f"(not {to_text(f.f)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Imp):
        return f"(imp {to_text(f.a)} {to_text(f.b)})"
    if isinstance(f, (Exists, Forall)):
        kw = ("ex" if isinstance(f, Exists) else "all") + ("S" if is_set_var(f.var) else "")
        return f"({kw} {f.var} {to_text(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def _sexp_tokens(text):
    out = []
    cur = ""
    for c in text:
        if c in "()":
            if cur:
                out.append(cur)
                cur = ""
            out.append(c)
        elif c.isspace():
            if cur:
                out.append(cur)
                cur = ""
        else:
            cur += c
    if cur:
        out.append(cur)
    return out


def read_sexp(tokens, pos):
    """Read one s-expression starting at ``tokens[pos]``; returns (tree, next)."""
    if pos >= len(tokens):
        raise FormulaError("unexpected end of formula")
    tok = tokens[pos]
    if tok == ")":
        raise FormulaError("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    items = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise FormulaError("missing ')'")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = read_sexp(tokens, pos)
        items.append(item)


def _node_var(v):
    if not isinstance(v, str) or not v[:1].islower() or not v.replace("_", "a").isalnum():
        raise FormulaError(f"expected a node variable, got {v!r}")
    return v


def _set_var(v):
    if not isinstance(v, str) or not v[:1].isupper() or not v.replace("_", "a").isalnum():
        raise FormulaError(f"expected a set variable, got {v!r}")
    return v


def _label(tok):
    if not isinstance(tok, str):
        raise FormulaError(f"expected a label, got {tok!r}")
    return label_from_text(tok)


def from_sexp(t):
    if isinstance(t, str):
        if t == "true":
            return TRUE
        if t == "false":
            return FALSE
        raise FormulaError(f"unexpected atom {t!r}")
    if not t:
        raise FormulaError("empty formula")
    op, args = t[0], t[1:]

    def arity(n):
        if len(args) != n:
            raise FormulaError(f"{op} expects {n} arguments")

    if op == "lab":
        arity(2)
        return Lab(_label(args[0]), _node_var(args[1]))
    if op == "edge":
        arity(3)
        return Edge(_label(args[0]), _node_var(args[1]), _node_var(args[2]))
    if op == "=":
        arity(2)
        return Eq(_node_var(args[0]), _node_var(args[1]))
    if op == "in":
        arity(2)
        return In(_node_var(args[0]), _set_var(args[1]))
    if op == "not":
        arity(1)
        return Not(from_sexp(args[0]))
    if op in ("and", "or"):
        if not args:
            return TRUE if op == "and" else FALSE
        subs = tuple(from_sexp(a) for a in args)
        if len(subs) == 1:
            return subs[0]
        return And(subs) if op == "and" else Or(subs)
    if op == "imp":
        arity(2)
        return Imp(from_sexp(args[0]), from_sexp(args[1]))
    if op in ("ex", "all"):
        arity(2)
        cls = Exists if op == "ex" else Forall
        return cls(_node_var(args[0]), from_sexp(args[1]))
    if op in ("exS", "allS"):
        arity(2)
        cls = Exists if op == "exS" else Forall
        return cls(_set_var(args[0]), from_sexp(args[1]))
    if op in ("path", "path+"):
        arity(2)
        return Path(_node_var(args[0]), _node_var(args[1]), op == "path+")
    if op in ("lpath", "lpath+"):
        arity(3)
        return Path(_node_var(args[1]), _node_var(args[2]), op == "lpath+", _label(args[0]))
    raise FormulaError(f"unknown operator {op!r}")


def parse_formula(text):
    toks = _sexp_tokens(text)
    tree, pos = read_sexp(toks, 0)
    if pos != len(toks):
        raise FormulaError("trailing input after formula")
    return from_sexp(tree)


# --------------------------------------------------------------------------
# derived formulas


def expand_derived(f, edge_labels):
    """Replace path atoms by their second-order definition."""
    if isinstance(f, Path):
        labels = list(edge_labels) if f.label is None else [f.label]
        avoid = {f.x, f.y}
        X = fresh("P", avoid)
        z1 = fresh("z", avoid)
        z2 = fresh("w", avoid | {z1})
        closed = forall(z1, forall(z2, imp(and_(In(z1, X), edge_any(z1, z2, labels)), In(z2, X))))
        p = forall(X, imp(and_(In(f.x, X), closed), In(f.y, X)))
        return and_(p, not_(Eq(f.x, f.y))) if f.strict else p
    if isinstance(f, Not):
        return not_(expand_derived(f.f, edge_labels))
    if isinstance(f, And):
        return and_(*[expand_derived(a, edge_labels) for a in f.args])
    if isinstance(f, Or):
        return or_(*[expand_derived(a, edge_labels) for a in f.args])
    if isinstance(f, Imp):
        return Imp(expand_derived(f.a, edge_labels), expand_derived(f.b, edge_labels))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, expand_derived(f.body, edge_labels))
    return f


def has_set_quantifier(f):
    if isinstance(f, (Exists, Forall)):
        return is_set_var(f.var) or has_set_quantifier(f.body)
    if isinstance(f, Not):
        return has_set_quantifier(f.f)
    if isinstance(f, (And, Or)):
        return any(has_set_quantifier(a) for a in f.args)
    if isinstance(f, Imp):
        return has_set_quantifier(f.a) or has_set_quantifier(f.b)
    return False


def string_shape(edge_labels=(UNLAB,)):
    """The guarded formula singling out (possibly empty) path-shaped graphs."""
    e = lambda a, b: edge_any(a, b, edge_labels)
    nonempty = exists("x", TRUE)
    initial = exists("x", forall("y", and_(Path("x", "y"), not_(Path("y", "x", True)))))
    final = exists("x", forall("y", and_(Path("y", "x"), not_(Path("x", "y", True)))))
    functional = forall("x", forall("y1", forall("y2", imp(and_(e("x", "y1"), e("x", "y2")), Eq("y1", "y2")))))
    return and_(imp(nonempty, initial), imp(nonempty, final), functional)


def first_node(x, edge_labels=(UNLAB,)):
    z = fresh("z", {x})
    return not_(exists(z, edge_any(z, x, edge_labels)))


def last_node(x, edge_labels=(UNLAB,)):
    z = fresh("z", {x})
    return not_(exists(z, edge_any(x, z, edge_labels)))


def tape_shape(sigma):
    """ngr of some ⊢w⊣ with w over ``sigma``."""
    u = "u"
    inner = forall(u, and_(
        or_(*[Lab(s, u) for s in (LEFT,) + tuple(sigma) + (RIGHT,)]),
        imp(Lab(LEFT, u), first_node(u)),
        imp(first_node(u), Lab(LEFT, u)),
        imp(Lab(RIGHT, u), last_node(u)),
        imp(last_node(u), Lab(RIGHT, u)),
    ))
    return and_(string_shape(), exists(u, TRUE), inner)


def egr_shape(sigma):
    """egr of some w over ``sigma``: a nonempty edge-labelled path."""
    labels = tuple(sigma)
    e = lambda a, b: edge_any(a, b, labels)
    one_label = forall("x", forall("y", and_(*[
        not_(and_(Edge(a, "x", "y"), Edge(b, "x", "y")))
        for i, a in enumerate(labels) for b in labels[i + 1:]])))
    no_loop = forall("x", not_(e("x", "x")))
    unlabelled = forall("x", Lab(UNLAB, "x"))
    return and_(exists("x", TRUE), string_shape(labels), no_loop, one_label, unlabelled)


def next_sym(a, x="x", y="y"):
    """y is the first a-position strictly after x."""
    z = fresh("z", {x, y})
    return and_(Path(x, y, True), Lab(a, y),
                forall(z, imp(and_(Path(x, z, True), Path(z, y, True)), not_(Lab(a, z)))))


def first_of_block(a, x="x", y="y"):
    """y is the first position of the maximal a-block ending at x."""
    z = fresh("z", {x, y})
    return and_(Path(y, x),
                forall(z, imp(and_(Path(y, z), Path(z, x)), Lab(a, z))),
                not_(exists(z, and_(Edge(UNLAB, z, y), Lab(a, z)))))


# --------------------------------------------------------------------------
# naive evaluation


class Structure:
    """A graph prepared for repeated formula evaluation (results memoised)."""

    def __init__(self, graph):
        self.graph = graph
        self.nodes = list(graph.nodes)
        self.lab = graph.node_label
        self.edges = graph.edges
        self.memo = {}
        self._reach = {}
        self._subsets = None

    def reach(self, label):
        r = self._reach.get(label)
        if r is None:
            succ = {u: [] for u in self.nodes}
            for (a, l, b) in self.edges:
                if label is None or l == label:
                    succ[a].append(b)
            r = {}
            for u in self.nodes:
                seen = {u}
                stack = [u]
                while stack:
                    v = stack.pop()
                    for w in succ[v]:
                        if w not in seen:
                            seen.add(w)
                            stack.append(w)
                r[u] = frozenset(seen)
            self._reach[label] = r
        return r

    def subsets(self):
        if self._subsets is None:
            if len(self.nodes) > MAX_SET_NODES:
                raise EvalError(f"set quantification over {len(self.nodes)} nodes "
                                f"exceeds the limit of {MAX_SET_NODES}")
            nodes = self.nodes
            subs = []
            for mask in range(1 << len(nodes)):
                subs.append(frozenset(nodes[i] for i in range(len(nodes)) if mask >> i & 1))
            self._subsets = subs
        return self._subsets

    def holds(self, f, env=None):
        env = dict(env or {})
        missing = free_vars(f) - set(env)
        if missing:
            raise EvalError(f"unbound variables: {sorted(missing)}")
        return _closure(f)(self, env)


_CLOSURES = {}
_uid = count()


def _closure(f):
    key = id(f)
    hit = _CLOSURES.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    fn = _build(f)
    _CLOSURES[key] = (f, fn)
    return fn


def _build(f):
    if isinstance(f, Const):
        v = f.value
        return lambda S, e: v
    if isinstance(f, Lab):
        sym, x = f.sym, f.x
        return lambda S, e: S.lab[e[x]] == sym
    if isinstance(f, Edge):
        sym, x, y = f.sym, f.x, f.y
        return lambda S, e: (e[x], sym, e[y]) in S.edges
    if isinstance(f, Eq):
        x, y = f.x, f.y
        return lambda S, e: e[x] == e[y]
    if isinstance(f, In):
        x, X = f.x, f.X
        return lambda S, e: e[x] in e[X]
    if isinstance(f, Path):
        x, y, strict, label = f.x, f.y, f.strict, f.label
        if strict:
            return lambda S, e: e[x] != e[y] and e[y] in S.reach(label)[e[x]]
        return lambda S, e: e[y] in S.reach(label)[e[x]]
    if isinstance(f, Not):
        g = _closure(f.f)
        return lambda S, e: not g(S, e)
    if isinstance(f, And):
        gs = [_closure(a) for a in f.args]

        def conj(S, e):
            for g in gs:
                if not g(S, e):
                    return False
            return True
        return conj
    if isinstance(f, Or):
        gs = [_closure(a) for a in f.args]

        def disj(S, e):
            for g in gs:
                if g(S, e):
                    return True
            return False
        return disj
    if isinstance(f, Imp):
        a, b = _closure(f.a), _closure(f.b)
        return lambda S, e: (not a(S, e)) or b(S, e)
    if isinstance(f, (Exists, Forall)):
        body = _closure(f.body)
        var = f.var
        fv = tuple(sorted(free_vars(f)))
        uid = next(_uid)
        want = isinstance(f, Exists)
        set_var = is_set_var(var)

        def quant(S, e):
            key = (uid,) + tuple(e[v] for v in fv)
            r = S.memo.get(key)
            if r is not None:
                return r
            old = e.get(var, _MISSING)
            r = not want
            dom = S.subsets() if set_var else S.nodes
            for u in dom:
                e[var] = u
                if body(S, e) == want:
                    r = want
                    break
            if old is _MISSING:
                e.pop(var, None)
            else:
                e[var] = old
            S.memo[key] = r
            return r
        return quant
    raise TypeError(f"not a formula: {f!r}")


_MISSING = object()


def evaluate(g, phi, nu=None):
    """Truth of ``phi`` in a graph (or ValuatedGraph) under assignment ``nu``."""
    if isinstance(g, ValuatedGraph):
        nu = dict(g.assignment(), **(nu or {}))
        g = g.strip()
    return Structure(g).holds(phi, nu or {})


# --------------------------------------------------------------------------
# compilation to automata


EGR_END = "$"


def _letters(tokens, n):
    return [(t, bits) for t in tokens for bits in product((0, 1), repeat=n)]


class _Compiler:
    def __init__(self, tokens, encoding, edge_labels):
        self.tokens = tuple(tokens)
        self.encoding = encoding
        self.edge_labels = tuple(edge_labels)
        self._letters = {}
        self._wf = {}
        self.cache = {}

    def letters(self, n):
        r = self._letters.get(n)
        if r is None:
            r = self._letters[n] = _letters(self.tokens, n)
        return r

    def wf(self, vs):
        """Well-formed valuations: every node variable flags exactly one position."""
        r = self._wf.get(vs)
        if r is None:
            idx = [i for i, v in enumerate(vs) if not is_set_var(v)]

            def step(s, a):
                bits = a[1]
                s = list(s)
                for j, i in enumerate(idx):
                    if bits[i]:
                        if s[j]:
                            return None
                        s[j] = 1
                return tuple(s)
            r = Dfa.from_function(self.letters(len(vs)), tuple(0 for _ in idx), step,
                                  lambda s: all(s)).minimize()
            self._wf[vs] = r
        return r

    def lift(self, d, vs, us):
        if vs == us:
            return d
        pos = [us.index(v) for v in vs]
        return d.cylindrify(self.letters(len(us)),
                            lambda a: (a[0], tuple(a[1][i] for i in pos)))

    def compile(self, f):
        hit = self.cache.get(f)
        if hit is None:
            hit = self.cache[f] = self._compile(f)
        return hit

    def _compile(self, f):
        if isinstance(f, Const):
            return (Dfa.universal(self.letters(0)) if f.value else Dfa.empty(self.letters(0))), ()
        if isinstance(f, (Lab, Edge, Eq, In, Path)):
            return self.atom(f)
        if isinstance(f, Not):
            d, vs = self.compile(f.f)
            return d.complement().intersect(self.wf(vs)).minimize(), vs
        if isinstance(f, (And, Or)):
            parts = [self.compile(a) for a in f.args]
            return self.combine(parts, "and" if isinstance(f, And) else "or")
        if isinstance(f, Imp):
            return self.compile(or_(not_(f.a), f.b))
        if isinstance(f, Forall):
            return self.compile(Not(Exists(f.var, not_(f.body))))
        if isinstance(f, Exists):
            d, vs = self.compile(f.body)
            if f.var not in vs:
                if is_set_var(f.var):
                    return d, vs
                ne = Dfa.from_function(self.letters(len(vs)), 0, lambda s, a: 1,
                                       lambda s: s == 1)
                return d.intersect(ne).minimize(), vs
            i = vs.index(f.var)
            us = vs[:i] + vs[i + 1:]
            p = d.project(lambda a: (a[0], a[1][:i] + a[1][i + 1:]), self.letters(len(us)))
            return p.determinize().minimize(), us
        raise TypeError(f"not a formula: {f!r}")

    def combine(self, parts, op):
        us = tuple(sorted(set().union(*[set(vs) for _, vs in parts])))
        acc = None
        for d, vs in parts:
            d = self.lift(d, vs, us)
            acc = d if acc is None else acc.product(d, op).minimize()
        return acc.intersect(self.wf(us)).minimize(), us

    # atoms

    def _check_label(self, sym, edge):
        ok = set(self.tokens) | {LEFT, RIGHT, UNLAB}
        if self.encoding == "egr":
            ok.discard(EGR_END)
        if sym not in ok:
            raise FormulaError(f"label {label_to_text(sym)!r} outside the alphabet")

    def atom(self, f):
        ngr = self.encoding == "ngr"
        if isinstance(f, Lab):
            self._check_label(f.sym, False)
            vs = (f.x,)
            if ngr:
                if f.sym not in self.tokens:
                    return Dfa.empty(self.letters(1)), vs
                return self.one_point(vs, lambda t: t == f.sym), vs
            if f.sym == UNLAB:
                return self.wf(vs), vs
            return Dfa.empty(self.letters(1)), vs
        if isinstance(f, In):
            vs = tuple(sorted((f.x, f.X)))
            ix, iX = vs.index(f.x), vs.index(f.X)
            d = self.one_point(vs, lambda t: True, lambda bits: bits[iX] == 1, ix)
            return d, vs
        if isinstance(f, Eq):
            if f.x == f.y:
                return self.wf((f.x,)), (f.x,)
            return self.two_point(f.x, f.y, True, True, False, eq_only=True), \
                tuple(sorted((f.x, f.y)))
        if isinstance(f, Edge):
            self._check_label(f.sym, True)
            vs = tuple(sorted({f.x, f.y}))
            if f.x == f.y:
                return Dfa.empty(self.letters(1)), vs
            if ngr:
                if f.sym != UNLAB:
                    return Dfa.empty(self.letters(2)), vs
                return self.two_point(f.x, f.y, False, True, True), vs
            if f.sym == UNLAB:
                return Dfa.empty(self.letters(2)), vs
            return self.two_point(f.x, f.y, False, True, True, at_x=f.sym), vs
        if isinstance(f, Path):
            vs = tuple(sorted({f.x, f.y}))
            if f.label is not None:
                self._check_label(f.label, True)
            if f.x == f.y:
                return (Dfa.empty(self.letters(1)) if f.strict else self.wf(vs)), vs
            label = f.label
            if ngr:
                if label is not None and label != UNLAB:
                    # no edges carry this label: only the trivial path
                    if f.strict:
                        return Dfa.empty(self.letters(2)), vs
                    return self.two_point(f.x, f.y, True, False, False, eq_only=True), vs
                label = None
            elif label == UNLAB:
                if f.strict:
                    return Dfa.empty(self.letters(2)), vs
                return self.two_point(f.x, f.y, True, False, False, eq_only=True), vs
            return self.two_point(f.x, f.y, not f.strict, True, False,
                                  at_x=label, between=label), vs
        raise TypeError(f)

    def one_point(self, vs, tok_ok, bits_ok=None, i=0):
        def step(s, a):
            t, bits = a
            if bits[i]:
                if s == 1 or not tok_ok(t) or (bits_ok and not bits_ok(bits)):
                    return None
                return 1
            return s
        return Dfa.from_function(self.letters(len(vs)), 0, step, lambda s: s == 1).minimize()

    def two_point(self, x, y, allow_eq, require_lt, adjacent, at_x=None, between=None,
                  eq_only=False):
        """Positions p(x) and p(y): equal (if allowed) or x strictly before y
        (if ``require_lt``); else order free.  Optional adjacency and token
        constraints on the edge segment from x to y."""
        vs = tuple(sorted((x, y)))
        ix, iy = vs.index(x), vs.index(y)

        def step(s, a):
            t, bits = a
            bx, by = bits[ix], bits[iy]
            if s == "done":
                return None if (bx or by) else "done"
            if s == "pre":
                if bx and by:
                    return "done" if allow_eq or eq_only else None
                if eq_only:
                    return None if (bx or by) else "pre"
                if bx:
                    if at_x is not None and t != at_x:
                        return None
                    return ("x", 0)
                if by:
                    if require_lt:
                        return None
                    return ("y", 0)
                return "pre"
            first, k = s
            if bx and by:
                return None
            closing = by if first == "x" else bx
            if closing:
                return "done"
            if bx or by:
                return None
            if adjacent:
                return None
            if between is not None and t != between:
                return None
            return (first, 1)
        return Dfa.from_function(self.letters(2), "pre", step, lambda s: s == "done").minimize()


def compile_formula(phi, alphabet, encoding="ngr", variables=None):
    """Dfa over letters (token, flags) accepting the valuated strings whose
    graph satisfies ``phi``.  Flags follow ``variables`` (default: the free
    variables in lexicographic order).  For egr the word carries one extra
    trailing ``$`` token for the last node."""
    comp = _compiler(alphabet, encoding)
    d, vs = comp.compile(phi)
    want = tuple(sorted(free_vars(phi))) if variables is None else tuple(variables)
    if not set(vs) <= set(want):
        raise FormulaError("variables list misses free variables of the formula")
    us = tuple(sorted(want))
    if us != vs:
        d = comp.lift(d, vs, us).intersect(comp.wf(us)).minimize()
    if want != us:
        pos = [want.index(v) for v in us]
        d = d.cylindrify(comp.letters(len(want)),
                         lambda a: (a[0], tuple(a[1][i] for i in pos)))
    return d


_COMPILERS = {}


def _compiler(alphabet, encoding):
    if encoding not in ("ngr", "egr"):
        raise ValueError(f"unknown encoding {encoding!r}")
    key = (tuple(alphabet), encoding)
    c = _COMPILERS.get(key)
    if c is None:
        if encoding == "ngr":
            c = _Compiler(tuple(alphabet), "ngr", (UNLAB,))
        else:
            c = _Compiler(tuple(alphabet) + (EGR_END,), "egr", tuple(alphabet))
        _COMPILERS[key] = c
    return c


def compile_with_vars(phi, alphabet, encoding="ngr"):
    return _compiler(alphabet, encoding).compile(phi)


def valuated_word(w, nu, variables, encoding="ngr"):
    """Letters for ``w`` with assignment ``nu`` (node variables map to positions)."""
    toks = list(w) + ([EGR_END] if encoding == "egr" else [])
    out = []
    for i, t in enumerate(toks):
        bits = []
        for v in variables:
            val = nu[v]
            bits.append(int(i in val) if is_set_var(v) else int(i == val))
        out.append((t, tuple(bits)))
    return out


def compiled_holds(d, w, nu, variables, encoding="ngr"):
    return d.accepts(valuated_word(w, nu, variables, encoding))


def language_dfa(phi, alphabet, encoding="ngr"):
    """Closed formula → Dfa over the plain symbols."""
    if free_vars(phi):
        raise FormulaError("formula is not closed")
    d = compile_formula(phi, alphabet, encoding, ())
    plain = d.rename(lambda a: a[0])
    if encoding == "egr":
        # words end with the marker token; strip it
        end = plain.index[EGR_END]
        syms = tuple(alphabet)
        keep = [plain.index[s] for s in syms]
        acc = {s for s in range(plain.n_states) if plain.delta[s][end] in plain.accepting}
        plain = Dfa(syms, [[row[i] for i in keep] for row in plain.delta], plain.start, acc)
    return plain.minimize()


def tape_language(sigma):
    """Dfa over the tape alphabet accepting exactly ⊢Σ*⊣."""
    toks = (LEFT,) + tuple(sigma) + (RIGHT,)

    def step(s, a):
        if s == 0:
            return 1 if a == LEFT else None
        if s == 1:
            if a == RIGHT:
                return 2
            return 1 if a in sigma else None
        return None
    return Dfa.from_function(toks, 0, step, lambda s: s == 2).minimize()


def marked_tape_language(sigma, variables):
    """Valuated tape strings (letters over the tape alphabet with flags)."""
    comp = _compiler((LEFT,) + tuple(sigma) + (RIGHT,), "ngr")
    t = tape_language(sigma)
    t = t.cylindrify(comp.letters(len(variables)), lambda a: a[0])
    return t.intersect(comp.wf(tuple(variables))).minimize()


# --------------------------------------------------------------------------
# functionality of move formulas


def _move_vars(phi, x="x", y="y"):
    fv = free_vars(phi)
    if not fv <= {x, y}:
        raise FormulaError(f"move formula has free variables {sorted(fv)}, expected ⊆ {{{x},{y}}}")


def functionality_counterexample(phi, sigma, x="x", y="y"):
    """Shortest tape word on which some position has two φ-successors, or None."""
    _move_vars(phi, x, y)
    avoid = all_vars(phi) | {x, y}
    y1 = fresh("ya", avoid)
    y2 = fresh("yb", avoid | {y1})
    bad = exists(x, exists(y1, exists(y2, and_(rename(phi, {y: y1}), rename(phi, {y: y2}),
                                                 not_(Eq(y1, y2))))))
    toks = (LEFT,) + tuple(sigma) + (RIGHT,)
    d = language_dfa(bad, toks)
    d = d.intersect(tape_language(sigma))
    w = d.witness()
    return None if w is None else "".join(w)


def check_functional(phi, sigma, x="x", y="y"):
    return functionality_counterexample(phi, sigma, x, y) is None


def brute_force_functional(phi, sigma, max_len, x="x", y="y"):
    from .string_graphs import all_words
    for w in all_words(sigma, max_len):
        g = ngr_encode(LEFT + w + RIGHT)
        S = Structure(g)
        for u in g.nodes:
            hits = sum(1 for v in g.nodes if S.holds(phi, {x: u, y: v}))
            if hits > 1:
                return False
    return True


# --------------------------------------------------------------------------
# look-around


def relativize(phi, side, x):
    """Restrict every quantifier of the closed formula ``phi`` to the
    positions strictly left (or right) of ``x``."""
    if side not in ("left", "right"):
        raise ValueError("side is 'left' or 'right'")
    if x in all_vars(phi):
        phi = _rename_bound(phi, x, all_vars(phi) | {x})
    avoid = set(all_vars(phi)) | {x}

    def guard(v):
        return Path(v, x, True) if side == "left" else Path(x, v, True)

    def go(f):
        if isinstance(f, Not):
            return not_(go(f.f))
        if isinstance(f, And):
            return and_(*[go(a) for a in f.args])
        if isinstance(f, Or):
            return or_(*[go(a) for a in f.args])
        if isinstance(f, Imp):
            return imp(go(f.a), go(f.b))
        if isinstance(f, (Exists, Forall)):
            body = go(f.body)
            if is_set_var(f.var):
                z = fresh("z", avoid)
                g = forall(z, imp(In(z, f.var), guard(z)))
            else:
                g = guard(f.var)
            if isinstance(f, Exists):
                return exists(f.var, and_(g, body))
            return forall(f.var, imp(g, body))
        return f
    return go(phi)


def _rename_bound(f, x, avoid):
    if isinstance(f, (Exists, Forall)):
        if f.var == x:
            new = fresh(x + "_", avoid)
            return type(f)(new, _rename_bound(rename(f.body, {x: new}), x, avoid | {new}))
        return type(f)(f.var, _rename_bound(f.body, x, avoid))
    if isinstance(f, Not):
        return Not(_rename_bound(f.f, x, avoid))
    if isinstance(f, And):
        return And(tuple(_rename_bound(a, x, avoid) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_rename_bound(a, x, avoid) for a in f.args))
    if isinstance(f, Imp):
        return Imp(_rename_bound(f.a, x, avoid), _rename_bound(f.b, x, avoid))
    return f


def dfa_formula(dfa):
    """Closed formula over node-labelled strings defining L(dfa).

    One existential set per live state records the state reached after
    reading each position.
    """
    d = dfa.minimize()
    live = sorted(d.trim_states())
    eps = d.start in d.accepting
    empty_case = not_(exists("z", TRUE)) if eps else FALSE
    # states reachable by a nonempty word that can still accept
    after = set()
    for s in live:
        for t in d.delta[s]:
            if t in live:
                after.add(t)
    after = sorted(after)
    if not after:
        return empty_case
    names = {s: f"Q{i}" for i, s in enumerate(after)}
    z, z1, z2 = "z", "u", "v"
    part = forall(z, or_(*[and_(In(z, names[s]), *[not_(In(z, names[t])) for t in after if t != s])
                           for s in after]))
    first = forall(z, imp(first_node(z), or_(*[
        and_(Lab(a, z), In(z, names[d.delta[d.start][i]]))
        for i, a in enumerate(d.alphabet) if d.delta[d.start][i] in names])))
    step = forall(z1, forall(z2, imp(Edge(UNLAB, z1, z2), or_(*[
        and_(In(z1, names[s]), Lab(a, z2), In(z2, names[d.delta[s][i]]))
        for s in after for i, a in enumerate(d.alphabet) if d.delta[s][i] in names]))))
    last = forall(z, imp(last_node(z), or_(*[In(z, names[s]) for s in after if s in d.accepting])))
    body = exists_all([names[s] for s in after], and_(part, first, step, last))
    return or_(empty_case, and_(exists(z, TRUE), body))


# --------------------------------------------------------------------------
# splitting languages with a single marked occurrence


def single_occurrence_dfa(alphabet, delta):
    delta = set(delta)

    def step(s, a):
        if a in delta:
            return 1 if s == 0 else None
        return s
    return Dfa.from_function(alphabet, 0, step, lambda s: s == 1).minimize()


def split_single_occurrence(A, delta):
    """Triples (left, a, right) with L(A) the disjoint union of left·a·right."""
    delta = [a for a in A.alphabet if a in set(delta)]
    if not A.subset_of(single_occurrence_dfa(A.alphabet, delta)):
        w = A.difference(single_occurrence_dfa(A.alphabet, delta)).witness()
        raise ValueError(f"accepted word {w!r} does not have exactly one marked letter")
    rest = [a for a in A.alphabet if a not in set(delta)]
    M = A.minimize()
    useful = M.trim_states()
    out = []
    for p in sorted(useful):
        for a in delta:
            q = M.step(p, a)
            if q in useful:
                left = M.with_accepting({p}).restrict(rest).minimize()
                right = M.with_start(q).restrict(rest).minimize()
                out.append((left, a, right))
    return out


def union_of_pieces(pieces, alphabet):
    """Dfa of the union of left·a·right over ``alphabet`` (a superset)."""
    alphabet = tuple(alphabet)
    acc = Dfa.empty(alphabet)
    for left, a, right in pieces:
        l = _widen(left, alphabet)
        r = _widen(right, alphabet)
        mid = single_letter(alphabet, a)
        acc = acc.union(l.concat(mid).concat(r)).minimize()
    return acc


def single_letter(alphabet, a):
    return Dfa.from_function(alphabet, 0, lambda s, b: 1 if (s == 0 and b == a) else None,
                             lambda s: s == 1)


def _widen(d, alphabet):
    """Same language over a larger alphabet."""
    if tuple(d.alphabet) == tuple(alphabet):
        return d
    n = d.n_states
    rows = []
    for row in d.delta:
        rows.append([row[d.index[a]] if a in d.index else n for a in alphabet])
    rows.append([n] * len(alphabet))
    return Dfa(alphabet, rows, d.start, d.accepting)


widen = _widen
