"""MSO definable graph transductions, with set parameters for nondeterminism.

A transduction copies every input node once per copy token, keeps a copy
when exactly one node-label formula holds, and draws edges between kept
copies according to the edge formulas.  Missing formulas are false.
"""

import logging

from .mso_logic import (FALSE, TRUE, Edge, Eq, FormulaError, In, Lab, Path, Structure,
                        and_, edge_any, egr_shape, exists, forall, free_vars, fresh,
                        imp, not_, or_, parse_formula, rename, string_shape,
                        tape_shape, to_text)
from .string_graphs import (LEFT, RIGHT, UNLAB, Graph, GraphError, decode, encode,
                            label_from_text, label_to_text)

log = logging.getLogger(__name__)


class SignatureError(ValueError):
    pass


class MsoTransduction:
    def __init__(self, name, copies, domain=TRUE, node_formulas=None, edge_formulas=None,
                 params=(), input_labels=None, output_labels=None, encoding=None):
        self.name = name
        self.copies = tuple(str(c) for c in copies)
        self.domain = domain
        self.params = tuple(params)
        self.node_formulas = {}
        for (c, sym), f in (node_formulas or {}).items():
            if f != FALSE:
                self.node_formulas[(str(c), sym)] = f
        self.edge_formulas = {}
        for (c1, c2, sym), f in (edge_formulas or {}).items():
            if f != FALSE:
                self.edge_formulas[(str(c1), str(c2), sym)] = f
        # (node labels, edge labels); None means "not declared"
        self.input_labels = _sig(input_labels)
        self.output_labels = _sig(output_labels)
        if self.output_labels is None:
            self.output_labels = (tuple(sorted({s for (_, s) in self.node_formulas})),
                                  tuple(sorted({s for (_, _, s) in self.edge_formulas})))
        # default string encodings used by apply_string and the CLI
        self.encoding = encoding
        self._check()

    def _check(self):
        ps = set(self.params)
        for p in self.params:
            if not p[:1].isupper():
                raise FormulaError(f"parameter {p} must be a set variable")
        if not free_vars(self.domain) <= ps:
            raise FormulaError(f"domain formula of {self.name} has free variables "
                               f"{sorted(free_vars(self.domain) - ps)}")
        for (c, s), f in self.node_formulas.items():
            if c not in self.copies:
                raise FormulaError(f"unknown copy {c}")
            if not free_vars(f) <= ps | {"x"}:
                raise FormulaError(f"node formula ({c},{s}) has free variables {sorted(free_vars(f))}")
        for (c1, c2, s), f in self.edge_formulas.items():
            if c1 not in self.copies or c2 not in self.copies:
                raise FormulaError(f"unknown copy in edge formula ({c1},{c2})")
            if not free_vars(f) <= ps | {"x", "y"}:
                raise FormulaError(f"edge formula ({c1},{c2},{s}) has free variables {sorted(free_vars(f))}")

    @property
    def deterministic(self):
        return not self.params

    def __repr__(self):
        return f"MsoTransduction({self.name!r}, copies={list(self.copies)}, params={list(self.params)})"

    def node_label_formulas(self, c):
        return [(s, f) for (cc, s), f in self.node_formulas.items() if cc == c]

    def to_text(self):
        lines = [f"transduction {self.name}"]
        if self.encoding:
            lines.append(f"encoding {self.encoding[0]} {self.encoding[1]}")
        if self.params:
            lines.append("params " + " ".join(self.params))
        lines.append("copies " + " ".join(self.copies))
        if self.input_labels is not None:
            lines.append("input-labels " + _sig_text(self.input_labels))
        lines.append("output-labels " + _sig_text(self.output_labels))
        lines.append("domain " + to_text(self.domain))
        for (c, s), f in self.node_formulas.items():
            lines.append(f"node {c} {label_to_text(s)} {to_text(f)}")
        for (c1, c2, s), f in self.edge_formulas.items():
            lines.append(f"edge {c1} {c2} {label_to_text(s)} {to_text(f)}")
        return "\n".join(lines) + "\n"


def _sig(s):
    if s is None:
        return None
    nodes, edges = s
    return tuple(nodes), tuple(edges)


def _sig_text(s):
    return " ".join(label_to_text(a) for a in s[0]) + " / " + " ".join(label_to_text(a) for a in s[1])


# --------------------------------------------------------------------------
# evaluation


def param_valuations(structure, params):
    """Canonical enumeration: subsets in node order, parameters in order."""
    if not params:
        yield {}
        return
    subs = structure.subsets()

    def rec(i, acc):
        if i == len(params):
            yield dict(acc)
            return
        for s in subs:
            acc[params[i]] = s
            yield from rec(i + 1, acc)
        del acc[params[i]]
    yield from rec(0, {})


def apply(tau, g):
    """All output graphs of ``tau`` on ``g`` (empty set: not in the domain)."""
    S = Structure(g)
    outs = set()
    for nu in param_valuations(S, tau.params):
        g2 = _apply_one(tau, S, nu)
        if g2 is not None:
            outs.add(g2)
    return outs


def apply_valuation(tau, g, nu):
    """Output for one parameter valuation, or None when the domain fails."""
    return _apply_one(tau, Structure(g), {k: frozenset(v) for k, v in nu.items()})


def _apply_one(tau, S, nu):
    env = dict(nu)
    if not S.holds(tau.domain, env):
        return None
    kept = {}
    order = []
    for u in S.nodes:
        for c in tau.copies:
            env["x"] = u
            hits = [s for s, f in tau.node_label_formulas(c) if S.holds(f, env)]
            if len(hits) == 1:
                kept[(u, c)] = hits[0]
                order.append((u, c))
            elif len(hits) > 1 and log.isEnabledFor(logging.DEBUG):
                log.debug("copy %s of node %s dropped: labels %s all hold", c, u, hits)
    env.pop("x", None)
    ids = {k: i for i, k in enumerate(order)}
    by_copy = {}
    for (u, c) in order:
        by_copy.setdefault(c, []).append(u)
    edges = set()
    for (c1, c2, s), f in tau.edge_formulas.items():
        for u in by_copy.get(c1, ()):
            env["x"] = u
            for v in by_copy.get(c2, ()):
                env["y"] = v
                if S.holds(f, env):
                    edges.add((ids[(u, c1)], s, ids[(v, c2)]))
    return Graph(range(len(order)), {ids[k]: kept[k] for k in order}, edges)


def check_signature(g, sig, what="graph"):
    if sig is None:
        return
    nodes, edges = sig
    bad = g.node_labels() - set(nodes)
    if bad:
        raise SignatureError(f"{what} has node labels {sorted(bad)} outside {list(nodes)}")
    bad = g.edge_labels() - set(edges)
    if bad:
        raise SignatureError(f"{what} has edge labels {sorted(bad)} outside {list(edges)}")


def apply_string(tau, w, in_enc=None, out_enc=None):
    """String-level semantics: encode, apply, decode each output."""
    if in_enc is None or out_enc is None:
        enc = string_encodings(tau)
        in_enc = in_enc or enc[0]
        out_enc = out_enc or enc[1]
    g0 = encode(w, in_enc)
    if not _within(_first_stage(tau).input_labels, g0):
        return set()            # symbols outside the input alphabet: not in the domain
    outs = set()
    for g in apply_any(tau, g0):
        try:
            outs.add(decode(g, out_enc))
        except GraphError as e:
            raise GraphError(f"{getattr(tau, 'name', 'transduction')} produced a non-string "
                             f"output on {w!r}: {e}") from None
    return outs


def _first_stage(t):
    if isinstance(t, Pipeline):
        return _first_stage(t.stages[0])
    if isinstance(t, Alternatives):
        return _first_stage(t.parts[0])
    return t


def _within(sig, g):
    if sig is None:
        return True
    return g.node_labels() <= set(sig[0]) and g.edge_labels() <= set(sig[1])


def string_encodings(tau):
    """(input, output) encodings: declared, or guessed from the label signatures."""
    if isinstance(tau, Pipeline):
        return string_encodings(tau.stages[0])[0], string_encodings(tau.stages[-1])[1]
    if isinstance(tau, Alternatives):
        return string_encodings(tau.parts[0])
    if tau.encoding:
        return tau.encoding
    def guess(sig, default):
        if sig is None:
            return default
        nodes, edges = sig
        if set(nodes) <= {UNLAB} and set(edges) - {UNLAB}:
            return "egr"
        if LEFT in nodes or RIGHT in nodes:
            return "tape"
        return "ngr"
    return guess(tau.input_labels, "ngr"), guess(tau.output_labels, "ngr")


# --------------------------------------------------------------------------
# evaluation-level combinators


class Pipeline:
    """Relational composition of stages, evaluated stage by stage."""

    def __init__(self, stages, name="pipeline"):
        self.stages = []
        for s in stages:
            if isinstance(s, Pipeline):
                self.stages.extend(s.stages)
            else:
                self.stages.append(s)
        self.name = name

    def __repr__(self):
        return f"Pipeline({[getattr(s, 'name', s) for s in self.stages]})"

    @property
    def params(self):
        return tuple(p for s in self.stages for p in getattr(s, "params", ()))

    def to_text(self):
        return f"pipeline {self.name}\n" + "\n".join(s.to_text() for s in self.stages)


def apply_any(t, g):
    if isinstance(t, MsoTransduction):
        return apply(t, g)
    if isinstance(t, Pipeline):
        return pipeline_apply(t, g)
    if isinstance(t, Alternatives):
        return t.apply(g)
    raise TypeError(f"cannot apply {t!r}")


def pipeline_apply(P, g):
    cur = {g}
    for i, stage in enumerate(P.stages):
        nxt = set()
        for h in cur:
            if i > 0:
                check_signature(h, getattr(stage, "input_labels", None),
                                f"output of stage {i} ({getattr(P.stages[i - 1], 'name', '?')})")
            nxt |= apply_any(stage, h)
        cur = nxt
        if not cur:
            break
    return cur


class Alternatives:
    """Union of relations with disjoint domains, evaluated side by side."""

    def __init__(self, parts, name="union"):
        self.parts = list(parts)
        self.name = name

    def apply(self, g):
        outs = set()
        hit = 0
        for p in self.parts:
            r = apply_any(p, g)
            if r:
                hit += 1
            outs |= r
        if hit > 1:
            raise ValueError(f"{self.name}: domains overlap on an input")
        return outs

    def to_text(self):
        raise ValueError("an evaluation-level union has no single text form")


# --------------------------------------------------------------------------
# constructions


def union(t1, t2, name=None):
    """Single transduction for the union of two with disjoint domains."""
    if t1.params != t2.params:
        raise SignatureError("union needs identical parameter lists")
    if t1.input_labels is not None and t2.input_labels is not None and \
            set(map(frozenset, t1.input_labels)) != set(map(frozenset, t2.input_labels)):
        raise SignatureError("union needs identical input signatures")
    copies = [f"1.{c}" for c in t1.copies] + [f"2.{c}" for c in t2.copies]
    nodes, edges = {}, {}
    for i, t in ((1, t1), (2, t2)):
        for (c, s), f in t.node_formulas.items():
            nodes[(f"{i}.{c}", s)] = and_(t.domain, f)
        for (c1, c2, s), f in t.edge_formulas.items():
            edges[(f"{i}.{c1}", f"{i}.{c2}", s)] = and_(t.domain, f)
    out_sig = (tuple(dict.fromkeys(t1.output_labels[0] + t2.output_labels[0])),
               tuple(dict.fromkeys(t1.output_labels[1] + t2.output_labels[1])))
    return MsoTransduction(name or f"{t1.name}+{t2.name}", copies, or_(t1.domain, t2.domain),
                           nodes, edges, t1.params, t1.input_labels, out_sig,
                           t1.encoding or t2.encoding)


def domains_disjoint(t1, t2, alphabet, encoding, max_len=None):
    """Disjointness of the string domains.  Parameter-free domains over ngr/egr
    are decided with automata; otherwise inputs up to ``max_len`` are tried."""
    from .mso_logic import language_dfa
    from .string_graphs import all_words
    if not t1.params and not t2.params and encoding in ("ngr", "egr"):
        d = language_dfa(and_(t1.domain, t2.domain), alphabet, encoding)
        return d.is_empty()
    if max_len is None:
        raise ValueError("bounded check needs max_len")
    for w in all_words(alphabet, max_len):
        if apply(t1, encode(w, encoding)) and apply(t2, encode(w, encoding)):
            return False
    return True


def identity(node_labels, edge_labels, name="identity"):
    nodes = {("1", s): Lab(s, "x") for s in node_labels}
    edges = {("1", "1", s): Edge(s, "x", "y") for s in edge_labels}
    sig = (tuple(node_labels), tuple(edge_labels))
    return MsoTransduction(name, ["1"], TRUE, nodes, edges, (), sig, sig)


def ladder(sigma):
    sigma = tuple(sigma)
    nodes = {("1", UNLAB): TRUE, ("2", UNLAB): TRUE}
    edges = {("1", "1", UNLAB): Edge(UNLAB, "x", "y"),
             ("2", "2", UNLAB): Edge(UNLAB, "y", "x")}
    for s in sigma:
        edges[("1", "2", s)] = and_(Eq("x", "y"), Lab(s, "x"))
    return MsoTransduction("ladder", ["1", "2"], string_shape(), nodes, edges, (),
                           (sigma, (UNLAB,)), ((UNLAB,), (UNLAB,) + sigma))


def ed2nd(sigma):
    sigma = tuple(sigma)
    nodes = {("1", s): exists("y", Edge(s, "x", "y")) for s in sigma}
    edges = {("1", "1", UNLAB): edge_any("x", "y", sigma)}
    return MsoTransduction("ed2nd", ["1"], egr_shape(sigma), nodes, edges, (),
                           ((UNLAB,), sigma), (sigma, (UNLAB,)), ("egr", "ngr"))


def nd2ed(sigma):
    sigma = tuple(sigma)
    nodes = {("1", UNLAB): TRUE, ("2", UNLAB): not_(exists("y", Edge(UNLAB, "x", "y")))}
    edges = {}
    for s in sigma:
        edges[("1", "1", s)] = and_(Edge(UNLAB, "x", "y"), Lab(s, "x"))
        edges[("1", "2", s)] = and_(Eq("x", "y"), Lab(s, "x"))
    dom = and_(string_shape(), exists("x", TRUE), forall("x", or_(*[Lab(s, "x") for s in sigma])))
    return MsoTransduction("nd2ed", ["1", "2"], dom, nodes, edges, (),
                           (sigma, (UNLAB,)), ((UNLAB,), sigma), ("ngr", "egr"))


def gr_id(sigma):
    """ngr(⊢w⊣) ↦ egr(w): drop the ⊢ node, move labels onto outgoing edges."""
    sigma = tuple(sigma)
    nodes = {("1", UNLAB): not_(Lab(LEFT, "x"))}
    edges = {("1", "1", s): and_(Edge(UNLAB, "x", "y"), Lab(s, "x")) for s in sigma}
    return MsoTransduction("gr_id", ["1"], tape_shape(sigma), nodes, edges, (),
                           ((LEFT,) + sigma + (RIGHT,), (UNLAB,)), ((UNLAB,), sigma),
                           ("tape", "egr"))


def mark_egr(sigma):
    """egr(w) ↦ egr(⊢w⊣): one extra node in front, one at the end."""
    sigma = tuple(sigma)
    e = lambda a, b: edge_any(a, b, sigma)
    first = not_(exists("z", e("z", "x")))
    last = not_(exists("z", e("x", "z")))
    nodes = {("1", UNLAB): TRUE, ("0", UNLAB): first, ("2", UNLAB): last}
    edges = {("0", "1", LEFT): and_(Eq("x", "y"), first),
             ("1", "2", RIGHT): and_(Eq("x", "y"), last)}
    for s in sigma:
        edges[("1", "1", s)] = Edge(s, "x", "y")
    return MsoTransduction("mark_egr", ["0", "1", "2"], egr_shape(sigma), nodes, edges, (),
                           ((UNLAB,), sigma), ((UNLAB,), (LEFT,) + sigma + (RIGHT,)),
                           ("egr", "egr"))


def mark_ngr(sigma):
    """ngr(w) ↦ ngr(⊢w⊣) for nonempty w (the empty graph has nothing to copy)."""
    sigma = tuple(sigma)
    first = not_(exists("z", Edge(UNLAB, "z", "x")))
    last = not_(exists("z", Edge(UNLAB, "x", "z")))
    nodes = {("0", LEFT): first, ("2", RIGHT): last}
    for s in sigma:
        nodes[("1", s)] = Lab(s, "x")
    edges = {("0", "1", UNLAB): Eq("x", "y"), ("1", "2", UNLAB): Eq("x", "y"),
             ("1", "1", UNLAB): Edge(UNLAB, "x", "y")}
    dom = and_(string_shape(), exists("x", TRUE), forall("x", or_(*[Lab(s, "x") for s in sigma])))
    return MsoTransduction("mark_ngr", ["0", "1", "2"], dom, nodes, edges, (),
                           (sigma, (UNLAB,)), ((LEFT,) + sigma + (RIGHT,), (UNLAB,)),
                           ("ngr", "tape"))


def mark(sigma, encoding="egr"):
    if encoding == "egr":
        return mark_egr(sigma)
    if encoding == "ngr":
        return mark_ngr(sigma)
    raise ValueError(f"unknown encoding {encoding!r}")


def gr_id_inv(sigma):
    """egr(w) ↦ ngr(⊢w⊣) as egr(w) → egr(⊢w⊣) followed by ed2nd."""
    sigma = tuple(sigma)
    return Pipeline([mark_egr(sigma), ed2nd((LEFT,) + sigma + (RIGHT,))], "gr_id_inv")


def _partition(params, x="x"):
    return forall(x, or_(*[and_(In(x, p), *[not_(In(x, q)) for q in params if q != p])
                           for p in params]))


def _param_names(targets):
    return {t: f"X{i + 1}" for i, t in enumerate(targets)}


def _relation(R):
    pairs = [(a, b) for (a, b) in R]
    if not pairs:
        raise ValueError("relabelling relation must be nonempty")
    src = list(dict.fromkeys(a for a, _ in pairs))
    tgt = list(dict.fromkeys(b for _, b in pairs))
    image = {a: [b for (aa, b) in pairs if aa == a] for a in src}
    return src, tgt, image


def relabelling_to_mso(R):
    """Node relabelling of ngr strings; parameter X_i marks nodes getting the
    i-th target symbol."""
    src, tgt, image = _relation(R)
    names = _param_names(tgt)
    params = [names[t] for t in tgt]
    consistent = forall("x", and_(or_(*[Lab(a, "x") for a in src]), *[
        imp(Lab(a, "x"), or_(*[In("x", names[b]) for b in image[a]])) for a in src]))
    dom = and_(string_shape(), _partition(params), consistent)
    nodes = {("1", t): In("x", names[t]) for t in tgt}
    edges = {("1", "1", UNLAB): Edge(UNLAB, "x", "y")}
    return MsoTransduction("relabel", ["1"], dom, nodes, edges, params,
                           (tuple(src), (UNLAB,)), (tuple(tgt), (UNLAB,)), ("ngr", "ngr"))


def edge_relabelling_to_mso(R):
    """Same for egr strings: the parameter of a node decides the new label of
    its outgoing edge."""
    src, tgt, image = _relation(R)
    names = _param_names(tgt)
    params = [names[t] for t in tgt]
    consistent = forall("x", and_(*[
        imp(exists("y", Edge(a, "x", "y")), or_(*[In("x", names[b]) for b in image[a]]))
        for a in src]))
    dom = and_(egr_shape(src), _partition(params), consistent)
    nodes = {("1", UNLAB): TRUE}
    edges = {("1", "1", t): and_(edge_any("x", "y", src), In("x", names[t])) for t in tgt}
    return MsoTransduction("edge_relabel", ["1"], dom, nodes, edges, params,
                           ((UNLAB,), tuple(src)), ((UNLAB,), tuple(tgt)), ("egr", "egr"))


def relabel_strings(R, w):
    """Direct semantics of a symbol relation applied positionwise."""
    from itertools import product
    _, _, image = _relation(R)
    choices = [image.get(c, []) for c in w]
    return {"".join(t) for t in product(*choices)}


# --------------------------------------------------------------------------
# pulling formulas back through simple encodings


def _map_quantifiers(f, guard, atom):
    """Rebuild ``f`` with node quantifiers guarded and atoms rewritten."""
    from .mso_logic import And, Const, Exists as Ex, Forall, Imp, Not, Or, all_vars, is_set_var
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return not_(_map_quantifiers(f.f, guard, atom))
    if isinstance(f, And):
        return and_(*[_map_quantifiers(a, guard, atom) for a in f.args])
    if isinstance(f, Or):
        return or_(*[_map_quantifiers(a, guard, atom) for a in f.args])
    if isinstance(f, Imp):
        return imp(_map_quantifiers(f.a, guard, atom), _map_quantifiers(f.b, guard, atom))
    if isinstance(f, (Ex, Forall)):
        body = _map_quantifiers(f.body, guard, atom)
        if is_set_var(f.var):
            z = fresh("zq", all_vars(body) | {f.var})
            g = forall(z, imp(In(z, f.var), guard(z)))
        else:
            g = guard(f.var)
        if isinstance(f, Ex):
            return exists(f.var, and_(g, body))
        return forall(f.var, imp(g, body))
    return atom(f)


def pullback_gr_id(phi, sigma):
    """Formula over egr(w) ↦ equivalent formula over ngr(⊢w⊣) (positions 1..n+1
    of the tape play the nodes of egr(w))."""
    sigma = tuple(sigma)

    def atom(f):
        if isinstance(f, Lab):
            return TRUE if f.sym == UNLAB else FALSE
        if isinstance(f, Edge):
            if f.sym == UNLAB or f.sym not in sigma:
                return FALSE
            return and_(Edge(UNLAB, f.x, f.y), Lab(f.sym, f.x))
        if isinstance(f, Path):
            if f.label is None:
                return f
            return and_(Path(f.x, f.y, f.strict, None),
                        _segment_labelled(f.x, f.y, f.label))
        return f
    return _map_quantifiers(phi, lambda v: not_(Lab(LEFT, v)), atom)


def _segment_labelled(x, y, label):
    z = fresh("zs", {x, y})
    return forall(z, imp(and_(Path(x, z), Path(z, y, True)), Lab(label, z)))


def pullback_ed2nd(phi, sigma):
    """Formula over ngr(w) ↦ equivalent formula over egr(w) (every egr node
    with an outgoing edge plays the ngr node of the same position)."""
    sigma = tuple(sigma)

    def has_out(v):
        z = fresh("zo", {v})
        return exists(z, edge_any(v, z, sigma))

    def atom(f):
        if isinstance(f, Lab):
            if f.sym == UNLAB:
                return FALSE
            z = fresh("zl", {f.x})
            return exists(z, Edge(f.sym, f.x, z))
        if isinstance(f, Edge):
            return edge_any(f.x, f.y, sigma) if f.sym == UNLAB else FALSE
        return f
    return _map_quantifiers(phi, has_out, atom)


def pullback_through_gr_id(tau, sigma):
    """A transduction t on egr inputs ↦ gr_id followed by t, as one transduction on
    tape inputs (valid because gr_id keeps one copy per node)."""
    sigma = tuple(sigma)
    keep = not_(Lab(LEFT, "x"))
    keep_y = not_(Lab(LEFT, "y"))
    nodes = {k: and_(keep, pullback_gr_id(f, sigma)) for k, f in tau.node_formulas.items()}
    edges = {k: and_(keep, keep_y, pullback_gr_id(f, sigma)) for k, f in tau.edge_formulas.items()}
    dom = and_(tape_shape(sigma), pullback_gr_id(tau.domain, sigma))
    return MsoTransduction(tau.name + "@tape", tau.copies, dom, nodes, edges, tau.params,
                           ((LEFT,) + sigma + (RIGHT,), (UNLAB,)), tau.output_labels,
                           ("tape", (tau.encoding or ("egr", "egr"))[1]))


# --------------------------------------------------------------------------
# conversions between the node and edge string encodings


def output_empty_formula(tau):
    """Closed formula (params allowed) true iff the output graph has no nodes."""
    keeps = []
    for c in tau.copies:
        fs = [f for (_, f) in tau.node_label_formulas(c)]
        one = or_(*[and_(f, *[not_(g) for g in fs if g is not f]) for f in fs])
        keeps.append(one)
    return not_(exists("x", or_(*keeps)))


def output_edgeless_formula(tau):
    """True iff the output graph has no edges (nodes may exist)."""
    def kept(c, v):
        fs = [rename(f, {"x": v}) for (_, f) in tau.node_label_formulas(c)]
        return or_(*[and_(f, *[not_(g) for g in fs if g is not f]) for f in fs])
    alts = [and_(kept(c1, "x"), kept(c2, "y"), f) for (c1, c2, _), f in tau.edge_formulas.items()]
    return not_(exists("x", exists("y", or_(*alts))))


def ngr_to_egr(tau, sigma_in, sigma_out):
    """egr form of a deterministic ngr-form transduction: the sandwich
    ed2nd, then the transduction, then nd2ed for nonempty outputs plus a one-node transduction
    for inputs whose output is empty."""
    hat = Pipeline([ed2nd(sigma_in), tau, nd2ed(sigma_out)], f"{tau.name}^")
    dom_eps = and_(egr_shape(sigma_in),
                   pullback_ed2nd(and_(tau.domain, output_empty_formula(tau)), sigma_in))
    m_eps = MsoTransduction(f"{tau.name}_eps", ["1"], dom_eps,
                            {("1", UNLAB): not_(exists("y", edge_any("x", "y", sigma_in)))}, {},
                            (), ((UNLAB,), tuple(sigma_in)), ((UNLAB,), tuple(sigma_out)),
                            ("egr", "egr"))
    return Alternatives([hat, m_eps], f"{tau.name}@egr")


def egr_to_ngr(tau, sigma_in, sigma_out, eps_to_eps=False):
    """ngr form of an egr-form transduction whose image of ε is ∅ or {ε}:
    nd2ed, then the transduction, then ed2nd, plus the empty-graph identity when (ε, ε) belongs."""
    hat = Pipeline([nd2ed(sigma_in), tau, ed2nd(sigma_out)], f"{tau.name}^")
    if not eps_to_eps:
        return hat
    empty = MsoTransduction("empty_to_empty", ["1"], not_(exists("x", TRUE)), {}, {}, (),
                            (tuple(sigma_in), (UNLAB,)), (tuple(sigma_out), (UNLAB,)),
                            ("ngr", "ngr"))
    return Alternatives([hat, empty], f"{tau.name}@ngr")


# --------------------------------------------------------------------------
# text format


class ParseError(ValueError):
    pass


def _logical_lines(text):
    """Join lines while parentheses are open; drop comments and blanks."""
    buf, depth = "", 0
    for raw in text.splitlines():
        line = raw.strip()
        if not buf and (not line or line.startswith("#")):
            continue
        buf = (buf + " " + line) if buf else line
        depth = buf.count("(") - buf.count(")")
        if depth <= 0:
            yield buf
            buf = ""
    if buf:
        raise ParseError("unbalanced parentheses at end of input")


def parse_transductions(text):
    """Parse one transduction or a pipeline file."""
    items = []
    pipeline_name = None
    cur = None

    def finish():
        if cur is not None:
            items.append(_build_transduction(cur))

    for line in _logical_lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "pipeline":
            pipeline_name = rest or "pipeline"
            continue
        if head == "transduction":
            finish()
            cur = {"name": rest or "t", "params": [], "copies": None, "domain": TRUE,
                   "nodes": {}, "edges": {}, "in": None, "out": None, "enc": None}
            continue
        if cur is None:
            raise ParseError(f"expected 'transduction' header, got {line!r}")
        try:
            if head == "params":
                cur["params"] = rest.split()
            elif head == "copies":
                cur["copies"] = rest.split()
            elif head == "encoding":
                a, b = rest.split()
                cur["enc"] = (a, b)
            elif head in ("input-labels", "output-labels"):
                cur["in" if head == "input-labels" else "out"] = _parse_sig(rest)
            elif head == "domain":
                cur["domain"] = parse_formula(rest)
            elif head == "node":
                c, lab, ftext = rest.split(None, 2)
                cur["nodes"][(c, label_from_text(lab))] = parse_formula(ftext)
            elif head == "edge":
                c1, c2, lab, ftext = rest.split(None, 3)
                cur["edges"][(c1, c2, label_from_text(lab))] = parse_formula(ftext)
            else:
                raise ParseError(f"unknown line {line!r}")
        except (FormulaError, ValueError) as e:
            raise ParseError(f"{e} (in line {line!r})") from None
    finish()
    if not items:
        raise ParseError("no transduction found")
    if pipeline_name is not None or len(items) > 1:
        return Pipeline(items, pipeline_name or "pipeline")
    return items[0]


def _parse_sig(rest):
    if "/" in rest:
        a, b = rest.split("/", 1)
    else:
        a, b = rest, ""
    return (tuple(label_from_text(t) for t in a.split()),
            tuple(label_from_text(t) for t in b.split()))


def _build_transduction(d):
    if d["copies"] is None:
        raise ParseError(f"transduction {d['name']} has no copies line")
    try:
        return MsoTransduction(d["name"], d["copies"], d["domain"], d["nodes"], d["edges"],
                               d["params"], d["in"], d["out"], d["enc"])
    except FormulaError as e:
        raise ParseError(str(e)) from None
