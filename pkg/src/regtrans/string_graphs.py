"""Labelled graphs and the three ways of drawing a string as a graph.

``ngr`` puts the symbols on the nodes, ``egr`` puts them on the edges,
``tape_encode`` is ``ngr`` of the marked string with both end markers.
"""

from collections import deque

LEFT = "⊢"
RIGHT = "⊣"
UNLAB = "*"
MARKERS = (LEFT, RIGHT)

# text rendering of the markers
_TO_TEXT = {LEFT: "L", RIGHT: "R"}
_FROM_TEXT = {"L": LEFT, "R": RIGHT}


def label_to_text(sym):
    return _TO_TEXT.get(sym, sym)


def label_from_text(tok):
    return _FROM_TEXT.get(tok, tok)


def word_to_text(word):
    return "".join(label_to_text(c) for c in word)


class GraphError(ValueError):
    pass


class Alphabet:
    """Ordered set of single-character symbols, markers and ``*`` excluded."""

    def __init__(self, symbols):
        syms = tuple(symbols)
        if not syms:
            raise ValueError("alphabet must be nonempty")
        if len(set(syms)) != len(syms):
            raise ValueError("duplicate symbols in alphabet")
        for s in syms:
            if not isinstance(s, str) or len(s) != 1:
                raise ValueError(f"alphabet symbols are single characters, got {s!r}")
            if s in ("L", "R", UNLAB, LEFT, RIGHT):
                raise ValueError(f"reserved symbol {s!r} cannot be in an alphabet")
        self.symbols = syms

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, s):
        return s in self.symbols

    def __repr__(self):
        return f"Alphabet({''.join(self.symbols)!r})"

    def marked(self):
        return (LEFT,) + self.symbols + (RIGHT,)


class Graph:
    """Finite graph with labelled nodes and labelled edges.

    Equality and hashing go through a canonical renumbering (breadth first
    from the sources), so graphs produced by different constructions compare
    equal when they have the same shape.
    """

    __slots__ = ("nodes", "node_label", "edges", "_succ", "_pred", "_canon")

    def __init__(self, nodes, node_label, edges):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise GraphError("node identifiers must be unique")
        node_set = set(nodes)
        labels = dict(node_label)
        for u in nodes:
            if u not in labels:
                raise GraphError(f"node {u} has no label")
        edges = frozenset(edges)
        for (u, _, v) in edges:
            if u not in node_set or v not in node_set:
                raise GraphError(f"edge ({u},{v}) has an undeclared endpoint")
        self.nodes = nodes
        self.node_label = labels
        self.edges = edges
        self._succ = None
        self._pred = None
        self._canon = None

    def succ(self, u):
        if self._succ is None:
            s = {v: [] for v in self.nodes}
            p = {v: [] for v in self.nodes}
            for (a, lab, b) in sorted(self.edges, key=_edge_key):
                s[a].append((lab, b))
                p[b].append((lab, a))
            self._succ, self._pred = s, p
        return self._succ[u]

    def pred(self, u):
        if self._pred is None:
            self.succ(u)
        return self._pred[u]

    def __len__(self):
        return len(self.nodes)

    def node_labels(self):
        return set(self.node_label.values())

    def edge_labels(self):
        return {lab for (_, lab, _) in self.edges}

    def canonical(self):
        """Hashable normal form: (labels in canonical order, sorted edges)."""
        if self._canon is None:
            order = _canonical_order(self)
            pos = {u: i for i, u in enumerate(order)}
            labs = tuple(self.node_label[u] for u in order)
            eds = tuple(sorted((pos[a], lab, pos[b]) for (a, lab, b) in self.edges))
            self._canon = (labs, eds)
        return self._canon

    def renumbered(self):
        labs, eds = self.canonical()
        return Graph(range(len(labs)), dict(enumerate(labs)), eds)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        labs, eds = self.canonical()
        return f"Graph(nodes={list(labs)}, edges={list(eds)})"

    def to_text(self):
        lines = ["graph"]
        for u in self.nodes:
            lines.append(f"node {u} {label_to_text(self.node_label[u])}")
        for (a, lab, b) in sorted(self.edges, key=_edge_key):
            lines.append(f"edge {a} {label_to_text(lab)} {b}")
        return "\n".join(lines) + "\n"


def _edge_key(e):
    return (repr(e[0]), e[1], repr(e[2]))


def _canonical_order(g):
    # sources first, ties broken by label then by original order
    indeg = {u: 0 for u in g.nodes}
    for (_, _, b) in g.edges:
        indeg[b] += 1
    rank = {u: i for i, u in enumerate(g.nodes)}
    starts = sorted((u for u in g.nodes if indeg[u] == 0),
                    key=lambda u: (g.node_label[u], rank[u]))
    seen = set()
    order = []

    def bfs(root):
        q = deque([root])
        seen.add(root)
        while q:
            u = q.popleft()
            order.append(u)
            outs = sorted(g.succ(u), key=lambda e: (e[0], g.node_label[e[1]], rank[e[1]]))
            for (_, v) in outs:
                if v not in seen:
                    seen.add(v)
                    q.append(v)

    for s in starts:
        if s not in seen:
            bfs(s)
    for u in g.nodes:
        if u not in seen:
            bfs(u)
    return order


def parse_graph(text):
    nodes, labels, edges = [], {}, []
    started = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "graph":
            started = True
            continue
        if not started:
            raise GraphError("graph text must start with 'graph'")
        if parts[0] == "node" and len(parts) == 3:
            u = int(parts[1])
            nodes.append(u)
            labels[u] = label_from_text(parts[2])
        elif parts[0] == "edge" and len(parts) == 4:
            edges.append((int(parts[1]), label_from_text(parts[2]), int(parts[3])))
        else:
            raise GraphError(f"bad graph line: {raw!r}")
    return Graph(nodes, labels, edges)


def _check_word(w, alphabet):
    if alphabet is None:
        return
    for c in w:
        if c not in alphabet:
            raise GraphError(f"symbol {c!r} is not in the alphabet")


def ngr_encode(w, alphabet=None):
    _check_word(w, alphabet)
    n = len(w)
    return Graph(range(n), {i: w[i] for i in range(n)},
                 [(i, UNLAB, i + 1) for i in range(n - 1)])


def egr_encode(w, alphabet=None):
    _check_word(w, alphabet)
    n = len(w)
    return Graph(range(n + 1), {i: UNLAB for i in range(n + 1)},
                 [(i, w[i], i + 1) for i in range(n)])


def tape_encode(w, alphabet=None):
    _check_word(w, alphabet)
    return ngr_encode(LEFT + w + RIGHT)


def _linear_order(g):
    """Nodes of a path-shaped graph from source to sink, or an error."""
    if not g.nodes:
        return []
    outs = {u: [] for u in g.nodes}
    ins = {u: [] for u in g.nodes}
    pairs = set()
    for (a, lab, b) in g.edges:
        if (a, b) in pairs:
            raise GraphError("parallel edges")
        pairs.add((a, b))
        outs[a].append((lab, b))
        ins[b].append((lab, a))
    for u in g.nodes:
        if len(outs[u]) > 1:
            raise GraphError("node with more than one successor")
        if len(ins[u]) > 1:
            raise GraphError("node with more than one predecessor")
    sources = [u for u in g.nodes if not ins[u]]
    if len(sources) != 1:
        raise GraphError("graph is not a single path")
    order = [sources[0]]
    while outs[order[-1]]:
        order.append(outs[order[-1]][0][1])
        if len(order) > len(g.nodes):
            raise GraphError("cycle")
    if len(order) != len(g.nodes):
        raise GraphError("graph is not connected")
    return order


def decode(g, encoding):
    """Inverse of ``ngr_encode``/``egr_encode``; raises GraphError on bad shape."""
    order = _linear_order(g)
    if encoding == "ngr":
        out = []
        for u in order:
            lab = g.node_label[u]
            if lab == UNLAB:
                raise GraphError("unlabelled node in node representation")
            out.append(lab)
        for (_, lab, _) in g.edges:
            if lab != UNLAB:
                raise GraphError("labelled edge in node representation")
        return "".join(out)
    if encoding == "egr":
        if not order:
            raise GraphError("edge representation is never empty")
        for u in order:
            if g.node_label[u] != UNLAB:
                raise GraphError("labelled node in edge representation")
        lab_of = {(a, b): lab for (a, lab, b) in g.edges}
        out = []
        for a, b in zip(order, order[1:]):
            lab = lab_of[(a, b)]
            if lab == UNLAB:
                raise GraphError("unlabelled edge in edge representation")
            out.append(lab)
        return "".join(out)
    if encoding == "tape":
        s = decode(g, "ngr")
        if len(s) < 2 or s[0] != LEFT or s[-1] != RIGHT:
            raise GraphError("not a marked tape")
        return s[1:-1]
    raise ValueError(f"unknown encoding {encoding!r}")


def encode(w, encoding, alphabet=None):
    if encoding == "ngr":
        return ngr_encode(w, alphabet)
    if encoding == "egr":
        return egr_encode(w, alphabet)
    if encoding == "tape":
        return tape_encode(w, alphabet)
    raise ValueError(f"unknown encoding {encoding!r}")


class ValuatedGraph:
    """A graph whose node labels carry a 0/1 flag per variable."""

    def __init__(self, base, variables):
        self.base = base
        self.variables = tuple(sorted(variables))
        for v in self.variables:
            if v[:1].islower():
                hits = [u for u in base.nodes if dict(base.node_label[u][1])[v]]
                if len(hits) != 1:
                    raise GraphError(f"node variable {v} must flag exactly one node")

    def strip(self):
        b = self.base
        return Graph(b.nodes, {u: b.node_label[u][0] for u in b.nodes}, b.edges)

    def assignment(self):
        nu = {}
        for v in self.variables:
            flagged = [u for u in self.base.nodes if dict(self.base.node_label[u][1])[v]]
            nu[v] = flagged[0] if v[:1].islower() else frozenset(flagged)
        return nu


def valuate(g, nu):
    """Relabel each node σ to (σ, flags) following the assignment ``nu``."""
    node_set = set(g.nodes)
    for v, val in nu.items():
        vals = [val] if v[:1].islower() else list(val)
        for u in vals:
            if u not in node_set:
                raise GraphError(f"variable {v} assigned to unknown node {u}")
    names = sorted(nu)
    labels = {}
    for u in g.nodes:
        flags = []
        for v in names:
            val = nu[v]
            hit = (val == u) if v[:1].islower() else (u in val)
            flags.append((v, int(hit)))
        labels[u] = (g.node_label[u], tuple(flags))
    return ValuatedGraph(Graph(g.nodes, labels, g.edges), names)


def all_words(alphabet, max_len, min_len=0):
    """Every word up to ``max_len`` in length-then-lexicographic order."""
    from itertools import product
    syms = tuple(alphabet)
    for n in range(min_len, max_len + 1):
        for t in product(syms, repeat=n):
            yield "".join(t)
