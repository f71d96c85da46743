"""Finite automata over arbitrary hashable letters, plus a small regex syntax.

The Dfa is kept total: a table ``delta[state][letter_index]``.  Operations
return new automata; nothing is mutated after construction.
"""

from collections import deque
from itertools import product as _iproduct

from .string_graphs import LEFT, RIGHT, label_from_text, label_to_text


class AlphabetMismatch(ValueError):
    pass


class Dfa:
    __slots__ = ("alphabet", "index", "delta", "start", "accepting")

    def __init__(self, alphabet, delta, start, accepting):
        self.alphabet = tuple(alphabet)
        self.index = {a: i for i, a in enumerate(self.alphabet)}
        self.delta = tuple(tuple(row) for row in delta)
        n = len(self.delta)
        for row in self.delta:
            if len(row) != len(self.alphabet):
                raise ValueError("transition table is not total")
            for t in row:
                if not 0 <= t < n:
                    raise ValueError("transition leaves the state set")
        if not 0 <= start < n:
            raise ValueError("bad start state")
        self.start = start
        self.accepting = frozenset(accepting)

    @property
    def n_states(self):
        return len(self.delta)

    def __repr__(self):
        return f"Dfa(states={self.n_states}, letters={len(self.alphabet)}, accepting={sorted(self.accepting)})"

    # construction helpers

    @classmethod
    def universal(cls, alphabet):
        return cls(alphabet, [[0] * len(tuple(alphabet))], 0, [0])

    @classmethod
    def empty(cls, alphabet):
        return cls(alphabet, [[0] * len(tuple(alphabet))], 0, [])

    @classmethod
    def epsilon(cls, alphabet):
        k = len(tuple(alphabet))
        return cls(alphabet, [[1] * k, [1] * k], 0, [0])

    @classmethod
    def from_function(cls, alphabet, start, step, accepting):
        """Explore ``step(state, letter)`` from ``start``; ``None`` is a sink."""
        alphabet = tuple(alphabet)
        ids = {start: 0}
        rows = []
        queue = deque([start])
        keys = [start]
        sink = None
        while queue:
            s = queue.popleft()
            row = []
            for a in alphabet:
                t = step(s, a)
                if t is None:
                    if sink is None:
                        sink = object()
                        ids[sink] = len(ids)
                        keys.append(sink)
                    t = sink
                elif t not in ids:
                    ids[t] = len(ids)
                    keys.append(t)
                    queue.append(t)
                row.append(ids[t])
            rows.append((ids[s], row))
        table = [None] * len(ids)
        for i, row in rows:
            table[i] = row
        if sink is not None:
            table[ids[sink]] = [ids[sink]] * len(alphabet)
        acc = [ids[k] for k in keys if k is not sink and accepting(k)]
        return cls(alphabet, table, 0, acc)

    # running

    def step(self, s, a):
        return self.delta[s][self.index[a]]

    def run(self, word, state=None):
        s = self.start if state is None else state
        idx = self.index
        delta = self.delta
        for a in word:
            try:
                s = delta[s][idx[a]]
            except KeyError:
                raise AlphabetMismatch(f"letter {a!r} not in the automaton's alphabet") from None
        return s

    def accepts(self, word):
        return self.run(word) in self.accepting

    __contains__ = accepts

    # boolean structure

    def complement(self):
        return Dfa(self.alphabet, self.delta, self.start,
                   set(range(self.n_states)) - self.accepting)

    def _check_same(self, other):
        if set(self.alphabet) != set(other.alphabet):
            raise AlphabetMismatch("automata over different alphabets")

    def product(self, other, op):
        self._check_same(other)
        ops = {
            "and": lambda p, q: p and q,
            "or": lambda p, q: p or q,
            "diff": lambda p, q: p and not q,
            "xor": lambda p, q: p != q,
        }
        f = ops[op]
        oidx = [other.index[a] for a in self.alphabet]
        ids = {(self.start, other.start): 0}
        rows = []
        queue = deque([(self.start, other.start)])
        while queue:
            p, q = queue.popleft()
            row = []
            dp, dq = self.delta[p], other.delta[q]
            for i in range(len(self.alphabet)):
                t = (dp[i], dq[oidx[i]])
                if t not in ids:
                    ids[t] = len(ids)
                    queue.append(t)
                row.append(ids[t])
            rows.append(row)
        acc = [i for (p, q), i in ids.items()
               if f(p in self.accepting, q in other.accepting)]
        return Dfa(self.alphabet, rows, 0, acc)

    def intersect(self, other):
        return self.product(other, "and")

    def union(self, other):
        return self.product(other, "or")

    def difference(self, other):
        return self.product(other, "diff")

    def reachable(self):
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            s = queue.popleft()
            for t in self.delta[s]:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return seen

    def coreachable(self):
        back = [[] for _ in range(self.n_states)]
        for s, row in enumerate(self.delta):
            for t in row:
                back[t].append(s)
        seen = set(self.accepting)
        queue = deque(seen)
        while queue:
            t = queue.popleft()
            for s in back[t]:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
        return seen

    def is_empty(self):
        return not (self.reachable() & self.accepting)

    def witness(self):
        """Shortest accepted word (ties broken by alphabet order), or None."""
        prev = {self.start: None}
        queue = deque([self.start])
        while queue:
            s = queue.popleft()
            if s in self.accepting:
                word = []
                while prev[s] is not None:
                    s, a = prev[s]
                    word.append(a)
                return tuple(reversed(word))
            for i, t in enumerate(self.delta[s]):
                if t not in prev:
                    prev[t] = (s, self.alphabet[i])
                    queue.append(t)
        return None

    def equivalent(self, other):
        return self.product(other, "xor").is_empty()

    def subset_of(self, other):
        return self.product(other, "diff").is_empty()

    def minimize(self):
        """Moore refinement on the reachable part, states renumbered in BFS order."""
        reach = sorted(self.reachable())
        k = len(self.alphabet)
        block = {s: (1 if s in self.accepting else 0) for s in reach}
        n_blocks = len(set(block.values()))
        while True:
            sig = {}
            new = {}
            for s in reach:
                key = (block[s],) + tuple(block[self.delta[s][i]] for i in range(k))
                if key not in sig:
                    sig[key] = len(sig)
                new[s] = sig[key]
            if len(sig) == n_blocks:
                block = new
                break
            block, n_blocks = new, len(sig)
        # renumber in BFS order from the start block
        rep = {}
        for s in reach:
            rep.setdefault(block[s], s)
        order = {block[self.start]: 0}
        queue = deque([block[self.start]])
        rows = {}
        while queue:
            b = queue.popleft()
            s = rep[b]
            row = []
            for i in range(k):
                tb = block[self.delta[s][i]]
                if tb not in order:
                    order[tb] = len(order)
                    queue.append(tb)
                row.append(order[tb])
            rows[order[b]] = row
        table = [rows[i] for i in range(len(order))]
        acc = [order[block[s]] for s in reach if s in self.accepting]
        return Dfa(self.alphabet, table, 0, acc)

    def trim_states(self):
        """States that are reachable and can still reach acceptance."""
        return self.reachable() & self.coreachable()

    # alphabet manipulation

    def with_accepting(self, accepting):
        return Dfa(self.alphabet, self.delta, self.start, accepting)

    def with_start(self, start):
        return Dfa(self.alphabet, self.delta, start, self.accepting)

    def restrict(self, letters):
        """Same automaton over a subset of letters (words using others are dropped)."""
        letters = [a for a in self.alphabet if a in set(letters)]
        return Dfa(letters, [[row[self.index[a]] for a in letters] for row in self.delta],
                   self.start, self.accepting)

    def rename(self, mapping):
        """Rename letters through an injective map."""
        new = [mapping(a) for a in self.alphabet]
        if len(set(new)) != len(new):
            raise ValueError("letter renaming must be injective")
        return Dfa(new, self.delta, self.start, self.accepting)

    def cylindrify(self, alphabet, proj):
        """Automaton over ``alphabet`` where letter b acts like ``proj(b)``."""
        alphabet = tuple(alphabet)
        cols = [self.index[proj(b)] for b in alphabet]
        return Dfa(alphabet, [[row[c] for c in cols] for row in self.delta],
                   self.start, self.accepting)

    def to_nfa(self):
        trans = {}
        for s, row in enumerate(self.delta):
            for i, t in enumerate(row):
                trans.setdefault((s, self.alphabet[i]), set()).add(t)
        return Nfa(self.alphabet, self.n_states, trans, [self.start], self.accepting)

    def reverse(self):
        return self.to_nfa().reverse()

    def project(self, mapping, alphabet=None):
        return self.to_nfa().project(mapping, alphabet)

    def concat(self, other):
        return self.to_nfa().concat(other.to_nfa()).determinize().minimize()

    def words(self, max_len):
        """Accepted words up to ``max_len`` in length-lexicographic order."""
        for n in range(max_len + 1):
            for w in _iproduct(self.alphabet, repeat=n):
                if self.accepts(w):
                    yield w

    def to_text(self):
        lines = [f"dfa states {self.n_states} initial {self.start}",
                 "accept " + " ".join(str(s) for s in sorted(self.accepting))]
        for s, row in enumerate(self.delta):
            for i, t in enumerate(row):
                lines.append(f"trans {s} {letter_text(self.alphabet[i])} {t}")
        return "\n".join(lines) + "\n"


def letter_text(a):
    if isinstance(a, tuple) and len(a) == 2 and isinstance(a[1], tuple):
        sym, bits = a
        return label_to_text(sym) + "/" + "".join(str(b) for b in bits)
    if isinstance(a, str):
        return label_to_text(a)
    return repr(a)


class Nfa:
    """Nondeterministic automaton with optional epsilon moves (letter ``None``)."""

    def __init__(self, alphabet, n_states, trans, starts, accepting):
        self.alphabet = tuple(alphabet)
        self.n_states = n_states
        self.trans = {k: frozenset(v) for k, v in trans.items()}
        for (s, _), ts in self.trans.items():
            if not 0 <= s < n_states or any(not 0 <= t < n_states for t in ts):
                raise ValueError("transition leaves the state set")
        self.starts = frozenset(starts)
        self.accepting = frozenset(accepting)

    def __repr__(self):
        return f"Nfa(states={self.n_states}, letters={len(self.alphabet)})"

    def closure(self, states):
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in self.trans.get((s, None), ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def accepts(self, word):
        cur = self.closure(self.starts)
        for a in word:
            nxt = set()
            for s in cur:
                nxt |= self.trans.get((s, a), frozenset())
            cur = self.closure(nxt)
        return bool(cur & self.accepting)

    def determinize(self):
        start = self.closure(self.starts)
        out = {}
        for (s, a), ts in self.trans.items():
            if a is not None:
                out.setdefault(s, {}).setdefault(a, set()).update(ts)

        def step(S, a):
            nxt = set()
            for s in S:
                nxt |= out.get(s, {}).get(a, set())
            return self.closure(nxt)

        return Dfa.from_function(self.alphabet, start, step,
                                 lambda S: bool(S & self.accepting))

    def reverse(self):
        trans = {}
        for (s, a), ts in self.trans.items():
            for t in ts:
                trans.setdefault((t, a), set()).add(s)
        return Nfa(self.alphabet, self.n_states, trans, self.accepting, self.starts)

    def project(self, mapping, alphabet=None):
        trans = {}
        for (s, a), ts in self.trans.items():
            b = None if a is None else mapping(a)
            trans.setdefault((s, b), set()).update(ts)
        if alphabet is None:
            alphabet = []
            for a in self.alphabet:
                b = mapping(a)
                if b not in alphabet:
                    alphabet.append(b)
        return Nfa(alphabet, self.n_states, trans, self.starts, self.accepting)

    def concat(self, other):
        if set(self.alphabet) != set(other.alphabet):
            raise AlphabetMismatch("automata over different alphabets")
        off = self.n_states
        trans = {k: set(v) for k, v in self.trans.items()}
        for (s, a), ts in other.trans.items():
            trans.setdefault((s + off, a), set()).update(t + off for t in ts)
        for f in self.accepting:
            trans.setdefault((f, None), set()).update(s + off for s in other.starts)
        return Nfa(self.alphabet, self.n_states + other.n_states, trans,
                   self.starts, [f + off for f in other.accepting])


# regular expressions -------------------------------------------------------
#
# literals are single characters (L and R stand for the tape markers),
# juxtaposition is concatenation, then | * + and parentheses.  The two
# extra atoms ``_`` (empty word) and ``%`` (empty language) make every
# regular language writable, which the machine printer relies on.


class RegexError(ValueError):
    pass


def _tokens(text):
    return [c for c in text if not c.isspace()]


def parse_regex(text):
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def alt():
        nonlocal pos
        parts = [cat()]
        while peek() == "|":
            pos += 1
            parts.append(cat())
        return parts[0] if len(parts) == 1 else ("alt", tuple(parts))

    def cat():
        parts = []
        while peek() is not None and peek() not in "|)":
            parts.append(post())
        if not parts:
            return ("eps",)
        return parts[0] if len(parts) == 1 else ("cat", tuple(parts))

    def post():
        nonlocal pos
        r = atom()
        while peek() in ("*", "+"):
            r = ("star", r) if peek() == "*" else ("cat", (r, ("star", r)))
            pos += 1
        return r

    def atom():
        nonlocal pos
        c = peek()
        if c is None:
            raise RegexError("unexpected end of regex")
        pos += 1
        if c == "(":
            r = alt()
            if peek() != ")":
                raise RegexError("missing ')'")
            pos += 1
            return r
        if c in ")|*+":
            raise RegexError(f"unexpected {c!r}")
        if c == "_":
            return ("eps",)
        if c == "%":
            return ("empty",)
        return ("sym", label_from_text(c))

    r = alt()
    if pos != len(toks):
        raise RegexError(f"trailing input in regex {text!r}")
    return r


def _regex_nfa(r, alphabet):
    trans = {}
    count = [0]

    def new():
        count[0] += 1
        return count[0] - 1

    def add(s, a, t):
        trans.setdefault((s, a), set()).add(t)

    def build(r):
        kind = r[0]
        s, f = new(), new()
        if kind == "eps":
            add(s, None, f)
        elif kind == "empty":
            pass
        elif kind == "sym":
            if r[1] not in alphabet:
                raise RegexError(f"regex symbol {r[1]!r} outside the alphabet")
            add(s, r[1], f)
        elif kind == "cat":
            cur = s
            for part in r[1]:
                a, b = build(part)
                add(cur, None, a)
                cur = b
            add(cur, None, f)
        elif kind == "alt":
            for part in r[1]:
                a, b = build(part)
                add(s, None, a)
                add(b, None, f)
        elif kind == "star":
            a, b = build(r[1])
            add(s, None, f)
            add(s, None, a)
            add(b, None, a)
            add(b, None, f)
        return s, f

    s, f = build(r)
    return Nfa(alphabet, count[0], trans, [s], [f])


def regex_to_dfa(text, alphabet):
    alphabet = tuple(alphabet)
    return _regex_nfa(parse_regex(text), alphabet).determinize().minimize()


def dfa_to_regex(dfa):
    """State elimination; the result parses back to the same language."""
    d = dfa.minimize()
    live = d.trim_states()
    if not live:
        return "%"
    states = sorted(live)
    # edges as regex ASTs
    R = {}

    def put(p, q, r):
        R[(p, q)] = _alt(R.get((p, q)), r)

    S, F = "s", "f"
    put(S, d.start, ("eps",))
    for p in states:
        for i, q in enumerate(d.delta[p]):
            if q in live:
                put(p, q, ("sym", d.alphabet[i]))
        if p in d.accepting:
            put(p, F, ("eps",))
    for k in states:
        loop = R.pop((k, k), None)
        ins = [(p, r) for (p, q), r in list(R.items()) if q == k]
        outs = [(q, r) for (p, q), r in list(R.items()) if p == k]
        for (p, _) in ins:
            del R[(p, k)]
        for (q, _) in outs:
            del R[(k, q)]
        mid = ("star", loop) if loop is not None else None
        for p, rin in ins:
            for q, rout in outs:
                put(p, q, _cat(rin, mid, rout))
    r = R.get((S, F))
    return "%" if r is None else _show(r)


def _alt(a, b):
    if a is None:
        return b
    items = []
    for x in (a, b):
        items.extend(x[1] if x[0] == "alt" else (x,))
    uniq = []
    for x in items:
        if x not in uniq:
            uniq.append(x)
    return uniq[0] if len(uniq) == 1 else ("alt", tuple(uniq))


def _cat(*parts):
    items = []
    for x in parts:
        if x is None or x == ("eps",):
            continue
        items.extend(x[1] if x[0] == "cat" else (x,))
    if not items:
        return ("eps",)
    return items[0] if len(items) == 1 else ("cat", tuple(items))


def _show(r, ctx=0):
    # ctx: 0 top/alt, 1 inside cat, 2 under star
    kind = r[0]
    if kind == "eps":
        return "_"
    if kind == "empty":
        return "%"
    if kind == "sym":
        return label_to_text(r[1])
    if kind == "star":
        return _show(r[1], 2) + "*"
    if kind == "cat":
        s = "".join(_show(x, 1) for x in r[1])
        return f"({s})" if ctx >= 2 else s
    if kind == "alt":
        s = "|".join(_show(x, 0) for x in r[1])
        return f"({s})" if ctx >= 1 else s
    raise ValueError(kind)


def marked_universe(sigma):
    """Tape alphabet: the two markers plus the input symbols."""
    return (LEFT,) + tuple(sigma) + (RIGHT,)
