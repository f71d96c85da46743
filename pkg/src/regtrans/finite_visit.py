"""Visiting sequences, tracks and the finite-visit decomposition.

A track lists, for every tape cell, the consecutive visits a computation
pays to it.  Valid tracks of k-visiting computations form a regular
language; ``track_automaton`` builds it over crossing interfaces, and
``decompose_finite_visit`` splits a finite-visit machine into a marked
relabelling that guesses a track and a deterministic gsm that checks and
replays it.
"""

from collections import deque
from dataclasses import dataclass
from itertools import product

from .string_graphs import LEFT, RIGHT
from .two_way_machines import (Computation, Machine, MachineError, SymTest, computations,
                               enumerate_nondeterministic, to_eight_tuple)

STAR = "*"


class TrackError(ValueError):
    pass


# --------------------------------------------------------------------------
# visits and tracks


@dataclass(frozen=True)
class Visit:
    before: object          # -1, 0, +1 or STAR
    state: str
    after: object           # -1, 0, +1 or STAR
    out: str = ""
    read: str = None        # Hennie machines: cell content at the visit
    write: str = None       # and after it

    def to_text(self):
        parts = [_dir_text(self.before), self.state, _dir_text(self.after), self.out]
        if self.read is not None:
            parts.append(f"{self.read}>{self.write}")
        return "(" + ",".join(parts) + ")"


def _dir_text(d):
    return STAR if d == STAR else {1: "+1", 0: "0", -1: "-1"}[d]


def _dir_parse(s):
    s = s.strip()
    if s == STAR:
        return STAR
    try:
        d = int(s)
    except ValueError:
        raise TrackError(f"bad direction {s!r}") from None
    if d not in (-1, 0, 1):
        raise TrackError(f"bad direction {s!r}")
    return d


@dataclass(frozen=True)
class VisitingSequence:
    symbol: str
    visits: tuple

    def to_text(self):
        return " ".join(v.to_text() for v in self.visits)

    def left_crossings(self):
        """Crossings of the left border in time order: ('in', visit) / ('out', visit)."""
        r = []
        for v in self.visits:
            if v.before == 1:
                r.append(("in", v))
            if v.after == -1:
                r.append(("out", v))
        return r

    def right_crossings(self):
        r = []
        for v in self.visits:
            if v.before == -1:
                r.append(("in", v))
            if v.after == 1:
                r.append(("out", v))
        return r


class Track(tuple):
    """Tuple of VisitingSequence, one per cell of ⊢w⊣."""

    @property
    def word(self):
        return "".join(s.symbol for s in self[1:-1])

    def to_text(self):
        return "\n".join(f"pos {i} {s.symbol} : {s.to_text()}".rstrip()
                         for i, s in enumerate(self))


def parse_track(text):
    seqs = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, body = line.partition(":")
        h = head.split()
        if len(h) != 3 or h[0] != "pos":
            raise TrackError(f"line {n}: expected 'pos <i> <symbol> :'")
        if int(h[1]) != len(seqs):
            raise TrackError(f"line {n}: positions must be consecutive from 0")
        visits = []
        body = body.strip()
        while body:
            if not body.startswith("(") or ")" not in body:
                raise TrackError(f"line {n}: malformed visit near {body!r}")
            inner, body = body[1:body.index(")")], body[body.index(")") + 1:].strip()
            f = inner.split(",")
            if len(f) not in (4, 5):
                raise TrackError(f"line {n}: a visit has 4 fields (5 for Hennie machines)")
            read = write = None
            if len(f) == 5:
                read, _, write = f[4].partition(">")
            visits.append(Visit(_dir_parse(f[0]), f[1].strip(), _dir_parse(f[2]), f[3].strip(),
                                read, write))
        seqs.append(VisitingSequence(h[2], tuple(visits)))
    return Track(seqs)


def extract_track(c: Computation, M=None):
    """Visiting sequences of an accepting computation."""
    if M is not None and c.configs[-1][0] != M.final:
        raise TrackError("computation does not end in the final state")
    tape = LEFT + c.word + RIGHT
    per = [[] for _ in tape]
    last = len(c.configs) - 1
    for j, (state, pos) in enumerate(c.configs):
        before = STAR if j == 0 else c.configs[j][1] - c.configs[j - 1][1]
        if j == last:
            after, out = STAR, ""
        else:
            after, out = c.configs[j + 1][1] - pos, c.branches[j].out
        read = write = None
        if c.tapes is not None:
            read = c.tapes[j][pos]
            write = c.tapes[j + 1][pos] if j < last else read
        per[pos].append(Visit(before, state, after, out, read, write))
    return Track(VisitingSequence(tape[i], tuple(v)) for i, v in enumerate(per))


# --------------------------------------------------------------------------
# local constraints


def _branches(M, state, sym):
    """Applicable branches for a state reading sym (gsm and Hennie machines)."""
    out = []
    for ins in M.by_state.get(state, ()):
        if not isinstance(ins.test, SymTest):
            raise MachineError("tracks are defined for gsm and Hennie machines")
        out.append(ins.then if ins.test.sym == sym else ins.else_)
    return out


def _written(M, br, read):
    if M.kind == "hennie" and br.write is not None and read not in (LEFT, RIGHT):
        return br.write
    return read


def _groups(M, state, read, symbol):
    """(move, out, written) ↦ set of target states, moves that stay on the tape."""
    g = {}
    for br in _branches(M, state, read):
        if (symbol == LEFT and br.move == -1) or (symbol == RIGHT and br.move == 1):
            continue
        key = (br.move, br.out, _written(M, br, read))
        g.setdefault(key, set()).add(br.state)
    return g


def _read(M, v, symbol):
    return v.read if M.kind == "hennie" else symbol


def sequence_problems(seq, M, k, position=None):
    """Violations of the single-sequence constraints."""
    probs = []
    vs = seq.visits
    hennie = M.kind == "hennie"
    if len(vs) > k:
        probs.append(f"{len(vs)} visits exceed the bound {k}")
    if position == 0 and seq.symbol != LEFT:
        probs.append("the first cell must hold ⊢")
    cur = seq.symbol
    for i, v in enumerate(vs):
        if hennie:
            if v.read != cur:
                probs.append(f"visit {i} reads {v.read!r}, cell holds {cur!r}")
            cur = v.write
        elif v.read is not None:
            probs.append("read/write fields belong to Hennie machines")
        if i == 0:
            want = STAR if seq.symbol == LEFT else 1
            if v.before != want:
                probs.append(f"first visit must have before={_dir_text(want)}")
        else:
            prev = vs[i - 1]
            if prev.after == STAR:
                probs.append("visits after the final visit")
            elif v.before != -prev.after:
                probs.append(f"visit {i}: directions do not alternate")
        if v.before == STAR and (i != 0 or v.state != M.initial or seq.symbol != LEFT):
            probs.append("a ⋆-start visit must be the first visit of ⊢ in the initial state")
        if v.state == M.final:
            if v.after != STAR or i != len(vs) - 1:
                probs.append("a visit in the final state must be the last, with after=⋆")
            if v.out:
                probs.append("the final visit writes nothing")
            continue
        if v.after == STAR:
            probs.append("only the final state ends a computation")
            continue
        g = _groups(M, v.state, _read(M, v, seq.symbol), seq.symbol)
        key = (v.after, v.out, v.write if hennie else _read(M, v, seq.symbol))
        if key not in g:
            probs.append(f"visit {i}: no instruction of {v.state} on {_read(M, v, seq.symbol)} "
                         f"moves {_dir_text(v.after)} writing {v.out!r}")
            continue
        if v.after == 0:
            if i == len(vs) - 1:
                probs.append("a stay move must be followed by another visit")
            elif vs[i + 1].state not in g[key]:
                probs.append(f"visit {i}: stay move cannot reach state {vs[i + 1].state}")
            elif vs[i + 1].state == v.state and _silent(v, hennie):
                probs.append(f"visit {i}: silent self-loop")
    return probs


def _silent(v, hennie):
    """A stay visit that writes nothing and leaves the cell unchanged; the
    simulator never takes such a step back into the same state."""
    return v.after == 0 and not v.out and (not hennie or v.write == v.read)


def _targets(M, seq, v):
    g = _groups(M, v.state, _read(M, v, seq.symbol), seq.symbol)
    hennie = M.kind == "hennie"
    return g.get((v.after, v.out, v.write if hennie else _read(M, v, seq.symbol)), set())


def track_problems(t, M, k):
    """All violated constraints; empty when t is a track of a k-visiting computation."""
    probs = []
    t = Track(t)
    if len(t) < 2:
        return ["a track covers at least ⊢ and ⊣"]
    if t[0].symbol != LEFT or t[-1].symbol != RIGHT:
        probs.append("the track must start with ⊢ and end with ⊣")
    for i, s in enumerate(t[1:-1], 1):
        if s.symbol not in M.input_alphabet:
            probs.append(f"pos {i}: symbol {s.symbol!r} outside the input alphabet")
    if probs:
        return probs
    for i, s in enumerate(t):
        probs += [f"pos {i}: {p}" for p in sequence_problems(s, M, k, i)]
    starts = sum(1 for s in t for v in s.visits if v.before == STAR)
    ends = sum(1 for s in t for v in s.visits if v.after == STAR)
    if starts != 1:
        probs.append(f"{starts} ⋆-start visits, expected exactly one")
    if ends != 1:
        probs.append(f"{ends} ⋆-final visits, expected exactly one")
    for i in range(len(t) - 1):
        rc, lc = t[i].right_crossings(), t[i + 1].left_crossings()
        if len(rc) != len(lc):
            probs.append(f"border {i}|{i + 1}: {len(rc)} crossings on the left, {len(lc)} on the right")
            continue
        for (d1, v1), (d2, v2) in zip(rc, lc):
            if d1 == d2:
                probs.append(f"border {i}|{i + 1}: crossing directions disagree")
            elif d1 == "out" and v2.state not in _targets(M, t[i], v1):
                probs.append(f"border {i}|{i + 1}: {v1.state} cannot move right into {v2.state}")
            elif d2 == "out" and v1.state not in _targets(M, t[i + 1], v2):
                probs.append(f"border {i}|{i + 1}: {v2.state} cannot move left into {v1.state}")
    if not probs:
        probs += _replay_problems(t, M)
    return probs


def _replay_problems(t, M):
    """Follow the visits from the ⋆-start visit; every visit must be used once."""
    ptr = [0] * len(t)
    pos, j = 0, 0
    ptr[0] = 1
    guard = sum(len(s.visits) for s in t) + 1
    while guard:
        guard -= 1
        v = t[pos].visits[j]
        if v.after == STAR:
            break
        np = pos + v.after
        if ptr[np] >= len(t[np].visits):
            return [f"replay runs out of visits at pos {np}"]
        j = ptr[np]
        ptr[np] += 1
        pos = np
    if any(ptr[i] != len(s.visits) for i, s in enumerate(t)):
        return ["visits not reached by the computation"]
    return []


def validate_track(t, M, k):
    return not track_problems(t, M, k)


def replay_output(t):
    """Output of the computation a valid track describes."""
    ptr = [0] * len(t)
    pos, j, out = 0, 0, []
    ptr[0] = 1
    while True:
        v = t[pos].visits[j]
        out.append(v.out)
        if v.after == STAR:
            return "".join(out)
        pos += v.after
        j = ptr[pos]
        ptr[pos] += 1


# --------------------------------------------------------------------------
# the track language


class TrackAutomaton:
    """Deterministic automaton over visiting sequences accepting the k-tracks.

    A state records, in time order, the crossings of the border right of
    the cells read so far: ('R', targets) for a move to the right, with the
    states it may enter, and ('L', q) for a move to the left entering q.
    It also records whether the final visit has been seen and whether ⊣
    has been read.
    """

    START = ("start",)

    def __init__(self, M, k):
        if k < 1:
            raise ValueError("visit bound must be at least 1")
        if M.kind not in ("gsm", "hennie"):
            raise MachineError("tracks are defined for gsm and Hennie machines")
        self.M = M
        self.k = k
        self._seqs = {}
        # only these states can be entered by a move to the left
        self.left_entries = sorted({b.state for i in M.instructions for b in (i.then, i.else_)
                                    if b.move == -1})

    # single steps ------------------------------------------------------

    def step(self, state, seq):
        """Successor state, or None when seq cannot follow."""
        M, k = self.M, self.k
        if state == self.START:
            if seq.symbol != LEFT:
                return None
            iface, fin = (), False
        else:
            iface, fin, ended = state
            if ended or seq.symbol == LEFT:
                return None
            if seq.symbol != RIGHT and seq.symbol not in M.input_alphabet:
                return None
        if sequence_problems(seq, M, k):
            return None
        lc = seq.left_crossings()
        if len(lc) != len(iface):
            return None
        for (kind, info), (d, v) in zip(iface, lc):
            if kind == "R":
                if d != "in" or v.state not in info:
                    return None
            elif d != "out" or info not in _targets(M, seq, v):
                return None
        nfin = fin + sum(1 for v in seq.visits if v.after == STAR)
        if nfin > 1:
            return None
        new = tuple(("L", v.state) if d == "in" else ("R", frozenset(_targets(M, seq, v)))
                    for d, v in seq.right_crossings())
        ended = seq.symbol == RIGHT
        if ended and new:
            return None
        return (new, bool(nfin), ended)

    def accepting(self, state):
        return state != self.START and state[1] and state[2] and not state[0]

    def accepts(self, track):
        s = self.START
        for seq in track:
            s = self.step(s, seq)
            if s is None:
                return False
        return self.accepting(s)

    # generating sequences ---------------------------------------------

    def sequences(self, state, symbol):
        """All sequences on ``symbol`` that may follow ``state``."""
        key = (state, symbol)
        if key in self._seqs:
            return self._seqs[key]
        M, k = self.M, self.k
        if state == self.START:
            iface, ok = (), symbol == LEFT
        else:
            iface, _, ended = state
            ok = not ended and symbol != LEFT
        res = []
        if ok:
            self._gen(symbol, iface, res)
        res = [s for s in res if self.step(state, s) is not None]
        self._seqs[key] = res
        return res

    def _gen(self, symbol, iface, res):
        M, k = self.M, self.k
        hennie = M.kind == "hennie"
        states = self.left_entries

        def rec(visits, idx, cell):
            n = len(visits)
            if n:
                last = visits[-1]
                if last.after == STAR:
                    if idx == len(iface):
                        res.append(VisitingSequence(symbol, tuple(visits)))
                    return
                if last.after in (1, -1) and idx == len(iface):
                    res.append(VisitingSequence(symbol, tuple(visits)))
            elif symbol != LEFT and not iface:
                res.append(VisitingSequence(symbol, ()))
            if n >= k:
                return
            # the next visit's direction and candidate states
            if n == 0:
                if symbol == LEFT:
                    cands, before, nidx = [M.initial], STAR, idx
                else:
                    if idx >= len(iface) or iface[idx][0] != "R":
                        return
                    cands, before, nidx = sorted(iface[idx][1]), 1, idx + 1
            else:
                last = visits[-1]
                if last.after == 0:
                    cands, before, nidx = sorted(_stay_targets[-1]), 0, idx
                    if _silent(last, hennie):
                        cands = [q for q in cands if q != last.state]
                elif last.after == -1:
                    if idx >= len(iface) or iface[idx][0] != "R":
                        return
                    cands, before, nidx = sorted(iface[idx][1]), 1, idx + 1
                else:
                    cands, before, nidx = list(states), -1, idx
            for q in cands:
                if q == M.final:
                    v = Visit(before, q, STAR, "", cell if hennie else None,
                              cell if hennie else None)
                    visits.append(v)
                    _stay_targets.append(set())
                    rec(visits, nidx, cell)
                    visits.pop()
                    _stay_targets.pop()
                    continue
                g = _groups(M, q, cell, symbol)
                for (move, out, wr), tg in sorted(g.items(), key=lambda kv: repr(kv[0])):
                    i2 = nidx
                    if move == -1:
                        if i2 >= len(iface) or iface[i2][0] != "L" or iface[i2][1] not in tg:
                            continue
                        i2 += 1
                    v = Visit(before, q, move, out, cell if hennie else None,
                              wr if hennie else None)
                    visits.append(v)
                    _stay_targets.append(tg)
                    rec(visits, i2, wr if hennie else cell)
                    visits.pop()
                    _stay_targets.pop()

        _stay_targets = []
        rec([], 0, symbol)

    # explicit construction ----------------------------------------------

    def build(self, max_len=None):
        """Explore reachable states; returns (states, transitions, accepting).

        Transitions map (state, sequence) to the successor.  Only states
        from which acceptance is reachable are kept.
        """
        M = self.M
        syms = list(M.input_alphabet) + [RIGHT]
        trans = {}
        seen = {self.START: 0}
        todo = deque([self.START])
        while todo:
            s = todo.popleft()
            if max_len is not None and seen[s] > max_len + 1:
                continue
            for a in ([LEFT] if s == self.START else syms):
                for seq in self.sequences(s, a):
                    t = self.step(s, seq)
                    trans[(s, seq)] = t
                    if t not in seen:
                        seen[t] = seen[s] + 1
                        todo.append(t)
        acc = {s for s in seen if self.accepting(s)}
        live = set(acc)
        changed = True
        while changed:
            changed = False
            for (s, _), t in trans.items():
                if t in live and s not in live:
                    live.add(s)
                    changed = True
        trans = {(s, q): t for (s, q), t in trans.items() if s in live and t in live}
        return live, trans, acc & live

    def tracks(self, w):
        """All valid k-tracks for input w (depth-first, pruned by the interface)."""
        tape = LEFT + w + RIGHT
        out = []

        def rec(i, s, acc):
            if i == len(tape):
                if self.accepting(s):
                    out.append(Track(acc))
                return
            for seq in self.sequences(s, tape[i]):
                t = self.step(s, seq)
                acc.append(seq)
                rec(i + 1, t, acc)
                acc.pop()
        rec(0, self.START, [])
        return out


def track_automaton(M, k):
    return TrackAutomaton(M, k)


# --------------------------------------------------------------------------
# marked relabellings and the decomposition


class MarkedRelabelling:
    """A relation between tape symbols (markers included) and output symbols."""

    def __init__(self, pairs):
        self.pairs = frozenset(pairs)
        self.image = {}
        for a, b in sorted(self.pairs):
            self.image.setdefault(a, []).append(b)

    def apply(self, w):
        return mrel_apply(self.pairs, w)


def mrel_apply(R, w):
    """Every cellwise relabelling of ⊢w⊣ under R."""
    image = {}
    for a, b in R:
        image.setdefault(a, set()).add(b)
    choices = [sorted(image.get(a, ())) for a in LEFT + w + RIGHT]
    return {"".join(c) for c in product(*choices)}


_CODE_BASE = 0xE000        # private-use characters name visiting sequences


class Decomposition:
    """A marked relabelling guessing tracks, and a deterministic gsm that
    checks a guessed track and replays the computation it describes."""

    def __init__(self, M, k, relabelling, machine, code, automaton):
        self.M = M
        self.k = k
        self.relabelling = relabelling
        self.machine = machine
        self.code = code                       # character ↦ VisitingSequence
        self.automaton = automaton

    def encode(self, track):
        inv = {s: c for c, s in self.code.items()}
        return "".join(inv[s] for s in track)

    def decode(self, text):
        return Track(self.code[c] for c in text)

    def apply(self, w, prune=True):
        """Outputs of the relabelling followed by the machine on w.

        With ``prune`` only relabellings the machine's checking pass accepts
        are generated (other relabellings produce no output); without it
        every relabelling is tried."""
        from .two_way_machines import run_deterministic
        if prune:
            inv = {s: c for c, s in self.code.items()}
            cands = ("".join(inv[s] for s in t) for t in self.automaton.tracks(w)
                     if all(s in inv for s in t))
        else:
            cands = self.relabelling.apply(w)
        outs = set()
        for u in cands:
            r = run_deterministic(self.machine, u)
            if r is not None:
                outs.add(r)
        return outs


def decompose_finite_visit(M, k):
    """Marked relabelling ∘ deterministic gsm realising the k-visiting
    computations of M."""
    A = track_automaton(M, k)
    live, trans, acc = A.build()
    seqs = sorted({q for (_, q) in trans}, key=lambda s: (s.symbol, s.to_text()))
    code = {chr(_CODE_BASE + i): s for i, s in enumerate(seqs)}
    inv = {s: c for c, s in code.items()}
    R = MarkedRelabelling((s.symbol, inv[s]) for s in seqs)
    alpha = [inv[s] for s in seqs]
    names = {s: f"v{i}" for i, s in enumerate(sorted(live, key=repr))}
    tuples = []
    # checking pass: run the track automaton left to right
    if A.START in live:         # otherwise no track exists and nothing is accepted
        tuples.append(("init", LEFT, names[A.START], "", 1))
    for (s, q), t in trans.items():
        tuples.append((names[s], inv[q], names[t], "", 1))
    for s in acc:
        tuples.append((names[s], RIGHT, "back", "", -1))
    for c in alpha:
        tuples.append(("back", c, "back", "", -1))
    tuples.append(("back", LEFT, "in0", "", 1))
    # replay: 'j<i>' performs visit i of the current cell; 'in<c>' / 'from<c>'
    # enter the cell through its c-th left / right border crossing
    for c in alpha:
        seq = code[c]
        lc = [v for _, v in seq.left_crossings()]
        rc = [v for _, v in seq.right_crossings()]
        vis = list(seq.visits)

        def index_of(v, _vis=vis):
            return next(i for i, u in enumerate(_vis) if u is v)
        for ci, (d, v) in enumerate(seq.left_crossings()):
            if d == "in":
                tuples.append((f"in{ci}", c, f"j{index_of(v)}", "", 0))
        for ci, (d, v) in enumerate(seq.right_crossings()):
            if d == "in":
                tuples.append((f"from{ci}", c, f"j{index_of(v)}", "", 0))
        if seq.symbol == LEFT:       # ⊢ has no left border: replay starts here
            tuples.append(("in0", c, "j0", "", 0))
        for i, v in enumerate(vis):
            if v.after == STAR:
                tuples.append((f"j{i}", c, "accept", v.out, 0))
            elif v.after == 0:
                tuples.append((f"j{i}", c, f"j{i + 1}", v.out, 0))
            elif v.after == 1:
                n = [j for j, (d, u) in enumerate(seq.right_crossings()) if u is v and d == "out"][0]
                tuples.append((f"j{i}", c, f"in{n}", v.out, 1))
            else:
                n = [j for j, (d, u) in enumerate(seq.left_crossings()) if u is v and d == "out"][0]
                tuples.append((f"j{i}", c, f"from{n}", v.out, -1))
    tuples = _dedupe(tuples)
    outs = sorted({ch for v in (u for s in seqs for u in s.visits) for ch in v.out}
                  | set(M.output_alphabet))
    states = ["init"] + sorted({t[0] for t in tuples} | {t[2] for t in tuples} - {"init"})
    if "accept" not in states:
        states.append("accept")
    D = to_eight_tuple(tuples, True, f"replay({M.name})", alpha, outs, "init", "accept", states)
    return Decomposition(M, k, R, D, code, A), R, D


def _dedupe(tuples):
    seen = {}
    for t in tuples:
        key = (t[0], t[1])
        if key in seen and seen[key] != t:
            raise AssertionError(f"replay machine is not deterministic at {key}")
        seen[key] = t
    return list(seen.values())


# --------------------------------------------------------------------------
# Hennie machines


def run_hennie(H, w, k=None):
    """Outputs of H's accepting computations visiting no cell more than k times."""
    if H.kind != "hennie":
        raise MachineError("run_hennie needs a Hennie machine")
    k = k if k is not None else H.visits
    if k is None:
        raise MachineError("Hennie machine without a visit bound")
    return enumerate_nondeterministic(H, w, k)


def hennie_tracks(H, w, k=None):
    k = k if k is not None else H.visits
    return [extract_track(c, H) for c in computations(H, w, k)]


# --------------------------------------------------------------------------
# output loops


def detect_output_loop(M, w):
    """True when some accepting computation on w can repeat a configuration
    after writing output, so that w has infinitely many outputs."""
    if M.kind != "gsm":
        raise MachineError("detect_output_loop needs a gsm machine")
    tape = LEFT + w + RIGHT
    n2 = len(tape)
    succ = {}
    start = (M.initial, 0)
    todo = [start]
    seen = {start}
    while todo:
        c = todo.pop()
        p, pos = c
        lst = succ[c] = []
        for br in _branches(M, p, tape[pos]):
            np = pos + br.move
            if 0 <= np < n2:
                d = (br.state, np)
                lst.append((d, bool(br.out)))
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
    # configurations from which acceptance is reachable
    back = {c: [] for c in seen}
    for c, lst in succ.items():
        for d, _ in lst:
            back[d].append(c)
    good = {c for c in seen if c[0] == M.final}
    todo = list(good)
    while todo:
        d = todo.pop()
        for c in back[d]:
            if c not in good:
                good.add(c)
                todo.append(c)
    comp = _scc(list(seen), lambda c: [d for d, _ in succ[c]])
    for c, lst in succ.items():
        if c not in good:
            continue
        for d, wrote in lst:
            if wrote and d in good and comp[c] == comp[d]:
                return True
    return False


def _scc(nodes, succ):
    """Tarjan's algorithm, iterative; returns node ↦ component id."""
    index, low, comp = {}, {}, {}
    stack, on = [], set()
    counter = [0]
    cid = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            nxt = next(it, None)
            if nxt is not None:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on.add(nxt)
                    work.append((nxt, iter(succ(nxt))))
                elif nxt in on:
                    low[v] = min(low[v], index[nxt])
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                while True:
                    u = stack.pop()
                    on.discard(u)
                    comp[u] = cid
                    if u == v:
                        break
                cid += 1
    return comp


# --------------------------------------------------------------------------
# output rearrangement when a b is inserted (the five-pass example machine)


SEGMENTS = ("z1", "z2", "z3")


def rearrangement_substitution(i):
    """The substitution on formal segments z1, z2, z3 for i inserted b's."""
    if i < 0:
        raise ValueError("i must be non-negative")
    sub = {z: (z,) for z in SEGMENTS}
    step = {"z1": (), "z2": ("z1",), "z3": ("z2", "z3")}
    for _ in range(i):
        sub = {z: tuple(u for y in sub[z] for u in step[y]) for z in SEGMENTS}
    return sub


def output_segments(comp, border):
    """Split the output of a computation into maximal parts written left of
    the border (cells ≤ border) and right of it, alternating, starting left."""
    parts = [[]]
    side = "L"
    for j, br in enumerate(comp.branches):
        pos = comp.configs[j][1]
        s = "L" if pos <= border else "R"
        if s != side:
            parts.append([])
            side = s
        parts[-1].append(br.out)
    return ["".join(p) for p in parts]


def predict_insertion(comp, border, i):
    """Predicted output after inserting b^i at the border, from a run that
    writes x1 z1 x2 z2 x3 z3 around it."""
    segs = output_segments(comp, border)
    segs += [""] * (6 - len(segs))
    if len(segs) > 6:
        raise ValueError("the run crosses the border more than five times")
    xs = segs[0::2]
    zs = dict(zip(SEGMENTS, segs[1::2]))
    sub = rearrangement_substitution(i)
    return "".join(x + "".join(zs[u] for u in sub[z]) for x, z in zip(xs, SEGMENTS))
