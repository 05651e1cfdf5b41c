"""Deterministic finite automata with output (Moore machines) over base-k digits.

Words are read most significant digit first and the expansion of 0 is the
empty word, so ``a(0)`` is the output of the initial state.
"""

import os
import re
from collections import deque

from .errors import DfaoError, ParseError

DEFAULT_STATE_BUDGET = 10**6


def state_budget():
    value = os.environ.get("AUTODENS_STATE_BUDGET")
    if value is None:
        return DEFAULT_STATE_BUDGET
    try:
        budget = int(value)
    except ValueError:
        raise DfaoError(f"AUTODENS_STATE_BUDGET is not an integer: {value!r}")
    if budget < 1:
        raise DfaoError("AUTODENS_STATE_BUDGET must be positive")
    return budget


def digits(n, k):
    """Canonical base-k expansion of n, most significant digit first."""
    if n < 0:
        raise ValueError("negative integer has no expansion")
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    out.reverse()
    return out


def padded_digits(n, k, length):
    """Base-k expansion of n left-padded with zeros to the given length."""
    word = digits(n, k)
    if len(word) > length:
        raise ValueError(f"{n} needs more than {length} base-{k} digits")
    return [0] * (length - len(word)) + word


def from_digits(word, k):
    n = 0
    for d in word:
        n = n * k + d
    return n


class Dfao:
    """A complete k-DFAO.

    ``delta`` maps each state to the tuple of its k successors and ``output``
    maps each state to its output symbol. States may be any hashable values;
    the order of ``states`` is the declaration order.
    """

    __slots__ = ("base", "states", "initial", "delta", "output", "_index")

    def __init__(self, base, states, initial, delta, output):
        if not isinstance(base, int) or base < 2:
            raise DfaoError(f"base must be an integer >= 2, got {base!r}")
        states = tuple(states)
        index = {q: i for i, q in enumerate(states)}
        if len(index) != len(states):
            raise DfaoError("duplicate state identifiers")
        if initial not in index:
            raise DfaoError(f"initial state {initial!r} is not declared")
        table = {}
        for q in states:
            succ = tuple(delta[q])
            if len(succ) != base:
                raise DfaoError(f"state {q!r} needs {base} transitions, has {len(succ)}")
            for t in succ:
                if t not in index:
                    raise DfaoError(f"undeclared state {t!r}")
            table[q] = succ
        self.base = base
        self.states = states
        self.initial = initial
        self.delta = table
        self.output = {q: output[q] for q in states}
        self._index = index

    def __repr__(self):
        return f"Dfao(base={self.base}, states={len(self.states)}, initial={self.initial!r})"

    def __len__(self):
        return len(self.states)

    def index(self, q):
        return self._index[q]

    def step(self, q, d):
        return self.delta[q][d]

    def run(self, q, word):
        delta = self.delta
        for d in word:
            q = delta[q][d]
        return q

    def state_of(self, n):
        """State reached from the initial state on the expansion of n."""
        return self.run(self.initial, digits(n, self.base))

    def __call__(self, n):
        return self.output[self.state_of(n)]

    def is_prolongable(self):
        return self.delta[self.initial][0] == self.initial

    def reachable(self, start=None):
        """States reachable from ``start`` (default: initial), in BFS order."""
        start = self.initial if start is None else start
        seen = {start}
        order = [start]
        queue = deque([start])
        while queue:
            q = queue.popleft()
            for t in self.delta[q]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order

    def restrict(self, states, initial=None):
        """Sub-automaton on a successor-closed set of states."""
        keep = set(states)
        initial = self.initial if initial is None else initial
        ordered = [q for q in self.states if q in keep]
        for q in ordered:
            for t in self.delta[q]:
                if t not in keep:
                    raise DfaoError(f"state set is not closed: {q!r} -> {t!r}")
        return Dfao(self.base, ordered, initial,
                    {q: self.delta[q] for q in ordered},
                    {q: self.output[q] for q in ordered})

    def with_initial(self, q):
        return Dfao(self.base, self.states, q, self.delta, self.output)

    def with_output(self, func):
        """Same transition structure, outputs replaced by ``func(state)``."""
        return Dfao(self.base, self.states, self.initial, self.delta,
                    {q: func(q) for q in self.states})

    def pure(self):
        """The automaton whose output is the state itself."""
        return self.with_output(lambda q: q)

    def incidence(self):
        """Incidence matrix m[i][j] = #{digits d : delta(q_j, d) = q_i}."""
        n = len(self.states)
        m = [[0] * n for _ in range(n)]
        for j, q in enumerate(self.states):
            for t in self.delta[q]:
                m[self._index[t]][j] += 1
        return m

    def symbols(self):
        seen = []
        for q in self.states:
            s = self.output[q]
            if s not in seen:
                seen.append(s)
        return seen


def evaluate(a, n):
    return a(n)


# ---------------------------------------------------------------------------
# File format

_TOKEN = re.compile(r"^[^\s#=]+$")


def parse_dfao(text):
    base = None
    states = []
    declared = {}
    initial = None
    outputs = {}
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "base":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError("syntax error: expected 'base <integer>'", lineno)
            base = int(args[0])
            if base < 2:
                raise ParseError("base must be at least 2", lineno)
        elif key == "states":
            if not args:
                raise ParseError("syntax error: empty state list", lineno)
            for s in args:
                if s in declared:
                    raise ParseError(f"duplicate state {s!r}", lineno)
                declared[s] = lineno
                states.append(s)
        elif key == "initial":
            if len(args) != 1:
                raise ParseError("syntax error: expected 'initial <state>'", lineno)
            initial = (args[0], lineno)
        elif key == "output":
            if not args:
                raise ParseError("syntax error: empty output list", lineno)
            for item in args:
                name, sep, sym = item.partition("=")
                if not sep or not name or not sym:
                    raise ParseError(f"syntax error: expected state=symbol, got {item!r}", lineno)
                outputs[name] = (sym, lineno)
        elif key == "delta":
            if len(args) != 3:
                raise ParseError("syntax error: expected 'delta <state> <digit> <state>'", lineno)
            src, dig, dst = args
            if not re.fullmatch(r"\d+", dig):
                raise ParseError(f"syntax error: digit {dig!r} is not a nonnegative integer", lineno)
            d = int(dig)
            if (src, d) in edges:
                raise ParseError(f"duplicate transition ({src},{d})", lineno)
            edges[(src, d)] = (dst, lineno)
        else:
            raise ParseError(f"syntax error: unknown directive {key!r}", lineno)

    if base is None:
        raise ParseError("syntax error: missing 'base' line")
    if not states:
        raise ParseError("syntax error: missing 'states' line")
    if initial is None:
        raise ParseError("syntax error: missing 'initial' line")
    if initial[0] not in declared:
        raise ParseError(f"undeclared state {initial[0]!r}", initial[1])
    for name, (_, lineno) in outputs.items():
        if name not in declared:
            raise ParseError(f"undeclared state {name!r}", lineno)
    for (src, d), (dst, lineno) in edges.items():
        if d >= base:
            raise ParseError(f"digit out of range: {d} is not a base-{base} digit", lineno)
        for s in (src, dst):
            if s not in declared:
                raise ParseError(f"undeclared state {s!r}", lineno)
    delta = {}
    for q in states:
        row = []
        for d in range(base):
            if (q, d) not in edges:
                raise ParseError(f"missing transition ({q},{d})")
            row.append(edges[(q, d)][0])
        delta[q] = row
    for q in states:
        if q not in outputs:
            raise ParseError(f"missing output for state {q!r}")
    return Dfao(base, states, initial[0], delta, {q: outputs[q][0] for q in states})


def load_dfao(path):
    with open(path, encoding="utf-8") as fh:
        return parse_dfao(fh.read())


def symbol_token(sym):
    if isinstance(sym, tuple):
        return "<" + ",".join(symbol_token(s) for s in sym) + ">"
    if isinstance(sym, frozenset):
        return "{" + ",".join(sorted(symbol_token(s) for s in sym)) + "}"
    if isinstance(sym, bool):
        return "1" if sym else "0"
    text = str(sym)
    if not _TOKEN.match(text):
        raise DfaoError(f"output symbol {sym!r} cannot be serialized")
    return text


def _state_names(a):
    names = []
    for q in a.states:
        try:
            names.append(symbol_token(q).replace("<", "(").replace(">", ")"))
        except DfaoError:
            names = None
            break
    if names is None or len(set(names)) != len(names) or any(not _TOKEN.match(n) for n in names):
        names = [f"q{i}" for i in range(len(a.states))]
    return dict(zip(a.states, names))


def serialize_dfao(a):
    name = _state_names(a)
    lines = [f"base {a.base}",
             "states " + " ".join(name[q] for q in a.states),
             f"initial {name[a.initial]}",
             "output " + " ".join(f"{name[q]}={symbol_token(a.output[q])}" for q in a.states)]
    for q in a.states:
        for d, t in enumerate(a.delta[q]):
            lines.append(f"delta {name[q]} {d} {name[t]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Constructions

def minimize(a):
    """Moore partition refinement on the reachable part.

    Blocks are numbered by first occurrence in declaration order and each
    block is represented by its first declared member.
    """
    reach = set(a.reachable())
    states = [q for q in a.states if q in reach]
    block = {}
    labels = {}
    for q in states:
        block[q] = labels.setdefault(a.output[q], len(labels))
    count = len(labels)
    while True:
        sigs = {}
        new = {}
        for q in states:
            sig = (block[q],) + tuple(block[t] for t in a.delta[q])
            new[q] = sigs.setdefault(sig, len(sigs))
        block = new
        if len(sigs) == count:
            break
        count = len(sigs)
    rep = {}
    for q in states:
        rep.setdefault(block[q], q)
    reps = [rep[b] for b in range(count)]
    reps.sort(key=a.index)
    return Dfao(a.base, reps, rep[block[a.initial]],
                {q: [rep[block[t]] for t in a.delta[q]] for q in reps},
                {q: a.output[q] for q in reps})


def product(a, b, combine=None):
    """Product automaton on the pairs reachable from (q0_a, q0_b)."""
    if a.base != b.base:
        raise DfaoError(f"base mismatch: {a.base} vs {b.base}")
    if combine is None:
        combine = lambda x, y: (x, y)  # noqa: E731
    start = (a.initial, b.initial)
    order = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        p, q = pair = queue.popleft()
        row = []
        for d in range(a.base):
            t = (a.delta[p][d], b.delta[q][d])
            row.append(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
        delta[pair] = row
    return Dfao(a.base, order, start, delta,
                {(p, q): combine(a.output[p], b.output[q]) for p, q in order})


def _fresh(name, taken):
    if isinstance(name, str):
        cand = name + "'"
        while cand in taken:
            cand += "'"
        return cand
    cand = ("init", name)
    while cand in taken:
        cand = ("init", cand)
    return cand


def normalize_zero(a):
    """Equivalent automaton whose initial state is fixed by digit 0."""
    if a.is_prolongable():
        return a
    q0 = a.initial
    fresh = _fresh(q0, set(a.states))
    delta = dict(a.delta)
    delta[fresh] = (fresh,) + tuple(a.delta[q0][1:])
    output = dict(a.output)
    output[fresh] = a.output[q0]
    return Dfao(a.base, (fresh,) + a.states, fresh, delta, output)


def power_base(a, exponent):
    """Same sequence read in base k**exponent; requires delta(q0, 0) = q0."""
    if not isinstance(exponent, int) or exponent < 1:
        raise DfaoError(f"power_base exponent must be a positive integer, got {exponent!r}")
    if not a.is_prolongable():
        raise DfaoError("power_base requires delta(q0,0) = q0 (apply normalize_zero first)")
    if exponent == 1:
        return a
    k = a.base
    words = [padded_digits(e, k, exponent) for e in range(k**exponent)]
    delta = {q: [a.run(q, w) for w in words] for q in a.states}
    return Dfao(k**exponent, a.states, a.initial, delta, a.output)


def compression(a, m):
    """The m-compression: states are m-tuples (state of mn, ..., state of mn+m-1).

    The output of a tuple is the tuple of outputs, so the projection on
    coordinate r is the subsequence n -> a(mn + r).
    """
    if not isinstance(m, int) or m < 1:
        raise DfaoError(f"compression modulus must be a positive integer, got {m!r}")
    a = normalize_zero(a)
    k = a.base
    start = tuple(a.state_of(i) for i in range(m))
    budget = state_budget()
    order = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        word = [a.delta[q][c] for q in t for c in range(k)]
        row = []
        for j in range(k):
            u = tuple(word[j * m:(j + 1) * m])
            row.append(u)
            if u not in seen:
                seen.add(u)
                order.append(u)
                queue.append(u)
                if len(order) > budget:
                    raise DfaoError(f"compression exceeded the state budget of {budget}")
        delta[t] = row
    return Dfao(k, order, start, delta,
                {t: tuple(a.output[q] for q in t) for t in order})


def compress_ap(a, m, r):
    """Automaton for the subsequence n -> a(mn + r)."""
    if not 0 <= r < m:
        raise DfaoError(f"residue {r} out of range for modulus {m}")
    c = compression(a, m)
    return c.with_output(lambda t: c.output[t][r])


def prime_power(k):
    """Return (p, alpha) with k = p**alpha, or None."""
    p = 2
    while p * p <= k:
        if k % p == 0:
            alpha = 0
            while k % p == 0:
                k //= p
                alpha += 1
            return (p, alpha) if k == 1 else None
        p += 1
    return (k, 1) if k > 1 else None


def rebase_prime_power(a):
    """Convert an automaton in base p**alpha into a minimal base-p automaton.

    Reading base-p digits MSB first, the grouping into blocks of alpha digits
    is anchored at the least significant end, so the total length modulo
    alpha is unknown while reading. The construction runs one copy of the
    automaton per guess of that residue and keeps the length counter; the
    output uses the copy whose guess matches the final count.
    """
    pa = prime_power(a.base)
    if pa is None:
        raise DfaoError(f"base {a.base} is not a prime power")
    p, alpha = pa
    a = normalize_zero(a)
    if alpha == 1:
        return minimize(a)
    budget = state_budget()
    start = (0, tuple((a.initial, 0) for _ in range(alpha)))
    order = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        count, copies = state
        nxt = (count + 1) % alpha
        row = []
        for d in range(p):
            new = []
            for h, (q, v) in enumerate(copies):
                v = v * p + d
                if (nxt - h) % alpha == 0:
                    q, v = a.delta[q][v], 0
                new.append((q, v))
            t = (nxt, tuple(new))
            row.append(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
                if len(order) > budget:
                    raise DfaoError(f"rebase exceeded the state budget of {budget}")
        delta[state] = row
    out = {s: a.output[s[1][s[0]][0]] for s in order}
    result = normalize_zero(minimize(Dfao(p, order, start, delta, out)))
    if not sequences_equal(power_base(result, alpha), a):
        raise DfaoError("internal error: rebased automaton disagrees with its input")
    return result


def equality_product(a, b):
    """Product of the zero-normalized automata with output 'equal?'."""
    return product(normalize_zero(a), normalize_zero(b), lambda x, y: x == y)


def sequences_equal(a, b):
    """Exact test that a and b generate the same sequence."""
    if a.base != b.base:
        raise DfaoError(f"base mismatch: {a.base} vs {b.base}")
    e = equality_product(a, b)
    return all(e.output[q] for q in e.states)
