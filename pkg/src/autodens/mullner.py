"""The structure a(n) = f(s(n), T(n)) of a primitive prolongable automaton.

s is a synchronizing automaton on the minimal images X, T(n) is a
permutation of the c coordinates of a canonical tuple, and f extracts one
coordinate. Permutations are tuples g with g[x] the image of x; they act on
the left, so T(nK + j) = g[j, s(n)] o T(n).
"""

from collections import deque
from dataclasses import dataclass, field
from math import gcd

from .dfao import Dfao, digits, power_base, sequences_equal
from .errors import MullnerError
from .structure import image_sets, is_primitive, sort_set


def compose(g, h):
    """(g o h)(x) = g(h(x))."""
    return tuple(g[x] for x in h)


def identity(c):
    return tuple(range(c))


def perm_order(g):
    e = identity(len(g))
    h, n = g, 1
    while h != e:
        h = compose(g, h)
        n += 1
    return n


def group_closure(gens, c=None):
    """All products of the generators, identity first, in BFS order."""
    gens = [tuple(g) for g in gens]
    if c is None:
        c = len(gens[0]) if gens else 0
    e = identity(c)
    seen = {e}
    order = [e]
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for g in gens:
            gh = compose(g, h)
            if gh not in seen:
                seen.add(gh)
                order.append(gh)
                queue.append(gh)
    return order


def cycle_notation(g):
    """Cycle notation on 1..c, e.g. (1 2)(3 4); the identity is 'id'."""
    seen = set()
    parts = []
    for x in range(len(g)):
        if x in seen or g[x] == x:
            continue
        cyc = [x]
        seen.add(x)
        y = g[x]
        while y != x:
            cyc.append(y)
            seen.add(y)
            y = g[y]
        parts.append("(" + " ".join(str(z + 1) for z in cyc) + ")")
    return "".join(parts) or "id"


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass
class MullnerData:
    source: Dfao
    dfao: Dfao
    exponent: int
    base: int
    column: int
    family: list
    anchor: tuple
    i0: int
    sets: list
    canonical: dict
    s_dfao: Dfao
    perms: dict
    generators: list
    group: list
    f: dict
    d: int = 1
    phi: dict = field(default_factory=dict)
    cosets: dict = field(default_factory=dict)

    @property
    def synchronizing(self):
        return self.column == 1

    def evaluator(self):
        """Automaton on pairs (S, pi) reproducing the sequence."""
        start = (self.sets[0], identity(self.column))
        order = [start]
        seen = {start}
        delta = {}
        queue = deque([start])
        while queue:
            st = queue.popleft()
            s, pi = st
            row = []
            for j in range(self.base):
                t = (self.s_dfao.delta[s][j], compose(self.perms[(j, s)], pi))
                row.append(t)
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
            delta[st] = row
        return Dfao(self.base, order, start, delta, {st: self.f[st] for st in order})

    def state(self, n):
        """(s(n), T(n)) by reading the base-K expansion of n."""
        s, pi = self.sets[0], identity(self.column)
        for j in digits(n, self.base):
            s, pi = self.s_dfao.delta[s][j], compose(self.perms[(j, s)], pi)
        return s, pi


def mullner_decompose(b):
    if not b.is_prolongable():
        raise MullnerError("automaton must satisfy delta(q0,0) = q0")
    if not is_primitive(b):
        raise MullnerError("automaton is not primitive")
    q0 = b.initial
    order, _ = image_sets(b, b.states)
    c = min(len(s) for s in order)
    family = [s for s in order if len(s) == c]
    start = next(s for s in family if q0 in s)

    # iterate digit 0 until a set repeats; the cycle is made of sets
    # containing q0 on which 0^p acts bijectively
    seen = {}
    cur = start
    while cur not in seen:
        seen[cur] = len(seen)
        cur = frozenset(b.delta[q][0] for q in cur)
    p = len(seen) - seen[cur]
    anchor_set = cur
    members = sort_set(b, anchor_set)
    sigma = tuple(members.index(b.run(q, [0] * p)) for q in members)
    exponent = p * perm_order(sigma)
    bp = power_base(b, exponent)
    K = bp.base
    anchor = (q0,) + tuple(q for q in members if q != q0)
    for q in anchor:
        if bp.delta[q][0] != q:
            raise MullnerError("anchor is not fixed by digit 0")

    canonical = {anchor_set: anchor}
    sets = [anchor_set]
    perms = {}
    s_delta = {}
    queue = deque([anchor_set])
    while queue:
        s = queue.popleft()
        tup = canonical[s]
        row = []
        for j in range(K):
            img = tuple(bp.delta[q][j] for q in tup)
            t = frozenset(img)
            if len(t) != c:
                raise MullnerError("image of a minimal set shrank")
            if t not in canonical:
                canonical[t] = img
                sets.append(t)
                queue.append(t)
                g = identity(c)
            else:
                ct = canonical[t]
                g = tuple(ct.index(x) for x in img)
            perms[(j, s)] = g
            row.append(t)
        s_delta[s] = row
    s_dfao = Dfao(K, sets, anchor_set, s_delta, {s: s for s in sets})
    gens = []
    for s in sets:
        for j in range(K):
            g = perms[(j, s)]
            if g not in gens:
                gens.append(g)
    group = group_closure(gens, c)
    f = {(s, g): bp.output[canonical[s][g[0]]] for s in sets for g in group}
    md = MullnerData(source=b, dfao=bp, exponent=exponent, base=K, column=c,
                     family=[sort_set(b, s) for s in family], anchor=anchor, i0=0,
                     sets=sets, canonical=canonical, s_dfao=s_dfao, perms=perms,
                     generators=gens, group=group, f=f)
    if not sequences_equal(md.evaluator(), bp):
        raise MullnerError("reconstruction mismatch")
    md.d, md.phi = maximal_d(md)
    md.cosets = {j: [g for g in group if md.phi[g] == j] for j in range(md.d)}
    return md


def period_homomorphism(md, d):
    """The map phi: G -> Z/d with phi(T(n)) = n mod d, or None if none exists."""
    K = md.base
    if d == 1:
        return {g: 0 for g in md.group}
    start = (md.sets[0], 0)
    seen = {start}
    queue = deque([start])
    value = {}
    while queue:
        s, r = queue.popleft()
        for j in range(K):
            v = (r * (K - 1) + j) % d
            key = (j, s)
            if value.setdefault(key, v) != v:
                return None
            t = (md.s_dfao.delta[s][j], (r * K + j) % d)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    gen_phi = {}
    for (j, s), v in value.items():
        g = md.perms[(j, s)]
        if gen_phi.setdefault(g, v) != v:
            return None
    e = identity(md.column)
    phi = {e: 0}
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for g, v in gen_phi.items():
            gh = compose(g, h)
            val = (v + phi[h]) % d
            if gh in phi:
                if phi[gh] != val:
                    return None
            else:
                phi[gh] = val
                queue.append(gh)
    return phi


def maximal_d(md):
    """Largest d coprime to the base admitting phi with phi(T(n)) = n mod d."""
    for d in sorted(divisors(len(md.group)), reverse=True):
        if gcd(d, md.base) != 1:
            continue
        phi = period_homomorphism(md, d)
        if phi is not None:
            return d, phi
    raise MullnerError("no period found; d = 1 should always succeed")
