"""Strongly connected components, column numbers and the decomposition of an
automatic sequence into primitive components on automatic index sets."""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .dfao import Dfao, minimize, normalize_zero, power_base, product, state_budget
from .errors import StructureError
from . import ratlinalg as la


def tarjan(nodes, succ):
    """Strongly connected components, iteratively.

    Components come out in reverse topological order: every component is
    emitted after all components reachable from it.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def sccs(a, states=None):
    """SCCs of the reachable part, members sorted by declaration order."""
    states = a.reachable() if states is None else states
    comps = tarjan(states, lambda q: a.delta[q])
    comps = [sorted(c, key=a.index) for c in comps]
    comps.sort(key=lambda c: a.index(c[0]))
    return comps


def is_final(a, comp):
    members = set(comp)
    return all(t in members for q in comp for t in a.delta[q])


def period(a, comp):
    """gcd of the cycle lengths inside a strongly connected set of states."""
    members = set(comp)
    level = {comp[0]: 0}
    queue = deque([comp[0]])
    g = 0
    while queue:
        q = queue.popleft()
        for t in a.delta[q]:
            if t not in members:
                continue
            if t not in level:
                level[t] = level[q] + 1
                queue.append(t)
            else:
                g = gcd(g, level[q] + 1 - level[t])
    return g


def is_primitive(a):
    """Strongly connected on all states and aperiodic."""
    comps = sccs(a)
    return (len(comps) == 1 and len(comps[0]) == len(a.states)
            and period(a, comps[0]) == 1)


def image_sets(a, start):
    """Breadth-first closure of {delta(start, w)} over all words w.

    Returns the list of sets in discovery order and a parent map
    set -> (previous set, digit) used to recover words.
    """
    start = frozenset(start)
    order = [start]
    parent = {start: None}
    queue = deque([start])
    budget = state_budget()
    while queue:
        s = queue.popleft()
        for d in range(a.base):
            t = frozenset(a.delta[q][d] for q in s)
            if t not in parent:
                parent[t] = (s, d)
                order.append(t)
                queue.append(t)
                if len(order) > budget:
                    raise StructureError(f"image-set closure exceeded the state budget of {budget}")
    return order, parent


def word_to(parent, target):
    word = []
    node = target
    while parent[node] is not None:
        node, d = parent[node]
        word.append(d)
    word.reverse()
    return word


def zero_cycle_lcm(a):
    """lcm of the cycle lengths of the map q -> delta(q, 0)."""
    result = 1
    done = set()
    for q in a.states:
        if q in done:
            continue
        path = {}
        cur = q
        while cur not in path and cur not in done:
            path[cur] = len(path)
            cur = a.delta[cur][0]
        if cur in path:
            result = lcm(result, len(path) - path[cur])
        done.update(path)
    return result


@dataclass
class FinalComponentInfo:
    states: list
    column_number: int
    family: list
    minimizing_word: list
    primitive: bool


@dataclass
class StructureReport:
    base: int
    sccs: list
    final: list
    components: list
    exponent: int
    primitive: bool


def sort_set(a, s):
    return tuple(sorted(s, key=a.index))


def column_data(a, comp):
    """Column number, family X and BFS-first minimizing word for a closed set."""
    order, parent = image_sets(a, comp)
    c = min(len(s) for s in order)
    family = [s for s in order if len(s) == c]
    return c, family, word_to(parent, family[0])


def analyze(a):
    comps = sccs(a)
    final = [is_final(a, c) for c in comps]
    infos = []
    for comp, fin in zip(comps, final):
        if not fin:
            continue
        c, family, word = column_data(a, comp)
        infos.append(FinalComponentInfo(
            states=comp, column_number=c,
            family=[sort_set(a, s) for s in family],
            minimizing_word=word,
            primitive=period(a, comp) == 1))
    exponent = zero_cycle_lcm(minimize(normalize_zero(a)))
    prim = len(comps) == 1 and period(a, comps[0]) == 1
    return StructureReport(a.base, comps, final, infos, exponent, prim)


# ---------------------------------------------------------------------------
# Decomposition


@dataclass
class Component:
    index: int
    final_index: int
    start: object
    dfao: Dfao
    indicator: Dfao


@dataclass
class Decomposition:
    source: Dfao
    original_base: int
    exponent: int
    components: list
    joint: Dfao
    residual: Dfao
    residual_certified: bool = False
    residual_growth: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def base(self):
        return self.source.base


def decompose(a):
    """Split a into primitive prolongable components b_i on index sets M_i.

    The input is minimized, zero-normalized and read in base k**l where l is
    the lcm of the 0-cycle lengths, so that every 0-periodic state is fixed
    by digit 0. For each final component F, the first set in X(F) (BFS
    order) fixed elementwise by 0 provides the starting states of the b_i,
    and m lies in M_i exactly when a and b_i reach the same state on (m).
    """
    a1 = minimize(normalize_zero(a))
    ell = zero_cycle_lcm(a1)
    src = minimize(power_base(a1, ell))
    comps = sccs(src)
    components = []
    raw = []
    for fi, comp in enumerate(c for c in comps if is_final(src, c)):
        order, _ = image_sets(src, comp)
        c = min(len(s) for s in order)
        anchor = None
        for s in order:
            if len(s) == c and all(src.delta[q][0] == q for q in s):
                anchor = s
                break
        if anchor is None:
            raise StructureError("no 0-fixed minimal image found; exponent choice failed")
        for q in sort_set(src, anchor):
            b = src.restrict(comp, initial=q)
            ind = product(src.pure(), b.pure(), lambda x, y: int(x == y))
            if not any(ind.output[t] for t in ind.states):
                # a and b_i never meet: the index set is empty
                continue
            raw.append(b)
            components.append(Component(
                index=len(components) + 1, final_index=fi, start=q,
                dfao=minimize(b), indicator=minimize(ind)))
    joint = _joint(src, raw)
    residual = joint.with_output(lambda t: int(joint.output[t] == 0))
    dec = Decomposition(source=src, original_base=a.base, exponent=ell,
                        components=components, joint=joint, residual=minimize(residual))
    dec.residual_certified, dec.residual_growth = residual_thinness(joint)
    return dec


def _joint(src, raw):
    """Product of src with every component; output = component label or 0."""
    start = (src.initial,) + tuple(b.initial for b in raw)
    order = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        row = []
        for d in range(src.base):
            u = tuple(src.delta[q][d] for q in t)
            row.append(u)
            if u not in seen:
                seen.add(u)
                order.append(u)
                queue.append(u)
        delta[t] = row
    output = {}
    for t in order:
        hits = [i + 1 for i in range(len(raw)) if t[i + 1] == t[0]]
        if len(hits) > 1:
            raise StructureError(f"index sets overlap at components {hits}")
        output[t] = hits[0] if hits else 0
    return Dfao(src.base, order, start, delta, output)


def residual_thinness(joint):
    """Certify that words staying in the residual grow slower than k**l.

    With B the residual counting matrix divided by the base, the spectral
    radius of B is below 1 iff (I - B) x = 1 has a solution x > 0.
    Returns (certified, numeric growth rate).
    """
    pend = [q for q in joint.states if joint.output[q] == 0]
    if not pend:
        return True, 0.0
    pos = {q: i for i, q in enumerate(pend)}
    n = len(pend)
    k = joint.base
    counts = [[0] * n for _ in range(n)]
    for j, q in enumerate(pend):
        for t in joint.delta[q]:
            if t in pos:
                counts[pos[t]][j] += 1
    system = [[Fraction(int(i == j)) - Fraction(counts[i][j], k) for j in range(n)] for i in range(n)]
    x = la.solve(system, [Fraction(1)] * n)
    certified = x is not None and all(v > 0 for v in x)
    growth = float(max(abs(np.linalg.eigvals(np.array(counts, dtype=float))))) if n else 0.0
    return certified, growth


def is_accepting(sym):
    return sym in (1, True, "1")


def is_append_closed(m):
    acc = {q for q in m.states if is_accepting(m.output[q])}
    return all(t in acc for q in acc for t in m.delta[q])


# ---------------------------------------------------------------------------
# Generators


@dataclass
class GeneratorReport:
    base: int
    depth: int
    elements: list
    s_counts: list
    pending_counts: list
    zero_in_set: bool
    finite: bool


def coreachable(m):
    """States from which an accepting state can be reached."""
    acc = [q for q in m.states if is_accepting(m.output[q])]
    pred = {q: [] for q in m.states}
    for q in m.states:
        for t in m.delta[q]:
            pred[t].append(q)
    seen = set(acc)
    queue = deque(acc)
    while queue:
        q = queue.popleft()
        for p in pred[q]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def pending_states(m):
    co = coreachable(m)
    return {q for q in m.states if q in co and not is_accepting(m.output[q])}


def generators_finite(m):
    """True iff finitely many integers are pending, i.e. S is finite."""
    pend = pending_states(m)
    roots = [m.delta[m.initial][d] for d in range(1, m.base)]
    roots = [q for q in roots if q in pend]
    reach = set(roots)
    queue = deque(roots)
    while queue:
        q = queue.popleft()
        for t in m.delta[q]:
            if t in pend and t not in reach:
                reach.add(t)
                queue.append(t)
    comps = tarjan(list(reach), lambda q: [t for t in m.delta[q] if t in reach])
    for comp in comps:
        if len(comp) > 1 or comp[0] in m.delta[comp[0]]:
            return False
    return True


def generator_levels(m):
    """Yield, per digit length 1, 2, ..., the generators of that length and
    the pending frontier as a list of (integer, state)."""
    k = m.base
    pend = pending_states(m)
    budget = state_budget()
    frontier = [(0, m.initial)]
    first = True
    while True:
        elems = []
        nxt = []
        for value, q in frontier:
            for d in range(1 if first else 0, k):
                t = m.delta[q][d]
                v = value * k + d
                if is_accepting(m.output[t]):
                    elems.append(v)
                elif t in pend:
                    nxt.append((v, t))
        if len(nxt) > budget:
            raise StructureError(f"pending frontier exceeded the state budget of {budget}")
        first = False
        frontier = nxt
        yield elems, frontier


def transfer_counts(m, depth):
    """Exact per-length counts of generators and pending integers."""
    k = m.base
    pend = pending_states(m)
    idx = {q: i for i, q in enumerate(m.states)}
    acc_digits = [sum(1 for t in m.delta[q] if is_accepting(m.output[t])) for q in m.states]
    vec = [0] * len(m.states)
    s_counts = []
    p_counts = []
    for lam in range(1, depth + 1):
        if lam == 1:
            s_counts.append(sum(1 for d in range(1, k) if is_accepting(m.output[m.delta[m.initial][d]])))
            vec = [0] * len(m.states)
            for d in range(1, k):
                vec[idx[m.delta[m.initial][d]]] += 1
        else:
            s_counts.append(sum(vec[idx[q]] * acc_digits[idx[q]] for q in m.states
                                if not is_accepting(m.output[q])))
            new = [0] * len(m.states)
            for q in m.states:
                c = vec[idx[q]]
                if c:
                    for t in m.delta[q]:
                        new[idx[t]] += c
            vec = new
        p_counts.append(sum(vec[idx[q]] for q in pend))
    return s_counts, p_counts


def generators(m, depth):
    """Generators S = {x in M : x < k or floor(x/k) not in M} below k**depth."""
    if depth < 0:
        raise StructureError("depth must be nonnegative")
    elements = []
    zero_in = is_accepting(m.output[m.initial])
    if zero_in:
        elements.append(0)
    levels = generator_levels(m)
    for _ in range(depth):
        elems, _front = next(levels)
        elements.extend(elems)
    s_counts, p_counts = transfer_counts(m, depth)
    return GeneratorReport(m.base, depth, elements, s_counts, p_counts, zero_in, generators_finite(m))
