"""Upper and lower densities along subsequences with exponent 1.

For a digit string u_1 u_2 ... read from the initial state of the joint
automaton, with q_t the state after t digits, put

    D = sum_t u_t K^-t,    N = sum_t n(q_{t-1}, u_t) K^-t,
    n(q, c) = sum_{c' < c} w(delta(q, c')).

The upper density is the supremum of N/D over all strings with D > 0. It is
found by Dinkelbach iteration: maximize N - theta*D by exact policy
iteration on V(q) = max_c [n(q,c) - theta*c + V(delta(q,c))/K], then
replace theta by the ratio of the optimal string, until the optimum is 0.
"""

from dataclasses import dataclass
from fractions import Fraction

from .density import state_density_limits
from .dfao import Dfao
from .errors import ExtremalError
from .structure import decompose
from .subseq import component_tables


@dataclass
class ExtremalProblem:
    automaton: Dfao
    weights: dict
    alpha: object = None
    original_base: int = None

    @property
    def base(self):
        return self.automaton.base

    @property
    def initial(self):
        return self.automaton.initial

    def complement(self):
        return ExtremalProblem(self.automaton, {q: 1 - w for q, w in self.weights.items()},
                               self.alpha, self.original_base)

    def prefix_sum(self, q, c):
        return sum((self.weights[self.automaton.delta[q][x]] for x in range(c)), Fraction(0))


@dataclass
class ExtremalResult:
    value: Fraction
    preperiod: list
    period: list
    inner_optimum: Fraction
    policy_ratio: Fraction
    bellman_ok: bool

    @property
    def certified(self):
        return self.inner_optimum == 0 and self.bellman_ok and (
            self.policy_ratio is None or self.policy_ratio == self.value)


def build_problem(a, along, alpha):
    if along.beta != 1:
        raise ExtremalError(f"extremal densities need exponent 1; {along} has {along.beta}")
    dec = decompose(a)
    # a symbol the automaton never outputs simply gets weight 0 everywhere
    tables = component_tables(dec, along)
    limits = state_density_limits(dec)
    weights = {}
    for q in dec.joint.states:
        weights[q] = sum((limits.values[i][q] * tables[i - 1].get(alpha, 0)
                          for i in range(1, len(tables) + 1)), Fraction(0))
    return ExtremalProblem(dec.joint, weights, alpha, dec.original_base)


def _evaluate(aut, policy, reward):
    """Exact discounted values V(q) = reward(q) + V(next(q))/K of a policy."""
    k = aut.base
    value = {}
    for start in aut.states:
        if start in value:
            continue
        path = []
        pos = {}
        q = start
        while q not in value and q not in pos:
            pos[q] = len(path)
            path.append(q)
            q = aut.delta[q][policy[q]]
        if q in pos:
            cycle = path[pos[q]:]
            total = Fraction(0)
            for x in reversed(cycle):
                total = reward[x] + total / k
            v = total / (1 - Fraction(1, k ** len(cycle)))
            value[cycle[0]] = v
            for x in reversed(cycle[1:]):
                nxt = aut.delta[x][policy[x]]
                value[x] = reward[x] + value[nxt] / k
            path = path[:pos[q]]
        for x in reversed(path):
            nxt = aut.delta[x][policy[x]]
            value[x] = reward[x] + value[nxt] / k
    return value


def _improve(problem, theta, policy):
    aut = problem.automaton
    k = aut.base
    n = {q: [problem.prefix_sum(q, c) for c in range(k)] for q in aut.states}
    while True:
        reward = {q: n[q][policy[q]] - theta * policy[q] for q in aut.states}
        v = _evaluate(aut, policy, reward)
        vd = _evaluate(aut, policy, {q: Fraction(policy[q]) for q in aut.states})
        changed = False
        for q in aut.states:
            qv = [n[q][c] - theta * c + v[aut.delta[q][c]] / k for c in range(k)]
            best = max(qv)
            if best > qv[policy[q]]:
                cands = [c for c in range(k) if qv[c] == best]
                policy[q] = max(cands, key=lambda c: (c + vd[aut.delta[q][c]] / k, -c))
                changed = True
        if not changed:
            return policy, v, n


def policy_string(aut, policy):
    """Digit string from the initial state as (preperiod, period)."""
    seen = {}
    word = []
    q = aut.initial
    while q not in seen:
        seen[q] = len(word)
        word.append(policy[q])
        q = aut.delta[q][policy[q]]
    i = seen[q]
    return word[:i], word[i:]


def string_value(problem, preperiod, period):
    """Exact (N, D) of the string preperiod followed by period repeated."""
    aut = problem.automaton
    k = aut.base
    n_tot = Fraction(0)
    d_tot = Fraction(0)
    q = aut.initial
    scale = Fraction(1)
    for c in preperiod:
        scale /= k
        n_tot += problem.prefix_sum(q, c) * scale
        d_tot += c * scale
        q = aut.delta[q][c]
    if period:
        # the period may need several passes before the state repeats
        starts = {}
        blocks = []
        while q not in starts:
            starts[q] = len(blocks)
            bn = Fraction(0)
            bd = Fraction(0)
            s = Fraction(1)
            for c in period:
                s /= k
                bn += problem.prefix_sum(q, c) * s
                bd += c * s
                q = aut.delta[q][c]
            blocks.append((bn, bd))
        first = starts[q]
        factor = Fraction(1, k ** len(period))
        for bn, bd in blocks[:first]:
            n_tot += bn * scale
            d_tot += bd * scale
            scale *= factor
        cyc = blocks[first:]
        geo = 1 / (1 - factor ** len(cyc))
        s = scale
        for bn, bd in cyc:
            n_tot += bn * s * geo
            d_tot += bd * s * geo
            s *= factor
    return n_tot, d_tot


def upper_density(problem):
    aut = problem.automaton
    reach = aut.reachable()
    if all(problem.weights[q] == 0 for q in reach):
        return ExtremalResult(Fraction(0), [], [0], Fraction(0), None, True)
    policy = {q: 0 for q in aut.states}
    theta = Fraction(0)
    while True:
        policy, v, n = _improve(problem, theta, policy)
        inner = v[aut.initial]
        pre, per = policy_string(aut, policy)
        num, den = string_value(problem, pre, per)
        if inner == 0:
            break
        if den == 0:
            raise ExtremalError("degenerate optimum with D = 0")
        theta = num / den
    if den == 0:
        raise ExtremalError("degenerate optimum with D = 0")
    k = aut.base
    bellman = all(v[q] == max(n[q][c] - theta * c + v[aut.delta[q][c]] / k for c in range(k))
                  for q in aut.states)
    return ExtremalResult(theta, pre, per, inner, num / den, bellman)


def lower_density(problem):
    res = upper_density(problem.complement())
    return ExtremalResult(1 - res.value, res.preperiod, res.period, res.inner_optimum,
                          None if res.policy_ratio is None else 1 - res.policy_ratio,
                          res.bellman_ok)


def extremal_densities(a, along, alpha):
    problem = build_problem(a, along, alpha)
    return upper_density(problem), lower_density(problem)
