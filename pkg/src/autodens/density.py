"""Exact densities: eigenvector densities of primitive automata, the limits
d_{i,q} of index-set frequencies below each state, and logarithmic densities
of append-closed index sets."""

from dataclasses import dataclass
from fractions import Fraction
from math import log

import sympy
from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

from . import ratlinalg as la
from .dfao import prime_power
from .errors import DensityError
from .structure import (generator_levels, generators_finite, is_final, period,
                        sccs)

DEFAULT_EPS = Fraction(1, 2**30)
_PREC = 160


def frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(text):
    return Fraction(text)


# ---------------------------------------------------------------------------
# Densities of primitive automata


def _stationary(a, comp):
    """Positive normalized solution of (M - kI) v = 0 on a closed state set."""
    pos = {q: i for i, q in enumerate(comp)}
    n = len(comp)
    m = [[Fraction(0)] * n for _ in range(n)]
    for j, q in enumerate(comp):
        for t in a.delta[q]:
            m[pos[t]][j] += 1
        m[j][j] -= a.base
    basis = la.nullspace(m, n)
    if len(basis) != 1:
        raise DensityError(f"eigenspace for eigenvalue {a.base} has dimension {len(basis)}")
    v = basis[0]
    total = sum(v)
    v = [x / total for x in v]
    if any(x <= 0 for x in v):
        raise DensityError("eigenvector has a nonpositive entry")
    return dict(zip(comp, v))


def aggregate(a, state_density):
    out = {}
    for q, v in state_density.items():
        sym = a.output[q]
        out[sym] = out.get(sym, Fraction(0)) + v
    return out


def primitive_density(b):
    """Natural densities of the states and outputs of a primitive automaton."""
    comps = sccs(b)
    if len(comps) != 1 or len(comps[0]) != len(b.reachable()):
        raise DensityError("automaton is not strongly connected")
    if period(b, comps[0]) != 1:
        raise DensityError("automaton is periodic, hence not primitive")
    states = _stationary(b, comps[0])
    for q in b.states:
        states.setdefault(q, Fraction(0))
    return states, aggregate(b, states)


def limit_distribution(a):
    """Limit of the state distribution over words of length n from the
    initial state (Cesaro limit; the plain limit whenever it exists)."""
    reach = a.reachable()
    comps = sccs(a, reach)
    finals = [c for c in comps if is_final(a, c)]
    if len(finals) == 1:
        dist = _stationary(a, finals[0])
    else:
        pos = {q: i for i, q in enumerate(reach)}
        n = len(reach)
        b = [[Fraction(0)] * n for _ in range(n)]
        for j, q in enumerate(reach):
            for t in a.delta[q]:
                b[pos[t]][j] += Fraction(1, a.base)
        p = la.fixed_projection(b)
        col = pos[a.initial]
        dist = {q: p[pos[q]][col] for q in reach if p[pos[q]][col]}
    return {q: dist.get(q, Fraction(0)) for q in reach}


# ---------------------------------------------------------------------------
# d_{i,q}


@dataclass
class StateDensityTable:
    """d[i][q]: limit fraction of the subtree below q belonging to M_i.

    Index 0 is the residual set M_0 (always 0 in the limit).
    """
    states: list
    labels: dict
    values: dict
    matrix: list
    projection: list

    def weight(self, i, q):
        return self.values[i][q]


def state_density_limits(dec):
    joint = dec.joint
    states = list(joint.states)
    pos = {q: i for i, q in enumerate(states)}
    n = len(states)
    k = joint.base
    b = [[Fraction(0)] * n for _ in range(n)]
    for j, q in enumerate(states):
        for t in joint.delta[q]:
            b[pos[t]][j] += Fraction(1, k)
    try:
        p = la.fixed_projection(b)
    except ArithmeticError as exc:
        raise DensityError(str(exc))
    labels = {q: joint.output[q] for q in states}
    count = len(dec.components)
    values = {}
    for i in range(count + 1):
        rows = [pos[q] for q in states if labels[q] == i]
        values[i] = {q: sum((p[r][pos[q]] for r in rows), Fraction(0)) for q in states}
    for q in states:
        total = sum(values[i][q] for i in range(1, count + 1))
        if total != 1:
            raise DensityError(f"d_i,q do not sum to 1 at {q!r}: {total}")
    return StateDensityTable(states, labels, values, b, p)


# ---------------------------------------------------------------------------
# Logarithmic densities


def _ivctx():
    ctx = MPIntervalContext()
    ctx.prec = _PREC
    return ctx


def _ivfrac(ctx, x):
    x = Fraction(x)
    return ctx.mpf(x.numerator) / ctx.mpf(x.denominator)


def _endpoints(x):
    lo, hi = x._mpi_
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


def _interval(c0, terms, base):
    ctx = _ivctx()
    num = _ivfrac(ctx, c0)
    for c, r in terms:
        num = num + _ivfrac(ctx, c) * ctx.log(_ivfrac(ctx, r))
    return _endpoints(num / ctx.log(ctx.mpf(base)))


def _factor(r):
    r = Fraction(r)
    exps = {}
    for p, e in sympy.factorint(r.numerator).items():
        exps[p] = exps.get(p, 0) + e
    for p, e in sympy.factorint(r.denominator).items():
        exps[p] = exps.get(p, 0) - e
    return exps


@dataclass(frozen=True)
class LogLinearValue:
    """The number (c0 + sum c_t ln r_t) / ln(base) with a rational enclosure.

    When ``exact`` is false the symbolic part is a partial sum and only the
    enclosure is guaranteed to contain the value.
    """
    c0: Fraction
    terms: tuple
    base: int
    enclosure: tuple
    exact: bool

    @classmethod
    def make(cls, c0, terms, base, exact=True, enclosure=None):
        c0 = Fraction(c0)
        merged = {}
        for c, r in terms:
            c, r = Fraction(c), Fraction(r)
            if r <= 0:
                raise DensityError("logarithm of a nonpositive number")
            if c and r != 1:
                merged[r] = merged.get(r, Fraction(0)) + c
        if exact:
            exps = {}
            for r, c in merged.items():
                for p, e in _factor(r).items():
                    exps[p] = exps.get(p, Fraction(0)) + c * e
            items = tuple((c, Fraction(p)) for p, c in sorted(exps.items()) if c)
            enclosure = _interval(c0, items, base)
        else:
            items = tuple(sorted(((c, r) for r, c in merged.items() if c), key=lambda t: t[1]))
            if enclosure is None:
                raise DensityError("inexact log-linear value needs an enclosure")
        lo, hi = enclosure
        if lo > hi:
            raise DensityError("empty enclosure")
        return cls(c0, items, base, (Fraction(lo), Fraction(hi)), exact)

    @classmethod
    def rational(cls, q, base):
        return cls.make(0, [(q, base)], base)

    def as_rational(self):
        """The value as a Fraction when it is provably rational, else None."""
        if not self.exact or self.c0:
            return None
        if not self.terms:
            return Fraction(0)
        bexp = _factor(self.base)
        exps = {int(r): c for c, r in self.terms}
        if set(exps) != set(bexp):
            return None
        ratios = {exps[p] / bexp[p] for p in bexp}
        return ratios.pop() if len(ratios) == 1 else None

    @property
    def lo(self):
        return self.enclosure[0]

    @property
    def hi(self):
        return self.enclosure[1]

    @property
    def width(self):
        return self.hi - self.lo

    def midpoint(self):
        return (self.lo + self.hi) / 2

    def radius(self):
        return (self.hi - self.lo) / 2

    def __float__(self):
        if self.exact:
            num = float(self.c0) + sum(float(c) * (log(r.numerator) - log(r.denominator))
                                       for c, r in self.terms)
            return num / log(self.base)
        return float(self.midpoint())

    def scaled(self, q):
        q = Fraction(q)
        terms = tuple((q * c, r) for c, r in self.terms)
        if self.exact:
            return LogLinearValue.make(q * self.c0, terms, self.base)
        lo, hi = q * self.lo, q * self.hi
        return LogLinearValue.make(q * self.c0, terms, self.base, False, (min(lo, hi), max(lo, hi)))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogLinearValue.rational(other, self.base)
        if other.base != self.base:
            raise DensityError(f"cannot add log-linear values over bases {self.base} and {other.base}")
        terms = self.terms + other.terms
        if self.exact and other.exact:
            return LogLinearValue.make(self.c0 + other.c0, terms, self.base)
        return LogLinearValue.make(self.c0 + other.c0, terms, self.base, False,
                                   (self.lo + other.lo, self.hi + other.hi))

    __radd__ = __add__

    def in_base(self, k):
        """Re-express over ln k, where self.base is a power of k."""
        if k == self.base:
            return self
        e, b = 0, 1
        while b < self.base:
            b *= k
            e += 1
        if b != self.base:
            raise DensityError(f"{self.base} is not a power of {k}")
        terms = tuple((c / e, r) for c, r in self.terms)
        if self.exact:
            return LogLinearValue.make(self.c0 / e, terms, k)
        return LogLinearValue.make(self.c0 / e, terms, k, False, self.enclosure)

    def to_json(self):
        return {"c0": frac_str(self.c0),
                "terms": [[frac_str(c), frac_str(r)] for c, r in self.terms],
                "base": self.base,
                "enclosure": [frac_str(self.lo), frac_str(self.hi)],
                "exact": self.exact}

    def __str__(self):
        q = self.as_rational()
        if q is not None:
            return frac_str(q)
        parts = []
        if self.c0 or not self.terms:
            parts.append(frac_str(self.c0))
        for c, r in self.terms:
            coef = {1: "", -1: "-"}.get(c, frac_str(c) + "*")
            parts.append(f"{coef}ln({frac_str(r)})")
        body = " + ".join(parts).replace("+ -", "- ")
        text = f"({body})/ln({self.base})" if self.terms else body
        if not self.exact:
            # the partial product is unreadable; the enclosure is what matters
            text = f"in [{float(self.lo):.12g}, {float(self.hi):.12g}]"
        return text


def logdensity_set(m, eps=DEFAULT_EPS):
    """Logarithmic density of an append-closed index set given by automaton m.

    Sums ln(1 + 1/x)/ln k over the generators x of the set. If there are
    finitely many the result is exact; otherwise the sum is taken level by
    level, and the pending integers of the last level bound the tail.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DensityError("target width must be positive")
    k = m.base
    levels = generator_levels(m)
    if generators_finite(m):
        terms = []
        while True:
            elems, frontier = next(levels)
            terms.extend((1, Fraction(x + 1, x)) for x in elems)
            if not frontier:
                break
        return LogLinearValue.make(0, terms, k)
    ctx = _ivctx()
    ln_k_lo = _endpoints(ctx.log(ctx.mpf(k)))[0]
    product = Fraction(1)
    depth = 0
    while True:
        elems, frontier = next(levels)
        depth += 1
        for x in elems:
            product *= Fraction(x + 1, x)
        tail = Fraction(len(frontier), k ** (depth - 1)) / ln_k_lo
        if tail > eps:
            continue
        lo, hi = _interval(0, [(1, product)], k)
        if hi - lo + tail <= eps:
            return LogLinearValue.make(0, [(1, product)], k, False, (lo, hi + tail))


def is_prime_power(k):
    return prime_power(k) is not None
