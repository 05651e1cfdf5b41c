"""Densities along the naturals, primes, squares and coprime classes.

Primitive components are handled by exact formulas (compression averages for
primes and coprime classes, the synchronizing/permutation split for squares);
arbitrary automata are assembled from their decomposition.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from sympy import factorint

from .density import (LogLinearValue, frac_str, limit_distribution, logdensity_set,
                      primitive_density)
from .dfao import compression, prime_power, rebase_prime_power
from .errors import InputError, UnsupportedError
from .mullner import mullner_decompose
from .structure import column_data, decompose, sccs


# ---------------------------------------------------------------------------
# Subsequence kinds


@dataclass(frozen=True)
class SubsequenceKind:
    kind: str
    modulus: int = None

    KINDS = ("naturals", "primes", "squares", "coprime")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InputError(f"unknown subsequence kind {self.kind!r}")
        if self.kind == "coprime":
            if not isinstance(self.modulus, int) or self.modulus < 2:
                raise InputError("coprime classes need an integer modulus >= 2")
        elif self.modulus is not None:
            raise InputError(f"{self.kind} takes no modulus")

    @property
    def beta(self):
        return Fraction(1, 2) if self.kind == "squares" else Fraction(1)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text.startswith("coprime"):
            _, sep, m = text.partition("=")
            if not sep or not m.isdigit():
                raise InputError(f"expected coprime=M, got {text!r}")
            return cls("coprime", int(m))
        return cls(text)

    def __str__(self):
        return f"coprime={self.modulus}" if self.kind == "coprime" else self.kind


NATURALS = SubsequenceKind("naturals")
PRIMES = SubsequenceKind("primes")
SQUARES = SubsequenceKind("squares")


def coprime(m):
    return SubsequenceKind("coprime", m)


# ---------------------------------------------------------------------------
# Quadratic residue counts


def _qr_brute(m, h):
    m %= h
    return sum(1 for x in range(h) if x * x % h == m)


def _qr_prime_power(m, p, e):
    """c(m; p^e) for a prime p."""
    h = p**e
    m %= h
    if m == 0:
        return Fraction(p ** (e // 2), h)
    v = 0
    while m % p ** (v + 1) == 0:
        v += 1
    alpha = v + 1 if p != 2 else v + 3
    if alpha >= e:
        return Fraction(_qr_brute(m, h), h)
    base = p**alpha
    return Fraction(_qr_brute(m, base), base) / p ** (e - alpha)


def qr_count(m, h):
    """c(m; h) = #{0 <= x < h : x^2 = m mod h} / h."""
    if h < 1:
        raise InputError("modulus must be positive")
    result = Fraction(1)
    for p, e in factorint(h).items():
        result *= _qr_prime_power(m, p, e)
    return result


# ---------------------------------------------------------------------------
# Primitive components


def ap_average_density(b, modulus, residues):
    """Average over r in residues of the density of n -> b(modulus*n + r)."""
    residues = list(residues)
    if not residues:
        raise UnsupportedError("empty residue set")
    comp = compression(b, modulus)
    dist = limit_distribution(comp)
    total = {}
    for r in residues:
        for t, v in dist.items():
            if v:
                sym = comp.output[t][r]
                total[sym] = total.get(sym, Fraction(0)) + v
    n = len(residues)
    return {sym: v / n for sym, v in total.items()}


def prime_density(b, md=None):
    """Density of b along the primes: average of b(mn + r) over r coprime to
    m = k*d, with d the period of the permutation part."""
    md = mullner_decompose(b) if md is None else md
    m = b.base * md.d
    return ap_average_density(b, m, [r for r in range(m) if gcd(r, m) == 1])


def coprime_density(b, modulus, md=None):
    """Density of b along the integers coprime to ``modulus``."""
    if modulus < 2:
        raise InputError("modulus must be at least 2")
    md = mullner_decompose(b) if md is None else md
    m = lcm(modulus, b.base * md.d)
    return ap_average_density(b, m, [r for r in range(m) if gcd(r, modulus) == 1])


def _zero_series(s, q2, p):
    """q -> sum_{mu >= 0} p^-mu [delta(q2, 0^(2 mu)) = q], exactly."""
    seq = []
    index = {}
    q = q2
    while q not in index:
        index[q] = len(seq)
        seq.append(q)
        q = s.delta[s.delta[q][0]][0]
    t0 = index[q]
    length = len(seq) - t0
    out = {}
    for mu in range(t0):
        out[seq[mu]] = out.get(seq[mu], Fraction(0)) + Fraction(1, p**mu)
    ratio = 1 / (1 - Fraction(1, p**length))
    for r in range(length):
        q = seq[t0 + r]
        out[q] = out.get(q, Fraction(0)) + Fraction(1, p ** (t0 + r)) * ratio
    return out


def synchronizing_square_density(s):
    """State densities of a synchronizing sequence along the squares.

    ``s`` is read in a prime power base. It is converted to its prime base p;
    outputs are kept, and the result is keyed by output symbol.
    """
    sp = rebase_prime_power(s) if prime_power(s.base)[1] > 1 else s
    p = sp.base
    c, _, _ = column_data(sp, sp.reachable())
    if c != 1:
        raise UnsupportedError("the set automaton is not synchronizing in its prime base")
    ds = limit_distribution(sp)
    w2 = {}
    if p == 2:
        for q1, v in ds.items():
            if v:
                q2 = sp.run(q1, [0, 0, 1])
                w2[q2] = w2.get(q2, Fraction(0)) + v / 2
    else:
        residues = sorted({x * x % p for x in range(1, p)})
        for q1, v in ds.items():
            if v:
                for m0 in residues:
                    q2 = sp.delta[q1][m0]
                    w2[q2] = w2.get(q2, Fraction(0)) + v * Fraction(2, p)
    state_dens = {}
    for q2, v in w2.items():
        for q, x in _zero_series(sp, q2, p).items():
            state_dens[q] = state_dens.get(q, Fraction(0)) + v * x
    out = {}
    for q, v in state_dens.items():
        sym = sp.output[q]
        out[sym] = out.get(sym, Fraction(0)) + v
    return out


def square_density(b, md=None):
    """Density of a primitive component along the squares (prime power base)."""
    if prime_power(b.base) is None:
        raise UnsupportedError(f"squares unsupported for base {b.base}")
    md = mullner_decompose(b) if md is None else md
    s_part = synchronizing_square_density(md.s_dfao)
    order = len(md.group)
    t_part = {g: Fraction(md.d, order) * qr_count(md.phi[g], md.d) for g in md.group}
    out = {}
    for s, vs in s_part.items():
        for g, vg in t_part.items():
            if vs and vg:
                sym = md.f[(s, g)]
                out[sym] = out.get(sym, Fraction(0)) + vs * vg
    return out


def component_density(b, along, md=None):
    if along.kind == "naturals":
        return primitive_density(b)[1]
    if along.kind == "primes":
        return prime_density(b, md)
    if along.kind == "squares":
        return square_density(b, md)
    return coprime_density(b, along.modulus, md)


# ---------------------------------------------------------------------------
# General automata


@dataclass
class DensityReport:
    along: SubsequenceKind
    mode: str
    symbols: list
    values: dict
    exists: bool = None
    witness: tuple = None
    components: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        def enc(v):
            return v.to_json() if isinstance(v, LogLinearValue) else frac_str(v)
        out = {"along": str(self.along), "mode": self.mode}
        if self.mode == "natural":
            out["exists"] = self.exists
            out["values"] = ({str(s): frac_str(self.values.get(s, 0)) for s in self.symbols}
                             if self.exists else None)
            if self.witness:
                sym, i, vi, j, vj = self.witness
                out["witness"] = {"symbol": str(sym), "components": [i, j],
                                  "densities": [frac_str(vi), frac_str(vj)]}
        else:
            out["values"] = {str(s): enc(v) for s, v in self.values.items()}
        out["components"] = [{str(s): frac_str(v) for s, v in t.items()} for t in self.components]
        out["notes"] = list(self.notes)
        return out


def _symbols(dec):
    src = dec.source
    return sorted({src.output[q] for q in src.reachable()}, key=str)


def component_tables(dec, along):
    if along.kind == "squares" and prime_power(dec.base) is None:
        raise UnsupportedError(f"squares unsupported for base {dec.original_base}")
    return [component_density(c.dfao, along) for c in dec.components]


def _natural(dec, along, tables):
    symbols = _symbols(dec)
    first = tables[0]
    for i, t in enumerate(tables[1:], 2):
        for s in symbols:
            if t.get(s, 0) != first.get(s, 0):
                return DensityReport(along, "natural", symbols, {}, False,
                                     (s, 1, first.get(s, Fraction(0)), i, t.get(s, Fraction(0))), tables,
                                     ["components disagree, so the density does not exist"])
    values = {s: first.get(s, Fraction(0)) for s in symbols}
    return DensityReport(along, "natural", symbols, values, True, None, tables,
                         [f"common value of {len(tables)} component(s)"])


def natural_density_along(a, along, dec=None):
    dec = decompose(a) if dec is None else dec
    return _natural(dec, along, component_tables(dec, along))


def _log(dec, along, tables, eps=None):
    symbols = _symbols(dec)
    weights = [logdensity_set(c.indicator) if eps is None else logdensity_set(c.indicator, eps)
               for c in dec.components]
    values = {}
    for s in symbols:
        total = LogLinearValue.rational(0, dec.base)
        for w, t in zip(weights, tables):
            v = t.get(s, Fraction(0))
            if v:
                total = total + w.scaled(v)
        values[s] = total.in_base(dec.original_base)
    notes = [f"component {c.index}: d_log(M) = {w}" for c, w in zip(dec.components, weights)]
    return DensityReport(along, "logarithmic", symbols, values, None, None, tables, notes)


def transfer_logdensity(a, along, dec=None, eps=None):
    """Logarithmic density along ``along``: sum_i d_log(M_i) d(b_i(n_l), alpha)."""
    dec = decompose(a) if dec is None else dec
    return _log(dec, along, component_tables(dec, along), eps)


def density_reports(a, along, eps=None):
    """Natural and logarithmic reports sharing one decomposition."""
    dec = decompose(a)
    tables = component_tables(dec, along)
    return _natural(dec, along, tables), _log(dec, along, tables, eps)


def is_primitive_component(b):
    comps = sccs(b)
    return len(comps) == 1 and b.is_prolongable()
