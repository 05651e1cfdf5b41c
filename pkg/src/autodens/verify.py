"""Brute-force oracle: evaluate the sequence along a subsequence and tally.

Evaluation is vectorized with numpy. The automaton is zero-normalized first,
so every value in a chunk can be read with the same number of (padded)
digits.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, log

import numpy as np

from .density import LogLinearValue, frac_str
from .dfao import normalize_zero
from .errors import InputError, VerifyError

CHUNK = 1 << 18
SEGMENT = 1 << 20
_INT_LIMIT = 2**62


# ---------------------------------------------------------------------------
# Primes


def _small_primes(limit):
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def prime_segments(limit, segment=SEGMENT):
    """Arrays of the primes <= limit, one per segment, in ascending order."""
    if limit < 2:
        return
    base = _small_primes(isqrt(limit))
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, (lo + p - 1) // p * p)
            flags[start - lo::p] = False
        yield np.nonzero(flags)[0].astype(np.int64) + lo
        lo = hi


def sieve_primes(limit):
    """Stream of the primes <= limit."""
    for seg in prime_segments(limit):
        yield from (int(p) for p in seg)


def _nth_prime_bound(n):
    if n < 6:
        return 13
    return int(n * (log(n) + log(log(n)))) + 3


# ---------------------------------------------------------------------------
# Subsequences as chunks of (index, value) arrays


def _ranges(first, last, chunk):
    lo = first
    while lo <= last:
        hi = min(lo + chunk - 1, last)
        yield np.arange(lo, hi + 1, dtype=np.int64)
        lo = hi + 1


def _coprime_nth(idx, modulus, residues):
    res = np.array(residues, dtype=np.int64)
    q, r = np.divmod(idx - 1, len(residues))
    return q * modulus + res[r]


def subsequence_chunks(along, limit, by="index", start=0, chunk=CHUNK):
    """Yield (l, n_l) arrays for start < l <= limit (by index) or for the
    elements n_l <= limit (by value, where ``start`` bounds n_l from below)."""
    if by not in ("index", "value"):
        raise InputError(f"unknown bound type {by!r}")
    kind = along.kind
    if kind == "naturals":
        hi = limit
        for idx in _ranges(start + 1, hi, chunk):
            yield idx, idx
    elif kind == "squares":
        if by == "value":
            last, first = isqrt(limit), isqrt(start) + 1
        else:
            last, first = limit, start + 1
        if last * last >= _INT_LIMIT:
            raise VerifyError(f"squares up to index {last} overflow 64-bit integers")
        for idx in _ranges(first, last, chunk):
            yield idx, idx * idx
    elif kind == "coprime":
        m = along.modulus
        residues = [r for r in range(1, m + 1) if gcd(r, m) == 1]
        if by == "value":
            count = lambda x: x // m * len(residues) + sum(1 for r in residues if r <= x % m)
            first, last = count(start) + 1, count(limit)
        else:
            first, last = start + 1, limit
        for idx in _ranges(first, last, chunk):
            yield idx, _coprime_nth(idx, m, residues)
    else:
        bound = limit if by == "value" else _nth_prime_bound(limit)
        if bound >= _INT_LIMIT:
            raise VerifyError("prime bound overflows 64-bit integers")
        seen = 0
        for seg in prime_segments(bound):
            idx = np.arange(seen + 1, seen + len(seg) + 1, dtype=np.int64)
            seen += len(seg)
            keep = (seg > start) if by == "value" else (idx > start) & (idx <= limit)
            if keep.any():
                yield idx[keep], seg[keep]
            if by == "index" and seen >= limit:
                break


# ---------------------------------------------------------------------------
# Vectorized evaluation


class VectorEvaluator:
    """Evaluate a DFAO on numpy arrays of nonnegative integers."""

    def __init__(self, a):
        a = normalize_zero(a)
        self.base = a.base
        self.symbols = sorted({a.output[q] for q in a.states}, key=str)
        sym_index = {s: i for i, s in enumerate(self.symbols)}
        self.table = np.array([[a.index(t) for t in a.delta[q]] for q in a.states],
                              dtype=np.int64)
        self.out = np.array([sym_index[a.output[q]] for q in a.states], dtype=np.int64)
        self.initial = a.index(a.initial)

    def states(self, values):
        values = np.asarray(values, dtype=np.int64)
        if values.size == 0:
            return values.copy()
        top = int(values.max())
        if top >= _INT_LIMIT:
            raise VerifyError("value exceeds the 64-bit evaluation range")
        powers = []
        p = 1
        while p <= top:
            powers.append(p)
            p *= self.base
        state = np.full(values.shape, self.initial, dtype=np.int64)
        for p in reversed(powers):
            digit = (values // p) % self.base
            state = self.table[state, digit]
        return state

    def symbol_indices(self, values):
        return self.out[self.states(values)]

    def __call__(self, values):
        return [self.symbols[i] for i in self.symbol_indices(values)]


# ---------------------------------------------------------------------------
# Estimates


@dataclass
class EmpiricalEstimate:
    along: object
    limit: int
    by: str
    mode: str
    symbols: list
    counts: dict
    log_weights: dict
    seconds: float = 0.0
    start: int = 0

    @property
    def total(self):
        return sum(self.counts.values())

    @property
    def log_total(self):
        return sum(self.log_weights.values())

    def frequency(self, sym):
        t = self.total
        return self.counts.get(sym, 0) / t if t else 0.0

    def log_frequency(self, sym):
        t = self.log_total
        return self.log_weights.get(sym, 0.0) / t if t else 0.0

    def value(self, sym):
        return self.log_frequency(sym) if self.mode == "logarithmic" else self.frequency(sym)

    def merge(self, other):
        """Combine the tallies of two disjoint ranges."""
        if (str(self.along), self.by, self.mode) != (str(other.along), other.by, other.mode):
            raise VerifyError("cannot merge estimates of different kinds")
        symbols = sorted(set(self.symbols) | set(other.symbols), key=str)
        counts = {s: self.counts.get(s, 0) + other.counts.get(s, 0) for s in symbols}
        logs = {s: self.log_weights.get(s, 0.0) + other.log_weights.get(s, 0.0) for s in symbols}
        return EmpiricalEstimate(self.along, max(self.limit, other.limit), self.by, self.mode,
                                 symbols, counts, logs, self.seconds + other.seconds,
                                 min(self.start, other.start))

    def to_json(self):
        return {"along": str(self.along), "limit": self.limit, "by": self.by, "mode": self.mode,
                "samples": self.total,
                "counts": {str(s): self.counts[s] for s in self.symbols},
                "frequency": {str(s): self.frequency(s) for s in self.symbols},
                "log_frequency": {str(s): self.log_frequency(s) for s in self.symbols},
                "seconds": round(self.seconds, 3)}


def empirical_density(a, along, limit, mode="natural", by="index", start=0):
    """Tally a(n_l) for start < l <= limit (or start < n_l <= limit by value).

    Both the plain counts and the harmonic weights 1/l are accumulated; ``mode``
    only selects which one ``value`` and ``compare`` use.
    """
    if mode not in ("natural", "logarithmic"):
        raise InputError(f"unknown mode {mode!r}")
    if limit < 1:
        raise InputError("limit must be at least 1")
    t0 = time.perf_counter()
    ev = VectorEvaluator(a)
    n_sym = len(ev.symbols)
    counts = np.zeros(n_sym, dtype=np.int64)
    logs = [0.0] * n_sym
    for idx, vals in subsequence_chunks(along, limit, by, start):
        sym = ev.symbol_indices(vals)
        counts += np.bincount(sym, minlength=n_sym)
        w = np.bincount(sym, weights=1.0 / idx.astype(np.float64), minlength=n_sym)
        for i in range(n_sym):
            logs[i] += float(w[i])
    return EmpiricalEstimate(along, limit, by, mode, list(ev.symbols),
                             {s: int(c) for s, c in zip(ev.symbols, counts)},
                             dict(zip(ev.symbols, logs)), time.perf_counter() - t0, start)


# ---------------------------------------------------------------------------
# Comparison


@dataclass
class ComparisonRow:
    symbol: object
    exact: str
    center: float
    radius: float
    empirical: float
    diff: float
    ok: bool


@dataclass
class Comparison:
    passed: bool
    tol: Fraction
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"passed": self.passed, "tol": frac_str(self.tol),
                "rows": [{"symbol": str(r.symbol), "exact": r.exact, "empirical": r.empirical,
                          "diff": r.diff, "allowed": float(self.tol) + r.radius, "ok": r.ok}
                         for r in self.rows],
                "notes": list(self.notes)}

    def text(self):
        lines = [f"{'PASS' if self.passed else 'FAIL'} (tol {frac_str(self.tol)})"]
        for r in self.rows:
            lines.append(f"  {r.symbol}: exact {r.exact} ~ {r.center:.6f}, "
                         f"empirical {r.empirical:.6f}, diff {r.diff:.6f} "
                         f"{'ok' if r.ok else 'FAIL'}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def compare(exact, emp, tol):
    """Per-symbol check |exact - empirical| <= tol (plus the enclosure radius
    for logarithmic values)."""
    tol = Fraction(tol)
    if exact.mode != emp.mode:
        raise VerifyError(f"mode mismatch: exact {exact.mode}, empirical {emp.mode}")
    if str(exact.along) != str(emp.along):
        raise VerifyError(f"subsequence mismatch: {exact.along} vs {emp.along}")
    if exact.mode == "natural" and not exact.exists:
        return Comparison(False, tol, [], ["the natural density does not exist"])
    rows = []
    symbols = sorted(set(exact.values) | set(emp.symbols), key=str)
    for s in symbols:
        v = exact.values.get(s, Fraction(0))
        if isinstance(v, LogLinearValue):
            center, radius, shown = float(v.midpoint()), float(v.radius()), str(v)
        else:
            center, radius, shown = float(v), 0.0, frac_str(v)
        e = emp.value(s)
        diff = abs(center - e)
        rows.append(ComparisonRow(s, shown, center, radius, e, diff, diff <= float(tol) + radius))
    return Comparison(all(r.ok for r in rows), tol, rows)
