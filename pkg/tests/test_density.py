from fractions import Fraction
from math import log

import mpmath
import numpy as np
import pytest

from autodens import ratlinalg as la
from autodens.density import (DEFAULT_EPS, LogLinearValue, logdensity_set, primitive_density,
                              state_density_limits)
from autodens.dfao import Dfao
from autodens.errors import DensityError
from autodens.structure import decompose, generator_levels, generators
from autodens.verify import VectorEvaluator

from conftest import CORPUS, corpus

ALL_N = Dfao(3, ["z", "y"], "z", {"z": ("z", "y", "y"), "y": ("y",) * 3}, {"z": 0, "y": 1})


def component(dec, test):
    return next(c for c in dec.components if test(c))


def test_primitive_density_paperfolding():
    states, outs = primitive_density(corpus("paperfolding"))
    assert set(states.values()) == {Fraction(1, 4)}
    assert outs == {"0": Fraction(1, 2), "1": Fraction(1, 2)}


def test_primitive_density_constant_and_thuemorse():
    c = Dfao(2, ["x"], "x", {"x": ("x", "x")}, {"x": "7"})
    assert primitive_density(c) == ({"x": 1}, {"7": 1})
    states, outs = primitive_density(corpus("thuemorse"))
    assert set(states.values()) == {Fraction(1, 2)} and set(outs.values()) == {Fraction(1, 2)}


def test_primitive_density_rejects_non_primitive():
    with pytest.raises(DensityError):
        primitive_density(corpus("threestate"))


def test_state_density_limits_paperfolding():
    t = state_density_limits(decompose(corpus("paperfolding")))
    assert all(t.values[1][q] == 1 for q in t.states)


def test_state_density_limits_threestate():
    dec = decompose(corpus("threestate"))
    t = state_density_limits(dec)
    j = dec.joint
    start = j.initial
    assert t.values[1][start] == Fraction(1, 2) and t.values[2][start] == Fraction(1, 2)
    lead1 = j.delta[start][1]
    lead2 = j.delta[start][2]
    i1 = j.output[lead1]
    assert t.values[i1][lead1] == 1 and t.values[3 - i1][lead1] == 0
    assert t.values[3 - i1][lead2] == 1


def _interval_fraction(ind, m, k, nu):
    ev = VectorEvaluator(ind)
    acc = np.array([s in (1, "1") for s in ev.symbols])
    block = np.arange(m * k**nu, (m + 1) * k**nu, dtype=np.int64)
    return Fraction(int(acc[ev.symbol_indices(block)].sum()), k**nu)


def test_state_density_limits_hundred_counting():
    dec = decompose(corpus("hundred"))
    t = state_density_limits(dec)
    j = dec.joint
    q = j.delta[j.initial][1]
    one = component(dec, lambda c: c.dfao.output[c.dfao.initial] == "1")
    d = t.values[one.index][q]
    # the subtree below "1" meets M_2 exactly along 1 0^z 1: sum_{l >= 1} 3**-l ... = 1/2
    assert d == Fraction(1, 2)
    f11 = _interval_fraction(one.indicator, 1, 3, 11)
    f12 = _interval_fraction(one.indicator, 1, 3, 12)
    assert f11 <= f12 <= d and d - f12 < Fraction(1, 10**5)


def test_projection_identities():
    for name in CORPUS:
        t = state_density_limits(decompose(corpus(name)))
        p, b = t.projection, t.matrix
        assert la.matmul(p, p) == p and la.matmul(p, b) == p and la.matmul(b, p) == p
        for q in t.states:
            assert sum(t.values[i][q] for i in t.values if i) == 1


def test_d_iq_monotone_sandwich():
    for name in ("threestate", "hundred", "leading3"):
        dec = decompose(corpus(name))
        t = state_density_limits(dec)
        k = dec.base
        for c in dec.components:
            for m in range(1, 9):
                q = dec.joint.run(dec.joint.initial, [int(x) for x in np.base_repr(m, k)])
                prev = Fraction(0)
                for nu in range(5, 9):
                    f = _interval_fraction(c.indicator, m, k, nu)
                    assert prev <= f <= t.values[c.index][q]
                    prev = f


def test_logdensity_all_n():
    v = logdensity_set(ALL_N)
    assert v.exact and v.as_rational() == 1


def test_logdensity_threestate_m1():
    dec = decompose(corpus("threestate"))
    m1 = component(dec, lambda c: c.indicator(1) in (1, "1"))
    v = logdensity_set(m1.indicator)
    assert v.exact and v.terms == ((Fraction(1), Fraction(2)),) and v.base == 3
    assert v.lo <= Fraction(log(2) / log(3)) <= v.hi or abs(float(v) - log(2) / log(3)) < 1e-15


def test_logdensity_hundred_enclosure():
    dec = decompose(corpus("hundred"))
    m2 = component(dec, lambda c: c.dfao.output[c.dfao.initial] == "1")
    v = logdensity_set(m2.indicator, Fraction(1, 10**9))
    assert not v.exact and v.width <= Fraction(1, 10**9)
    with mpmath.workdps(40):
        total = mpmath.fsum(mpmath.log1p(1 / (mpmath.mpf(3) ** l + 1)) for l in range(1, 120))
        ref = float(total / mpmath.log(3))
    assert float(v.lo) - 1e-15 <= ref <= float(v.hi) + 1e-15


def test_logdensity_bad_eps():
    with pytest.raises(DensityError):
        logdensity_set(ALL_N, 0)
    assert DEFAULT_EPS == Fraction(1, 2**30)


def test_enclosure_contains_bruteforce_partial_sums():
    # partial sums over generators below 10**6 never exceed the upper end, and
    # adding the pending-count tail bound reaches the lower end
    for name in ("threestate", "hundred", "leading3"):
        dec = decompose(corpus(name))
        for c in dec.components:
            m = c.indicator
            k = m.base
            v = logdensity_set(m)
            depth = 0
            while k ** (depth + 1) <= 10**6:
                depth += 1
            rep = generators(m, depth)
            partial = sum(log(1 + 1 / x) for x in rep.elements if x) / log(k)
            tail = rep.pending_counts[-1] / k ** (depth - 1) / log(k)
            assert partial <= float(v.hi) + 1e-12
            assert partial + tail >= float(v.lo) - 1e-12


def test_component_log_densities_sum_to_one():
    for name in CORPUS:
        dec = decompose(corpus(name))
        total = sum((logdensity_set(c.indicator) for c in dec.components),
                    LogLinearValue.rational(0, dec.base))
        assert total.lo - Fraction(1, 10**8) <= 1 <= total.hi + Fraction(1, 10**8)
        for c in dec.components:
            assert logdensity_set(c.indicator).lo > 0


def test_loglinear_float_in_enclosure():
    v = LogLinearValue.make(0, [(1, 2), (Fraction(-1, 3), 5)], 7)
    assert v.lo <= Fraction(float(v)) <= v.hi or v.hi - v.lo < Fraction(1, 10**30)
    assert abs(float(v) - (log(2) - log(5) / 3) / log(7)) < 1e-14


def test_loglinear_rational_and_base_change():
    v = LogLinearValue.rational(Fraction(1, 2), 9)
    assert v.as_rational() == Fraction(1, 2)
    w = v.in_base(3)
    assert w.base == 3 and w.as_rational() == Fraction(1, 2)
    assert str(w) == "1/2"


def test_loglinear_json():
    v = LogLinearValue.make(0, [(1, 2)], 3)
    j = v.to_json()
    assert j["c0"] == "0" and j["terms"] == [["1", "2"]] and j["base"] == 3 and j["exact"] is True
    lo, hi = (Fraction(x) for x in j["enclosure"])
    assert lo <= hi


def test_generator_levels_stream_restartable():
    dec = decompose(corpus("hundred"))
    m2 = component(dec, lambda c: c.dfao.output[c.dfao.initial] == "1")
    a = [next(generator_levels(m2.indicator))[0] for _ in range(2)]
    assert a[0] == a[1]
