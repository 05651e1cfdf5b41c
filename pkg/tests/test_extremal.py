import random
from fractions import Fraction

import numpy as np
import pytest

from autodens.errors import ExtremalError
from autodens.extremal import (ExtremalProblem, build_problem, extremal_densities, lower_density,
                               string_value, upper_density)
from autodens.subseq import NATURALS, PRIMES, SQUARES, natural_density_along
from autodens.verify import VectorEvaluator

from conftest import CORPUS, corpus


def test_threestate_primes():
    up, lo = extremal_densities(corpus("threestate"), PRIMES, "b")
    assert (up.value, lo.value) == (Fraction(3, 4), Fraction(1, 2))
    assert up.certified and lo.certified


def test_paperfolding_primes():
    up, lo = extremal_densities(corpus("paperfolding"), PRIMES, "1")
    assert up.value == lo.value == Fraction(1, 2)


@pytest.mark.parametrize("name,alpha,upper,lower", [
    ("hundred", "0", Fraction(3, 4), Fraction(11, 20)),
    ("hundred", "1", Fraction(9, 20), Fraction(1, 4)),
    ("leading3", "1", Fraction(3, 4), Fraction(1, 2)),
    ("leading3", "2", Fraction(1, 2), Fraction(1, 4)),
])
def test_frozen_values(name, alpha, upper, lower):
    up, lo = extremal_densities(corpus(name), NATURALS, alpha)
    assert (up.value, lo.value) == (upper, lower)


def test_absent_symbol_has_zero_density():
    up, lo = extremal_densities(corpus("threestate"), PRIMES, "zzz")
    assert up.value == 0 and lo.value == 0


def test_all_zero_and_all_one_weights():
    p = build_problem(corpus("hundred"), NATURALS, "0")
    zero = ExtremalProblem(p.automaton, {q: Fraction(0) for q in p.weights})
    assert upper_density(zero).value == 0
    one = ExtremalProblem(p.automaton, {q: Fraction(1) for q in p.weights})
    assert lower_density(one).value == 1 and upper_density(one).value == 1


def test_squares_rejected():
    with pytest.raises(ExtremalError):
        build_problem(corpus("thuemorse"), SQUARES, "1")


def random_string(rng, k):
    pre = [rng.randrange(k) for _ in range(rng.randrange(0, 6))]
    per = [rng.randrange(k) for _ in range(rng.randrange(1, 4))]
    return pre, per


@pytest.mark.parametrize("name", ["threestate", "hundred", "leading3", "fivestate"])
def test_sandwich_random_strings(name):
    rng = random.Random(11)
    a = corpus(name)
    syms = sorted({a.output[q] for q in a.states}, key=str)
    for alpha in syms:
        p = build_problem(a, PRIMES, alpha)
        up, lo = upper_density(p), lower_density(p)
        assert lo.value <= up.value
        k = p.base
        for _ in range(150):
            pre, per = random_string(rng, k)
            num, den = string_value(p, pre, per)
            if den:
                assert lo.value <= num / den <= up.value
        for pre in ([1], [2, 0, 1], [1, 1, 1, 1]):
            pre = [c % k for c in pre]
            num, den = string_value(p, pre, [0])
            if den:
                assert lo.value <= num / den <= up.value


def test_optimal_strings_attain_values():
    for name in CORPUS:
        a = corpus(name)
        for alpha in sorted({a.output[q] for q in a.states}, key=str):
            p = build_problem(a, PRIMES, alpha)
            for r in (upper_density(p), lower_density(p)):
                assert r.certified
                num, den = string_value(p, r.preperiod, r.period)
                if den and any(p.weights.values()):
                    assert r.policy_ratio == r.value


def test_existence_consistency():
    # upper = lower exactly when the natural density exists
    for name in CORPUS:
        a = corpus(name)
        rep = natural_density_along(a, PRIMES)
        for alpha in rep.symbols:
            up, lo = extremal_densities(a, PRIMES, alpha)
            if rep.exists:
                assert up.value == lo.value == rep.values[alpha]
    assert any(extremal_densities(corpus("threestate"), PRIMES, s)[0].value !=
               extremal_densities(corpus("threestate"), PRIMES, s)[1].value for s in "bc")


def test_monotone_in_weights():
    p = build_problem(corpus("hundred"), NATURALS, "1")
    base = upper_density(p).value
    rng = random.Random(3)
    for _ in range(5):
        w = {q: min(Fraction(1), v + Fraction(rng.randrange(0, 3), 10)) for q, v in p.weights.items()}
        assert upper_density(ExtremalProblem(p.automaton, w)).value >= base


def test_naturals_prefix_counts_inside_bounds():
    # frequencies over [0, N) for N near the extremal strings stay within tolerance
    a = corpus("leading3")
    ev = VectorEvaluator(a)
    vals = ev(np.arange(2 * 3**12))
    ones = np.cumsum([v == "1" for v in vals])
    up, lo = extremal_densities(a, NATURALS, "1")
    for n in (3**12, 2 * 3**12):
        f = ones[n - 1] / n
        assert float(lo.value) - 0.02 <= f <= float(up.value) + 0.02
    assert abs(ones[2 * 3**12 - 1] / (2 * 3**12) - 0.75) < 0.01
    assert abs(ones[3**12 - 1] / 3**12 - 0.5) < 0.01
