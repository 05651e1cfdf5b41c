from fractions import Fraction
from math import gcd, log

import pytest

from autodens.density import primitive_density
from autodens.errors import InputError, UnsupportedError
from autodens.mullner import mullner_decompose
from autodens.subseq import (NATURALS, PRIMES, SQUARES, SubsequenceKind, ap_average_density,
                             component_tables, coprime, coprime_density, density_reports,
                             natural_density_along, prime_density, qr_count, square_density,
                             transfer_logdensity)
from autodens.structure import decompose
from autodens.verify import empirical_density

from conftest import CORPUS, corpus

PRIMITIVE = ("paperfolding", "thuemorse", "parity3", "rudinshapiro", "cyclic3")


def brute_qr(m, h):
    return Fraction(sum(1 for x in range(h) if (x * x - m) % h == 0), h)


def test_qr_count_examples():
    assert qr_count(0, 1) == 1
    assert qr_count(1, 8) == Fraction(1, 2)
    assert qr_count(1, 243) == Fraction(2, 243)
    assert qr_count(2, 3) == 0


@pytest.mark.parametrize("h", [4, 8, 9, 12, 16, 27, 32, 45, 64, 72, 81, 100, 125, 128, 243, 256, 343])
def test_qr_count_bruteforce(h):
    # covers the lifting branch for odd and even prime powers
    for m in range(h):
        assert qr_count(m, h) == brute_qr(m, h)
    assert qr_count(h + 1, h) == qr_count(1, h)


def test_qr_count_bad_modulus():
    with pytest.raises(InputError):
        qr_count(1, 0)


def test_kind_parse():
    assert SubsequenceKind.parse("coprime=6") == coprime(6)
    assert str(coprime(6)) == "coprime=6" and SQUARES.beta == Fraction(1, 2)
    for bad in ("evens", "coprime", "coprime=x", "coprime=1"):
        with pytest.raises(InputError):
            SubsequenceKind.parse(bad)


def test_ap_average_density():
    pf = corpus("paperfolding")
    # constant on 4n and 4n + 2 with the corpus indexing
    assert {pf(4 * n) for n in range(500)} == {"1"} and {pf(4 * n + 2) for n in range(500)} == {"0"}
    assert ap_average_density(pf, 4, [0]) == {"1": 1}
    assert ap_average_density(pf, 4, [2]) == {"0": 1}
    assert ap_average_density(pf, 4, [0, 2]) == {"1": Fraction(1, 2), "0": Fraction(1, 2)}
    with pytest.raises(UnsupportedError):
        ap_average_density(pf, 4, [])


def test_prime_density_examples():
    assert prime_density(decompose(corpus("paperfolding")).components[0].dfao) == \
        {"0": Fraction(1, 2), "1": Fraction(1, 2)}
    assert {s: v for s, v in prime_density(corpus("parity3")).items() if v} == {"1": 1}
    assert prime_density(corpus("thuemorse")) == {"0": Fraction(1, 2), "1": Fraction(1, 2)}


def test_coprime_examples():
    par = corpus("parity3")
    assert {s: v for s, v in coprime_density(par, 6).items() if v} == {"1": 1}
    tm = corpus("thuemorse")
    got = coprime_density(tm, 2)
    odd = [n for n in range(1, 10**5, 2)]
    ones = sum(1 for n in odd if bin(n).count("1") % 2)
    assert abs(float(got["1"]) - ones / len(odd)) < 0.005


def _squares_direct(a, limit):
    counts = {}
    for n in range(limit):
        s = a(n * n)
        counts[s] = counts.get(s, 0) + 1
    return {s: c / limit for s, c in counts.items()}


def test_square_density_examples():
    assert square_density(decompose(corpus("paperfolding")).components[0].dfao).get("1") == 1
    tm = square_density(corpus("thuemorse"))
    assert tm == {"0": Fraction(1, 2), "1": Fraction(1, 2)}
    par = corpus("parity3")
    assert square_density(par) == {"0": Fraction(1, 2), "1": Fraction(1, 2)}
    direct = _squares_direct(par, 3000)
    assert abs(direct["1"] - 0.5) < 0.001


@pytest.mark.parametrize("name", PRIMITIVE)
@pytest.mark.parametrize("along", [PRIMES, SQUARES, coprime(3), coprime(10)], ids=str)
def test_primitive_tables_against_counting(name, along):
    # Thue-Morse along primes and along n = 1, 2 mod 3 carries a Newman-type
    # bias decaying like a small power of N
    tol = 0.05 if name == "thuemorse" and along in (PRIMES, coprime(3)) else 0.01
    a = corpus(name)
    rep = natural_density_along(a, along)
    assert rep.exists
    emp = empirical_density(a, along, 400_000)
    for s in rep.symbols:
        assert abs(float(rep.values[s]) - emp.frequency(s)) < tol, (s, rep.values[s], emp.frequency(s))


def test_tables_sum_to_one():
    for name in CORPUS:
        dec = decompose(corpus(name))
        for along in (NATURALS, PRIMES, coprime(4)):
            for t in component_tables(dec, along):
                assert sum(t.values()) == 1
        if dec.base in (2, 3, 4, 9):
            for t in component_tables(dec, SQUARES):
                assert sum(t.values()) == 1


def test_modulus_overshoot_invariance():
    # averaging over a multiple of the modulus gives the same numbers
    for name in ("paperfolding", "cyclic3", "parity3"):
        b = decompose(corpus(name)).components[0].dfao
        md = mullner_decompose(b)
        m = b.base * md.d
        base = prime_density(b, md)
        for t in (2, 3):
            mt = m * t
            got = ap_average_density(b, mt, [r for r in range(mt) if gcd(r, mt) == 1])
            assert {s: v for s, v in got.items() if v} == {s: v for s, v in base.items() if v}


def test_squares_base6_unsupported():
    with pytest.raises(UnsupportedError, match="squares unsupported for base 6"):
        natural_density_along(corpus("parity6"), SQUARES)


def test_natural_along_general():
    rep = natural_density_along(corpus("threestate"), NATURALS)
    assert rep.exists and rep.values["b"] == Fraction(1, 2)
    rep = natural_density_along(corpus("threestate"), PRIMES)
    assert not rep.exists and rep.witness is not None
    rep = natural_density_along(corpus("hundred"), NATURALS)
    assert not rep.exists
    assert rep.to_json()["values"] is None


def test_transfer_logdensity_examples():
    ln23 = log(2) / log(3)
    rep = transfer_logdensity(corpus("threestate"), PRIMES)
    assert abs(float(rep.values["b"]) - ln23) < 1e-12 and rep.values["b"].exact
    for along in (NATURALS, PRIMES, SQUARES):
        rep = transfer_logdensity(corpus("leading3"), along)
        for alpha in (1, 2):
            want = log(1 + 1 / alpha) / log(3)
            assert abs(float(rep.values[str(alpha)]) - want) < 1e-12
    rep = transfer_logdensity(corpus("paperfolding"), SQUARES)
    assert rep.values["1"].as_rational() == 1


def test_log_agrees_with_natural_when_it_exists():
    for name in CORPUS:
        nat, lg = density_reports(corpus(name), PRIMES)
        if nat.exists:
            for s in nat.symbols:
                v = lg.values[s]
                assert v.lo - Fraction(1, 10**8) <= nat.values[s] <= v.hi + Fraction(1, 10**8)


def test_report_json_shape():
    nat, lg = density_reports(corpus("threestate"), PRIMES)
    j = nat.to_json()
    assert j["exists"] is False and j["witness"]["symbol"] in ("b", "c")
    lj = lg.to_json()
    assert lj["mode"] == "logarithmic" and set(lj["values"]) == {"a", "b", "c"}


def test_naturals_match_primitive_density():
    for name in PRIMITIVE:
        b = decompose(corpus(name)).components[0].dfao
        assert natural_density_along(corpus(name), NATURALS).values == \
            {s: v for s, v in primitive_density(b)[1].items()} | \
            {s: 0 for s in natural_density_along(corpus(name), NATURALS).values
             if s not in primitive_density(b)[1]}
