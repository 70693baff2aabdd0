import math

import pytest

from klooster import multipliers as mult
from klooster.exact_formula import (
    NU,
    mock_theta_coefficient,
    mock_theta_coefficients,
    qseries_oracle,
    series_terms,
    tail_R3,
)
from klooster.special import bessel_I

# gamma(q) = sum_n q^{n^2} (q;q)_n / (q^3;q^3)_n, expanded by hand for n <= 6
HAND = [1, 1, -1, 0, 2, -2, -1]
NS = list(range(1, 26))


@pytest.fixture(scope="module")
def at_1e4(sum_cache):
    return mock_theta_coefficients(NS, 10_000, cache=sum_cache)


@pytest.fixture(scope="module")
def at_2e4(sum_cache):
    return mock_theta_coefficients(NS, 20_000, cache=sum_cache)


def test_oracle_first_terms():
    assert qseries_oracle(6) == HAND
    oracle = qseries_oracle(200)
    assert all(isinstance(g, int) for g in oracle)
    assert oracle[:7] == HAND


def test_oracle_against_naive_expansion():
    N = 40
    def mul(p, q):
        out = [0] * N
        for i, a in enumerate(p):
            if a:
                for j, b in enumerate(q[:N - i]):
                    out[i + j] += a * b
        return out

    def inv_one_minus(k):  # 1 / (1 - q^k)
        return [1 if i % k == 0 else 0 for i in range(N)]

    total = [0] * N
    n = 0
    while n * n < N:
        term = [0] * N
        term[n * n] = 1
        for j in range(1, n + 1):
            term = mul(term, [1] + [0] * (j - 1) + [-1] + [0] * (N - j - 1))
            term = mul(term, inv_one_minus(3 * j))
        total = [a + b for a, b in zip(total, term)]
        n += 1
    assert qseries_oracle(N - 1) == total


def test_tilde_identity():
    al = mult.alpha(NU)
    assert all(24 * al.tilde(n) == 24 * n - 1 for n in range(1, 100))
    assert NU.level == 3


def test_argument_checks():
    with pytest.raises(ValueError):
        mock_theta_coefficient(0, 100)
    with pytest.raises(ValueError):
        mock_theta_coefficient(3, 2)


def test_small_cutoff_already_rounds_correctly():
    oracle = qseries_oracle(12)
    for r in mock_theta_coefficients(list(range(1, 13)), 1000):
        assert r.nearest_int == oracle[r.n]
        assert 0 <= r.distance <= 0.5
        assert r.cutoff == 1000


def test_matches_qseries(at_1e4):
    oracle = qseries_oracle(25)
    assert [r.nearest_int for r in at_1e4] == oracle[1:]


def test_imaginary_part_vanishes(at_1e4):
    for r in at_1e4:
        assert abs(r.imag) < 1e-6 * max(1, abs(r.value))


def test_integer_proximity(at_1e4):
    worst = max(at_1e4, key=lambda r: r.distance)
    assert worst.distance < 1e-2, f"n={worst.n}: distance {worst.distance:.4f}"


def test_rounding_stable_when_cutoff_doubles(at_1e4, at_2e4):
    assert [r.nearest_int for r in at_1e4] == [r.nearest_int for r in at_2e4]


def test_value_stable_when_cutoff_doubles(at_1e4, at_2e4):
    worst = max(abs(a.value - b.value) for a, b in zip(at_1e4, at_2e4))
    assert worst < 1e-3


def test_tail_consistency(at_1e4):
    r = at_1e4[4]
    head = mock_theta_coefficient(r.n, 3000)
    assert abs(head.value + tail_R3(r.n, 3000, 10_000) - r.value) < 1e-12


def test_tail_trivial_and_reported():
    assert tail_R3(10, 100, 100) == 0
    assert tail_R3(10, 200, 100) == 0
    for n in (10, 20, 40, 80):
        assert math.isfinite(tail_R3(n, math.sqrt(n), 10_000))


def test_bessel_argument_small_in_tail():
    for n in (1, 10, 25, 80):
        z = lambda c: math.pi * math.sqrt(24 * n - 1) / (6 * c)
        c0 = math.pi * math.sqrt(24 * n) / 6
        cs = [c for c in range(3, 3000, 3) if c > c0]
        assert all(z(c) < 1 for c in cs)
        vals = [bessel_I(0.5, z(c)) for c in cs]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_series_terms_shape():
    cs, terms = series_terms([1, 2], 30)
    assert list(cs) == list(range(3, 31, 3))
    assert terms.shape == (10, 2)
