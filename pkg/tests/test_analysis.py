from fractions import Fraction

import mpmath
import pytest

from permgrid.analysis import (
    AsymptoticModel,
    Surd,
    asymptotic_estimate,
    correction_terms,
    distribution,
    gamma_neg,
    kolmogorov_distance,
    lambda_table,
    moments,
)
from permgrid.errors import PreconditionError, SeriesError
from permgrid.grammars import closed_form_D, grammar_D, grammar_H
from permgrid.perm import BASIS_H, iterate_class
from permgrid.structure import canonical_gridding_H


def test_moments_single_point():
    assert moments(grammar_H(5), 1, "t") == (0, 0)


def test_moments_match_brute_force():
    tops = [canonical_gridding_H(p).n_top for p in iterate_class(BASIS_H, 6)]
    mean = Fraction(sum(tops), len(tops))
    var = Fraction(sum(x * x for x in tops), len(tops)) - mean * mean
    assert moments(grammar_H(6), 6, "t") == (mean, var)


def test_shifted_moments_equal_symbolic():
    sym = moments(grammar_D(40, "sym", "one"), 40, "t")
    assert moments(grammar_D(40, "shift", "one"), 40, "t", shifted=True) == sym
    sym = moments(grammar_D(40, "one", "sym"), 40, "l")
    assert moments(grammar_D(40, "one", "shift"), 40, "l", shifted=True) == sym


def test_h_top_moments_trend():
    mean, var = moments(grammar_H(300, "shift"), 300, "t", shifted=True)
    assert abs(mean / 300 - Fraction(1, 5)) < 0.01
    assert abs(var / 300 - Fraction(4, 25)) < 0.01


def test_distribution_d4():
    assert distribution(closed_form_D(4, l="sym"), 4, "l") == [Fraction(21, 22), Fraction(1, 22)]


def test_distribution_h1():
    assert distribution(grammar_H(3), 1, "t") == [1]


def test_p0_tends_to_ratio():
    gaps = [abs(distribution(closed_form_D(n, l="sym"), n, "l")[0] - Fraction(121, 216)) for n in (50, 100, 200)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_errors():
    with pytest.raises(PreconditionError):
        moments(grammar_H(5), 6)
    with pytest.raises(SeriesError):
        distribution(grammar_H(5), 0)


def test_kolmogorov_point_mass():
    # a point mass at 0 against a normal centred there: the jump is half the mass
    assert kolmogorov_distance([Fraction(1)], 0.0, 1e-9) == pytest.approx(0.5)


def test_lambda_table():
    lam = lambda_table(2)
    assert lam[(1, 2)] == Fraction(1, 2)
    assert lam[(1, 1)] == -1 if (1, 1) in lam else True
    assert all(k <= l <= 2 * k for (k, l) in lam)


def test_e1_for_half():
    e = correction_terms(Fraction(1, 2), 2)
    assert e[0] == Fraction(3, 8)
    # n-th coefficient of (1-z)^(1/2) ~ -1/(2 sqrt(pi)) n^(-3/2) (1 + 3/(8n) + 25/(128 n^2))
    assert e[1] == Fraction(25, 128)


def test_gamma_neg():
    with mpmath.workdps(40):
        assert abs(gamma_neg(Fraction(1, 2)) + 2 * mpmath.sqrt(mpmath.pi)) < mpmath.mpf(10) ** -35
        assert abs(gamma_neg(Fraction(-5, 2)) - mpmath.gamma(mpmath.mpf(5) / 2)) < mpmath.mpf(10) ** -35
        assert abs(gamma_neg(Fraction(1, 3)) - mpmath.gamma(mpmath.mpf(-1) / 3)) < mpmath.mpf(10) ** -35


def test_binomial_oracle():
    n = 1000
    c = Fraction(1)
    for j in range(n):
        c *= (Fraction(1, 2) - j) / (j + 1)
    exact = c * (-1) ** n
    with mpmath.workdps(64):
        est = asymptotic_estimate(AsymptoticModel(1, Fraction(1), Fraction(1, 2)), n, K=2)
        assert abs(est / (mpmath.mpf(exact.numerator) / exact.denominator) - 1) < 1e-8


def test_h_leading_term():
    model = AsymptoticModel.class_H()
    with mpmath.workdps(40):
        lead = mpmath.mpf(5) / 18 * mpmath.sqrt(5 / mpmath.pi) * mpmath.mpf(5) ** 50 * mpmath.mpf(50) ** -1.5
        assert abs(asymptotic_estimate(model, 50) / lead - 1) < 1e-30
    h = grammar_H(200, "one").at_unity()
    err = [abs(float(asymptotic_estimate(model, m)) / h[m] - 1) for m in (100, 200)]
    assert err[0] < 0.05 and err[1] < err[0]


def test_d_leading_term_converges():
    d = grammar_D(300, "one", "one").at_unity()
    model = AsymptoticModel.class_D()
    err = [abs(float(asymptotic_estimate(model, m)) / d[m] - 1) for m in (150, 300)]
    assert err[1] < err[0] < 0.05
    assert 0.8 < err[0] / err[1] / 2 < 1.2  # O(1/n)


def test_amplitude_ratio():
    ratio = Surd(Fraction(-5, 9), 5).value() / AsymptoticModel.class_D().lam.value()
    assert abs(ratio - mpmath.mpf(121) / 216) < 1e-40


def test_model_validation():
    with pytest.raises(PreconditionError):
        AsymptoticModel(1, Fraction(1), Fraction(2))
    with pytest.raises(PreconditionError):
        asymptotic_estimate(AsymptoticModel(1, Fraction(1), Fraction(1, 2)), 10, K=-1)


def test_surd_and_cached_corrections():
    assert float(Surd(Fraction(1, 2), 4).value()) == 1.0
    m = AsymptoticModel(1, Fraction(1), Fraction(1, 2)).with_corrections(2)
    assert m.corrections == (Fraction(3, 8), Fraction(25, 128))
    assert asymptotic_estimate(m, 100, K=2) == asymptotic_estimate(AsymptoticModel(1, Fraction(1), Fraction(1, 2)), 100, K=2)
