from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permgrid.errors import SeriesError
from permgrid.series import SPARSE_TERMS, Series, _multiply_kronecker, _multiply_sparse, solve_system, solve_tree

CATALAN = [0, 1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]


def naive_mul(a: Series, b: Series) -> Series:
    N = a.order
    ta, la = a.caps
    out = Series.zero(N, a.caps)
    for n in range(N + 1):
        for k in range(n + 1):
            for i in range(ta + 1):
                for j in range(la + 1):
                    x = a.coeffs[k, i, j]
                    if x:
                        for p in range(ta + 1 - i):
                            for q in range(la + 1 - j):
                                out.coeffs[n, i + p, j + q] += x * b.coeffs[n - k, p, q]
    return out


coef = st.integers(-10**30, 10**30)


def random_series(draw_terms, order, caps):
    return Series.from_terms(draw_terms, order, caps)


term_dicts = st.dictionaries(
    st.tuples(st.integers(0, 6), st.integers(0, 3), st.integers(0, 2)), coef, max_size=40)


class TestArithmetic:
    def test_seq_z(self):
        assert Series.z(8).seq().at_unity() == [1] * 9

    def test_seq_plus_squared(self):
        s = Series.z(6).seq_plus()
        assert (s * s).at_unity() == [0, 0, 1, 2, 3, 4, 5]

    def test_sqrt_example(self):
        z = Series.z(10)
        f = 1 - 6 * z + 5 * z * z
        r = f.sqrt()
        assert r.at_unity()[:3] == [1, -3, -2]
        assert r * r == f

    def test_sqrt_paths_agree(self):
        z = Series.z(30, (3, 0))
        t = Series.marker("t", 30, (3, 0))
        f = 1 - (2 * t + 4) * z + t * (t + 4) * z * z
        assert f.sqrt() == f.sqrt_newton()

    def test_sqrt_of_binomial(self):
        r = (1 - Series.z(12)).sqrt()
        want = [Fraction((-1) ** n) * _binom_half(n) for n in range(13)]
        assert r.at_unity() == want

    def test_sqrt_requires_unit_constant(self):
        with pytest.raises(SeriesError):
            (4 + Series.z(3)).sqrt()

    def test_invert(self):
        f = 1 - Series.z(10) - Series.z(10).shift(1)
        fib = f.invert().at_unity()
        assert fib == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
        assert f * f.invert() == Series.constant(1, 10)

    def test_invert_rational(self):
        g = (3 - Series.z(5)).invert()
        assert g.at_unity() == [Fraction(1, 3 ** (n + 1)) for n in range(6)]

    def test_invert_errors(self):
        with pytest.raises(SeriesError):
            Series.z(4).invert()
        with pytest.raises(SeriesError):
            (1 + Series.marker("t", 4, (1, 0))).invert()
        with pytest.raises(SeriesError):
            (1 + Series.z(4)).seq()

    def test_divide_by_marker_constant(self):
        t = Series.marker("t", 6, (6, 0))
        z = Series.z(6, (6, 0))
        num = (1 + t) * (1 - z).invert()
        assert num.divide(1 + t) == (1 - z).invert()
        with pytest.raises(SeriesError):
            Series.constant(1, 6, (6, 0)).divide(1 + t)

    def test_pow_and_shift(self):
        z = Series.z(6)
        assert ((1 + z) ** 4).at_unity() == [comb(4, k) for k in range(5)] + [0, 0]
        assert z.shift(2).at_unity() == [0, 0, 0, 1, 0, 0, 0]
        assert z.shift(2).shift(-3).order == 3
        with pytest.raises(SeriesError):
            z.shift(-2)

    def test_derivative_and_substitute(self):
        t = Series.marker("t", 4, (3, 0))
        z = Series.z(4, (3, 0))
        f = (t * z).seq()
        assert f.derivative("z").at_unity() == [1, 2, 3, 0]  # t^4 z^4 is past the t cap
        assert f.derivative("t").substitute(t=1).at_unity() == [0, 1, 2, 3, 0]
        assert f.substitute(t=2).at_unity() == [1, 2, 4, 8, 0]

    def test_truncation_respected(self):
        a = Series.z(3).seq()
        b = Series.z(5).seq()
        assert (a * b).order == 3

    @settings(max_examples=60, deadline=None)
    @given(term_dicts, term_dicts)
    def test_multiply_matches_naive(self, ta, tb):
        a, b = Series.from_terms(ta, 6, (3, 2)), Series.from_terms(tb, 6, (3, 2))
        want = naive_mul(a, b)
        assert a * b == want
        assert _multiply_kronecker(a, b) == want
        assert _multiply_sparse(a, b) == want

    def test_dense_product_uses_big_ints(self):
        a = Series.from_list([3 ** k for k in range(200)])
        assert a.nnz() > SPARSE_TERMS
        want = [sum(3 ** k * 3 ** (n - k) for k in range(n + 1)) for n in range(200)]
        assert (a * a).at_unity() == want

    def test_fractions_in_product(self):
        a = Series.from_list([Fraction(1, k + 1) for k in range(60)])
        prod = (a * a).at_unity()
        assert prod[3] == sum(Fraction(1, k + 1) * Fraction(1, 4 - k) for k in range(4))
        assert all(isinstance(x, (int, Fraction)) for x in prod)

    def test_equality_ignores_int_fraction_type(self):
        assert Series.from_list([Fraction(2, 1), 1]) == Series.from_list([2, 1])


def _binom_half(n):
    c = Fraction(1)
    for j in range(n):
        c *= (Fraction(1, 2) - j) / (j + 1)
    return c


class TestTree:
    def test_catalan(self):
        assert solve_tree(Series.z(10)).at_unity() == CATALAN

    def test_zero_core(self):
        assert solve_tree(Series.zero(8)) == Series.zero(8)

    def test_constant_core_rejected(self):
        with pytest.raises(SeriesError):
            solve_tree(Series.constant(1, 5))

    def test_methods_agree(self):
        z = Series.z(14, (14, 0))
        t = Series.marker("t", 14, (14, 0))
        core = z * (t * z).seq()
        a, b = solve_tree(core), solve_tree(core, method="fixed_point")
        assert a == b
        assert core + a * a == a

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve_tree(Series.z(3), method="magic")


class TestSystem:
    def test_fibonacci_pair(self):
        z = Series.z(12)
        eqs = [("A", lambda s: 1 + z.truncate(s["A"].order) * (s["A"] + s["B"])),
               ("B", lambda s: z.truncate(s["A"].order) * s["A"])]
        sol = solve_system(eqs, 12)
        A = sol["A"].at_unity()
        assert A[:8] == [1, 1, 2, 3, 5, 8, 13, 21]

    def test_pass_cap(self):
        z = Series.z(5)
        with pytest.raises(SeriesError):
            solve_system([("A", lambda s: 1 + z.truncate(s["A"].order) * s["A"])], 5, pass_cap=3)


def test_coeff_array_shape():
    s = Series.zero(3, (2, 1))
    assert s.coeffs.shape == (4, 3, 2) and s.coeffs.dtype == np.dtype(object)
    with pytest.raises(SeriesError):
        Series(np.zeros((2, 2), dtype=object))
