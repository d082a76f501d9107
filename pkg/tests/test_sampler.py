from collections import Counter

import pytest

from permgrid.errors import PreconditionError, ResourceLimitError
from permgrid.grammars import grammar_components, grammar_D, grammar_H
from permgrid.perm import BASIS_D, BASIS_H, avoids_all, contains, iterate_class
from permgrid.sampler import (
    GENERATOR,
    Atom,
    Deferred,
    Map,
    Prod,
    Seq,
    Sampler,
    Union,
    _randbelow,
    build_tables,
    make_rng,
    prod,
    sample,
    sample_stats,
)
from permgrid.structure import canonical_gridding_D
from permgrid.acceptance import chi_square_pvalue

from conftest import D_COUNTS, H_COUNTS

N = 12


@pytest.fixture(scope="module")
def tables():
    return build_tables(N)


class TestCombinators:
    def test_binary_words(self):
        Z = Atom()
        bits = Seq(Union(Z, Z))
        assert [bits.count(n) for n in range(6)] == [1, 2, 4, 8, 16, 32]
        words = {tuple(i for i, _ in bits.unrank(3, r)) for r in range(8)}
        assert len(words) == 8

    def test_non_empty_sequence(self):
        s = Seq(Atom(), 1)
        assert [s.count(n) for n in range(4)] == [0, 1, 1, 1]
        with pytest.raises(ValueError):
            Seq(Atom(), 2)

    def test_prod_flattens(self):
        Z = Atom()
        p = prod(Z, Z, Seq(Z))
        assert p.count(4) == 1 and len(p.unrank(4, 0)) == 3

    def test_recursive_binary_trees(self):
        Z = Atom()
        B = Deferred()
        B.define(Union(Z, Prod(Z, Prod(B, B))))
        assert [B.count(n) for n in (1, 3, 5, 7)] == [1, 1, 2, 5]

    def test_map(self):
        m = Map(Seq(Atom()), len)
        assert m.unrank(5, 0) == 5

    def test_rank_out_of_range(self):
        with pytest.raises(IndexError):
            Union(Atom()).unrank(1, 1)


class TestTables:
    def test_class_tables(self, tables):
        assert tables["D"][1:] == D_COUNTS[:N]
        assert tables["H"][1:] == H_COUNTS[:N]

    def test_paths(self, tables):
        assert tables["P"][1:] == [1] * N

    @pytest.mark.parametrize("symbol", ["P", "T", "U", "H", "L", "Q", "S", "D"])
    def test_match_series(self, tables, symbol):
        comps = grammar_components(N, "one", "one")
        assert tables[symbol] == comps[symbol].at_unity()

    def test_l_minus_p(self, tables):
        comps = grammar_components(N, "one", "one")
        assert tables["L-P"] == (comps["L"] - comps["P"]).at_unity()

    def test_symbols(self, tables):
        assert set(tables.symbols) == {"P", "T", "U", "H", "L", "L-P", "Q", "S", "D-H", "D"}

    def test_needs_size(self):
        with pytest.raises(PreconditionError):
            build_tables(0)


class TestBijection:
    @pytest.mark.parametrize("n", range(1, 8))
    def test_unrank_is_a_bijection_onto_d(self, tables, n):
        s = Sampler(N, "D", tables)
        images = [s.unrank(n, r) for r in range(s.count(n))]
        assert sorted(images) == list(iterate_class(BASIS_D, n))

    @pytest.mark.parametrize("n", range(1, 7))
    def test_structures_are_canonical(self, tables, n):
        s = Sampler(N, "D", tables)
        for r in range(s.count(n)):
            cg = s.structure(n, r)
            p = s.unrank(n, r)
            canon = canonical_gridding_D(p)
            assert (cg.c, cg.r) == (canon.c, canon.r)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_h_sampler(self, tables, n):
        s = Sampler(N, "H", tables)
        assert sorted(s.unrank(n, r) for r in range(s.count(n))) == list(iterate_class(BASIS_H, n))

    def test_marker_census(self, tables):
        s = Sampler(N, "D", tables)
        n = 7
        seen = Counter()
        for r in range(s.count(n)):
            cg = s.structure(n, r)
            seen[(cg.n_top, cg.n_left)] += 1
        assert seen == Counter(grammar_D(n).terms(n))


class TestRandom:
    def test_randbelow_range_and_determinism(self):
        rng = make_rng(5)
        xs = [_randbelow(rng, 10 ** 30 + 7) for _ in range(200)]
        assert all(0 <= x < 10 ** 30 + 7 for x in xs)
        rng = make_rng(5)
        assert xs == [_randbelow(rng, 10 ** 30 + 7) for _ in range(200)]
        assert _randbelow(rng, 1) == 0

    def test_randbelow_uniform(self):
        rng = make_rng(11)
        counts = Counter(_randbelow(rng, 6) for _ in range(12000))
        _, p = chi_square_pvalue([counts[k] for k in range(6)], 2000)
        assert p > 1e-3

    def test_generator_name(self):
        assert GENERATOR == "PCG64"


class TestSample:
    def test_n1(self):
        assert sample(1, 0) == (1,)

    def test_uniform_on_d4(self):
        s = Sampler(4)
        rng = make_rng(7)
        counts = Counter(s.sample(4, rng) for _ in range(22000))
        members = list(iterate_class(BASIS_D, 4))
        assert set(counts) == set(members)
        _, p = chi_square_pvalue([counts[m] for m in members], 1000)
        assert p > 1e-3

    def test_fraction_avoiding_2413(self):
        s = Sampler(6)
        rng = make_rng(3)
        draws = [s.sample(6, rng) for _ in range(8000)]
        frac = sum(not contains(p, (2, 4, 1, 3)) for p in draws) / len(draws)
        se = (311 / 366 * 55 / 366 / len(draws)) ** 0.5
        assert abs(frac - 311 / 366) < 4 * se

    def test_seed_determinism(self):
        assert [sample(30, 9) for _ in range(3)] == [sample(30, 9)] * 3
        a = list(Sampler(30).stream(30, 5, seed=4))
        b = list(Sampler(30).stream(30, 5, seed=4))
        assert a == b

    def test_large_sample_in_class(self):
        p = sample(80, 123)
        assert len(p) == 80 and avoids_all(p, BASIS_D)

    def test_limits(self):
        s = Sampler(5)
        with pytest.raises(ResourceLimitError):
            s.sample(6, make_rng(0))
        with pytest.raises(PreconditionError):
            s.sample(0, make_rng(0))
        with pytest.raises(PreconditionError):
            Sampler(5, "X")
        with pytest.raises(IndexError):
            s.structure(3, 6)


class TestStats:
    def test_n1(self):
        st = sample_stats(1, 5, 0)
        assert (st.mean_top, st.mean_left, st.fraction_in_H) == (0, 0, 1)

    @pytest.mark.slow
    def test_against_exact_moments(self):
        from permgrid.analysis import moments

        n, trials = 200, 2000
        st = sample_stats(n, trials, seed=1)
        mt, _ = moments(grammar_D(n, "shift", "one"), n, "t", shifted=True)
        assert abs(st.mean_top - float(mt)) < 3.5 * st.se_top
        Dn = grammar_D(n, "one", "sym")
        frac = Dn.coeff(n)[0, 0] / sum(Dn.coeff(n)[0, :])
        assert abs(st.fraction_in_H - float(frac)) < 3.5 * st.se_in_H

    def test_validation(self):
        with pytest.raises(PreconditionError):
            sample_stats(5, 0, 0)
