import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permgrid import _kernels_py
from permgrid.errors import InvalidPermutationError, PreconditionError, ResourceLimitError
from permgrid.perm import (
    BASIS_D,
    BASIS_H,
    KERNEL,
    PatternBasis,
    Permutation,
    all_permutations,
    avoids_all,
    contains,
    enumerate_class,
    iterate_class,
    naive_class,
    parse_perm,
)

from conftest import D_COUNTS, H_MEMBER21, D_MEMBER22, H_COUNTS


def brute_contains(host, pattern):
    k = len(pattern)
    for idx in itertools.combinations(range(len(host)), k):
        sub = [host[i] for i in idx]
        if all((sub[a] < sub[b]) == (pattern[a] < pattern[b]) for a in range(k) for b in range(k)):
            return True
    return False


perms = st.integers(0, 9).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(InvalidPermutationError, match="repeated"):
            Permutation([1, 1])
        with pytest.raises(InvalidPermutationError, match="outside"):
            Permutation([1, 3])

    def test_empty_is_valid(self):
        assert len(Permutation()) == 0

    def test_immutable(self):
        p = Permutation([2, 1])
        with pytest.raises(AttributeError):
            p.values = (1, 2)

    @pytest.mark.parametrize("text", ["2 4 1 3", "2,4,1,3", " 2, 4 ,1 3 ", "2413"])
    def test_parse(self, text):
        assert parse_perm(text) == (2, 4, 1, 3)

    def test_parse_names_first_violation(self):
        with pytest.raises(InvalidPermutationError, match="entry 5 at position 2"):
            parse_perm("1 5 2")
        with pytest.raises(InvalidPermutationError):
            parse_perm("1 x")

    def test_standardize(self):
        assert Permutation.standardize([30, 10, 20]) == (3, 1, 2)

    def test_str_round_trip(self):
        assert parse_perm(str(D_MEMBER22)) == D_MEMBER22


class TestContains:
    def test_examples(self):
        assert contains((2, 1, 4, 3), (2, 1))
        assert contains(D_MEMBER22, (2, 4, 1, 3))
        assert not contains(H_MEMBER21, (2, 4, 1, 3))

    def test_empty_pattern(self):
        assert contains((), ())
        assert contains((3, 1, 2), ())
        assert not contains((), (1,))

    @settings(max_examples=300, deadline=None)
    @given(perms, st.sampled_from([(1,), (2, 1), (2, 1, 3), (1, 3, 2), (4, 2, 1, 3), (2, 4, 1, 3), (2, 1, 4, 3)]))
    def test_matches_brute_force(self, host, pattern):
        expected = brute_contains(host, pattern)
        assert contains(host, pattern) == expected
        assert bool(_kernels_py.contains(tuple(host), pattern)) == expected

    def test_avoids_all(self):
        assert avoids_all((1,), BASIS_D)
        assert not avoids_all((4, 2, 1, 3), BASIS_D)
        assert not avoids_all((2, 4, 1, 3), BASIS_H)


class TestBasis:
    def test_antichain_checked(self):
        with pytest.raises(PreconditionError, match="antichain"):
            PatternBasis([(2, 1), (3, 2, 1)])
        with pytest.raises(PreconditionError):
            PatternBasis([])

    def test_parse_and_str(self):
        assert PatternBasis.parse("4213,2143") == BASIS_D
        assert str(BASIS_H) == "{2143,2413,4213}"


class TestEnumeration:
    def test_small_tables(self):
        assert enumerate_class(BASIS_D, 4).sequence() == [1, 2, 6, 22]
        assert enumerate_class(PatternBasis([(2, 1)]), 6).sequence() == [1] * 6
        assert enumerate_class(BASIS_D, 0).counts == (1,)

    def test_sequences(self):
        assert enumerate_class(BASIS_H, 9).sequence() == H_COUNTS[:9]
        assert enumerate_class(BASIS_D, 9).sequence() == D_COUNTS[:9]

    @pytest.mark.slow
    def test_h_at_ten(self):
        assert enumerate_class(BASIS_H, 10)[10] == 96900

    def test_a022558(self):
        assert enumerate_class(PatternBasis([(4, 2, 1, 3)]), 8).sequence() == [1, 2, 6, 23, 103, 512, 2740, 15485]

    def test_subclass_and_monotone(self):
        h, d = enumerate_class(BASIS_H, 8), enumerate_class(BASIS_D, 8)
        a = enumerate_class(PatternBasis([(4, 2, 1, 3)]), 8)
        for n in range(1, 9):
            assert h[n] <= d[n] <= a[n]
            assert n == 1 or d[n - 1] <= d[n]

    def test_iterate_order_and_members(self):
        d4 = list(iterate_class(BASIS_D, 4))
        assert len(d4) == 22 and d4 == sorted(d4)
        assert set(all_permutations(4)) - set(d4) == {Permutation((4, 2, 1, 3)), Permutation((2, 1, 4, 3))}
        assert list(iterate_class(BASIS_D, 1)) == [Permutation([1])]
        assert len(list(iterate_class(BASIS_H, 4))) == 21

    @pytest.mark.parametrize("n", range(8))
    def test_pruned_equals_naive(self, n):
        for basis in (BASIS_D, BASIS_H):
            assert list(iterate_class(basis, n)) == naive_class(basis, n)

    def test_consistency_with_counts(self):
        table = enumerate_class(BASIS_D, 8)
        for n in range(9):
            assert sum(1 for _ in iterate_class(BASIS_D, n)) == table[n]

    def test_threads_do_not_change_result(self):
        assert enumerate_class(BASIS_D, 8, threads=3) == enumerate_class(BASIS_D, 8)

    def test_bound(self):
        with pytest.raises(ResourceLimitError):
            enumerate_class(BASIS_D, 12)
        with pytest.raises(ResourceLimitError):
            enumerate_class(BASIS_D, 5, bound=4)
        with pytest.raises(PreconditionError):
            enumerate_class(BASIS_D, -1)


def test_kernel_selected():
    assert KERNEL in ("cython", "python")


FALLBACK = """
import sys
class Block:
    def find_spec(self, name, path, target=None):
        if name == "permgrid._kernels":
            raise ImportError("blocked")
sys.meta_path.insert(0, Block())
from permgrid.perm import KERNEL, BASIS_D, enumerate_class
print(KERNEL, enumerate_class(BASIS_D, 7).sequence())
"""


def test_fallback_selected_at_import():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-c", FALLBACK], capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python [1, 2, 6, 22, 88, 366, 1556]"
