"""Permutations, classical containment and exhaustive class enumeration.

Everything else in the package is checked against the brute-force counts
produced here.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import permutations as _all_orderings
from typing import Iterable, Iterator, Sequence

from .errors import InvalidPermutationError, PreconditionError, ResourceLimitError

try:
    from . import _kernels as _kern

    KERNEL = "cython"
except ImportError:  # pragma: no cover - exercised when the extension is not built
    from . import _kernels_py as _kern

    KERNEL = "python"

from . import _kernels_py

#: largest size enumerate_class / iterate_class will attempt by default
EXHAUSTIVE_BOUND = int(os.environ.get("PERMGRID_EXHAUSTIVE_BOUND", "11"))


class Permutation:
    """A permutation in one-line notation, ``values[i]`` being the image of ``i + 1``."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[int] = ()):
        vals = tuple(int(v) for v in values)
        problem = _first_violation(vals)
        if problem is not None:
            raise InvalidPermutationError(problem)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def _trusted(cls, values: tuple) -> "Permutation":
        obj = object.__new__(cls)
        object.__setattr__(obj, "values", values)
        return obj

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._trusted(tuple(range(1, n + 1)))

    @classmethod
    def decreasing(cls, n: int) -> "Permutation":
        return cls._trusted(tuple(range(n, 0, -1)))

    @classmethod
    def standardize(cls, seq: Sequence[int]) -> "Permutation":
        """The permutation order-isomorphic to a sequence of distinct numbers."""
        rank = {v: i + 1 for i, v in enumerate(sorted(seq))}
        if len(rank) != len(seq):
            raise InvalidPermutationError("sequence has repeated entries")
        return cls._trusted(tuple(rank[v] for v in seq))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return self.values == other.values
        if isinstance(other, tuple):
            return self.values == other
        return NotImplemented

    def __lt__(self, other: "Permutation") -> bool:
        return self.values < other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"Permutation({format_perm(self)!r})"

    def __str__(self) -> str:
        return format_perm(self)

    @property
    def n(self) -> int:
        return len(self.values)

    def points(self) -> list[tuple[int, int]]:
        """Plot points ``(position, value)``, both 1-based."""
        return [(i + 1, v) for i, v in enumerate(self.values)]

    def top_run_start(self) -> int:
        """Smallest ``k`` such that ``k, k+1, ..., n`` occur left to right (``n + 1`` when empty)."""
        n = len(self.values)
        if n == 0:
            return 1
        where = [0] * (n + 1)
        for i, v in enumerate(self.values):
            where[v] = i
        k = n
        while k > 1 and where[k - 1] < where[k]:
            k -= 1
        return k

    def prefix_run_length(self, bound: int) -> int:
        """Length of the longest increasing prefix whose entries are all at most ``bound``."""
        j = 0
        prev = 0
        for v in self.values:
            if v > bound or v < prev:
                break
            prev = v
            j += 1
        return j


def _first_violation(vals: tuple) -> str | None:
    n = len(vals)
    seen = set()
    for i, v in enumerate(vals, start=1):
        if v < 1 or v > n:
            return f"entry {v} at position {i} is outside 1..{n}"
        if v in seen:
            return f"entry {v} at position {i} is repeated"
        seen.add(v)
    return None


_SPLIT = re.compile(r"[\s,]+")


def parse_perm(text: str) -> Permutation:
    """Parse ``"2 4 1 3"`` or ``"2,4,1,3"``; a bare digit string such as ``"2413"`` is read digit by digit."""
    text = text.strip()
    if not text:
        return Permutation(())
    tokens = [t for t in _SPLIT.split(text) if t]
    if len(tokens) == 1 and len(tokens[0]) > 1 and tokens[0].isdigit() and len(tokens[0]) <= 9:
        tokens = list(tokens[0])
    try:
        vals = [int(t) for t in tokens]
    except ValueError as exc:
        raise InvalidPermutationError(f"not an integer: {exc}") from None
    return Permutation(vals)


def format_perm(perm: Permutation | Sequence[int], sep: str = " ") -> str:
    return sep.join(str(v) for v in perm)


def _as_values(p) -> tuple:
    if isinstance(p, Permutation):
        return p.values
    if isinstance(p, str):
        return parse_perm(p).values
    return tuple(p)


@dataclass(frozen=True)
class PatternBasis:
    """A finite antichain of patterns; ``Av(basis)`` is the class avoiding all of them."""

    patterns: tuple[Permutation, ...]

    def __init__(self, patterns: Iterable):
        pats = tuple(sorted({p if isinstance(p, Permutation) else Permutation(_as_values(p)) for p in patterns},
                            key=lambda p: (len(p), p.values)))
        if not pats:
            raise PreconditionError("a basis needs at least one pattern")
        for a in pats:
            for b in pats:
                if a is not b and len(a) <= len(b) and contains(b, a):
                    raise PreconditionError(f"basis is not an antichain: {format_perm(b, '')} contains {format_perm(a, '')}")
        object.__setattr__(self, "patterns", pats)

    @classmethod
    def parse(cls, text: str) -> "PatternBasis":
        """Comma-separated patterns written as digit strings, e.g. ``"4213,2143"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return cls(parse_perm(p) for p in parts)

    def __iter__(self):
        return iter(self.patterns)

    def __str__(self) -> str:
        return "{" + ",".join(format_perm(p, "") for p in self.patterns) + "}"


def contains(host, pattern) -> bool:
    """True iff some subsequence of ``host`` is order-isomorphic to ``pattern``.

    >>> contains(Permutation((2, 1, 4, 3)), Permutation((2, 1)))
    True
    """
    return bool(_kern.contains(_as_values(host), _as_values(pattern)))


def avoids_all(host, basis: PatternBasis | Iterable) -> bool:
    h = _as_values(host)
    return not any(_kern.contains(h, _as_values(p)) for p in basis)


BASIS_D = PatternBasis([(4, 2, 1, 3), (2, 1, 4, 3)])
BASIS_H = PatternBasis([(4, 2, 1, 3), (2, 4, 1, 3), (2, 1, 4, 3)])


@dataclass(frozen=True)
class CountTable:
    """Counts indexed by size; ``counts[n]`` is the number of objects of size ``n``."""

    counts: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.counts[n]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def n_max(self) -> int:
        return len(self.counts) - 1

    def sequence(self, start: int = 1) -> list[int]:
        return list(self.counts[start:])


def _check_bound(n: int, bound: int | None) -> None:
    limit = EXHAUSTIVE_BOUND if bound is None else bound
    if n < 0:
        raise PreconditionError("size must be non-negative")
    if n > limit:
        raise ResourceLimitError(f"exhaustive enumeration is capped at n={limit} (asked for {n})")


def _extend(level: list, pats: list, threads: int) -> list:
    if threads <= 1 or len(level) < 2000:
        return _kern.extend_level(level, pats)
    chunk = -(-len(level) // threads)
    pieces = [level[i:i + chunk] for i in range(0, len(level), chunk)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_kern.extend_level, pieces, [pats] * len(pieces)))
    return [c for part in parts for c in part]


def _levels(basis: PatternBasis, n_max: int, threads: int = 1) -> Iterator[list]:
    pats = [p.values for p in basis]
    level = [()]
    yield level
    for _ in range(n_max):
        level = _extend(level, pats, threads)
        yield level


def enumerate_class(basis: PatternBasis, n_max: int, *, bound: int | None = None, threads: int = 1) -> CountTable:
    """``|Av_n(basis)|`` for ``0 <= n <= n_max`` by pruned exhaustive generation.

    Members of size ``n`` are grown from members of size ``n - 1`` by appending
    a last entry; a candidate is dropped as soon as a basis pattern occurs
    through that entry.
    """
    _check_bound(n_max, bound)
    return CountTable(tuple(len(level) for level in _levels(basis, n_max, threads)))


def iterate_class(basis: PatternBasis, n: int, *, bound: int | None = None, threads: int = 1) -> Iterator[Permutation]:
    """Members of ``Av_n(basis)`` in lexicographic order of one-line notation."""
    _check_bound(n, bound)
    level = None
    for level in _levels(basis, n, threads):
        pass
    for vals in sorted(level):
        yield Permutation._trusted(vals)


def naive_class(basis: PatternBasis, n: int) -> list[Permutation]:
    """Filter all ``n!`` permutations; a slow second route for cross-checks."""
    pats = [p.values for p in basis]
    out = []
    for vals in _all_orderings(range(1, n + 1)):
        if not any(_kernels_py.contains(vals, p) for p in pats):
            out.append(Permutation._trusted(vals))
    return out


def all_permutations(n: int) -> Iterator[Permutation]:
    for vals in _all_orderings(range(1, n + 1)):
        yield Permutation._trusted(vals)
