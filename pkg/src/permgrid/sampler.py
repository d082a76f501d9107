"""Uniform random generation in ``D_n`` and ``H_n`` by the recursive method.

The grammar of canonical griddings is written as a small combinator
specification with exact counting tables.  A uniform object of size ``n`` is the
unranking of a uniform integer below the count; the derivation is turned into a
forest with top and left attachments and then into a permutation by
:func:`permgrid.structure.rebuild`.

Randomness comes from numpy's PCG64 generator.  Uniform integers below a big
bound are drawn by rejection from raw 64-bit words, so every choice is exact.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import PreconditionError, ResourceLimitError
from .perm import Permutation
from .structure import CanonicalGridding, PlaneForest, TreeNode, rebuild, tip

GENERATOR = "PCG64"


# ---- combinator specification ---------------------------------------------------

class Spec:
    """A combinatorial class given by a count table and an unranking map."""

    def __init__(self):
        self._memo: dict[int, int] = {}

    def count(self, n: int) -> int:
        if n < 0:
            return 0
        c = self._memo.get(n)
        if c is None:
            c = self._count(n)
            self._memo[n] = c
        return c

    def _count(self, n: int) -> int:
        raise NotImplementedError

    def unrank(self, n: int, r: int):
        raise NotImplementedError


class Atom(Spec):
    def _count(self, n):
        return 1 if n == 1 else 0

    def unrank(self, n, r):
        return None


class Prod(Spec):
    def __init__(self, a: Spec, b: Spec):
        super().__init__()
        self.a, self.b = a, b

    def _count(self, n):
        total = 0
        for k in range(n + 1):
            ca = self.a.count(k)
            if ca:
                total += ca * self.b.count(n - k)
        return total

    def unrank(self, n, r):
        for k in range(n + 1):
            ca = self.a.count(k)
            if not ca:
                continue
            cb = self.b.count(n - k)
            w = ca * cb
            if r < w:
                ra, rb = divmod(r, cb)
                return self.a.unrank(k, ra), self.b.unrank(n - k, rb)
            r -= w
        raise IndexError("rank out of range")


def prod(*parts: Spec) -> Spec:
    """Right-nested product; unranks to a flat tuple."""
    if len(parts) == 1:
        return parts[0]
    return Map(Prod(parts[0], prod(*parts[1:])), _flatten(len(parts)))


def _flatten(k: int):
    def f(pair):
        head, tail = pair
        return (head,) + (tail if k > 2 else (tail,))
    return f


class Union(Spec):
    """Disjoint union; unranks to ``(branch_index, value)``."""

    def __init__(self, *options: Spec):
        super().__init__()
        self.options = options

    def _count(self, n):
        return sum(o.count(n) for o in self.options)

    def unrank(self, n, r):
        for i, o in enumerate(self.options):
            c = o.count(n)
            if r < c:
                return i, o.unrank(n, r)
            r -= c
        raise IndexError("rank out of range")


class Seq(Spec):
    """Sequences (``minimum=1``: non-empty sequences) of a class with no object of size 0."""

    def __init__(self, a: Spec, minimum: int = 0):
        super().__init__()
        if minimum not in (0, 1):
            raise ValueError("minimum must be 0 or 1")
        self.a = a
        self.minimum = minimum
        self.free = self if minimum == 0 else Seq(a)
        self._plus = Prod(a, self.free) if minimum else None

    def _count(self, n):
        if self._plus is not None:
            return self._plus.count(n)
        if n == 0:
            return 1
        return sum(self.a.count(k) * self.count(n - k) for k in range(1, n + 1))

    def unrank(self, n, r):
        items = []
        first = self.minimum == 1
        while n > 0 or first:
            for k in range(1, n + 1):
                ca = self.a.count(k)
                if not ca:
                    continue
                rest = self.free.count(n - k)
                w = ca * rest
                if r < w:
                    ra, r = divmod(r, rest)
                    items.append(self.a.unrank(k, ra))
                    n -= k
                    break
                r -= w
            else:
                raise IndexError("rank out of range")
            first = False
        return items


class Map(Spec):
    def __init__(self, a: Spec, fn: Callable):
        super().__init__()
        self.a, self.fn = a, fn

    def _count(self, n):
        return self.a.count(n)

    def unrank(self, n, r):
        return self.fn(self.a.unrank(n, r))


class Deferred(Spec):
    """Placeholder for a recursive class, bound later with :meth:`define`."""

    def define(self, spec: Spec) -> None:
        self.inner = spec

    def _count(self, n):
        return self.inner.count(n)

    def unrank(self, n, r):
        return self.inner.unrank(n, r)


# ---- structures ----------------------------------------------------------------------

@dataclass(eq=False)
class _Node(TreeNode):
    tops: int = 0          # top points immediately after this vertex in position order
    left_below: int = 0    # left points immediately below this vertex in value order
    left_above: int = 0    # on a root: left points just above the whole tree


@dataclass
class _Assembly:
    trees: list
    bottom_lefts: int = 0


def _path(k: int) -> list[_Node]:
    """``k`` vertices chained root first."""
    nodes = [_Node() for _ in range(k)]
    for lo, hi in zip(nodes, nodes[1:]):
        lo.children.append(hi)
    return nodes


def _hang(top_of_trunk: _Node, subtrees: list, below: list) -> _Node:
    """Give the branching vertex its subtrees, then add the trunk below it, tip downwards."""
    top_of_trunk.children.extend(subtrees)
    current = top_of_trunk
    for _, subs in below:
        w = _Node()
        w.children = [current] + list(subs)
        current = w
    return current


def _build_tree(parts) -> _Node:
    core, kids = parts
    core.children = list(kids)
    return core


def _build_upper(choice) -> _Node:
    branch, value = choice
    if branch == 0:
        return value
    above, (_, subtrees, below) = value[0], value[1]
    path = _path(len(above))           # root first, so path[0] sits just above the branching vertex
    b = _Node(children=[path[0]])
    return _hang(b, subtrees, below)


def _build_split_path(parts) -> list[_Node]:
    _, plain, (_, first_lefts), rest = parts
    groups = [0] * len(plain) + [len(first_lefts)] + [len(lefts) for _, lefts in rest]
    nodes = _path(len(groups) + 1)
    for node, g in zip(nodes[1:], groups):
        node.left_below = g
    return nodes


def _build_q(parts) -> list[_Node]:
    nodes, tops = parts
    nodes[-1].tops = len(tops)
    return nodes


def _build_split_tree(choice) -> _Node:
    branch, value = choice
    if branch == 0:
        return value[0]               # a split path on its own
    nodes, subtrees, below = value
    return _hang(nodes[0], subtrees, below)


def _build_H(parts) -> _Assembly:
    upper, others = parts
    return _Assembly([upper] + list(others))


def _build_DmH(parts) -> _Assembly:
    upper, plain, first_split, later, bottom = parts
    trees = [upper] + list(plain) + [first_split]
    for lefts, (_, tree) in later:
        tree.left_above = len(lefts)
        trees.append(tree)
    return _Assembly(trees, len(bottom))


def _assemble(a: _Assembly) -> CanonicalGridding:
    forest = PlaneForest(tuple(a.trees))
    tops = [v for v in forest.preorder() for _ in range(v.tops)]
    ascending = list(forest.ascending())
    rank = {id(v): i for i, v in enumerate(ascending)}
    attached: list[tuple[int, TreeNode | None]] = [(-1, None)] * a.bottom_lefts
    for v in ascending:
        if v.left_below:
            i = rank[id(v)]
            below = ascending[i - 1] if i else None
            attached += [(i - 1, below)] * v.left_below
    for t in a.trees:
        if t.left_above:
            tp = tip(t)
            attached += [(rank[id(tp)], tp)] * t.left_above
    attached.sort(key=lambda x: x[0])
    return CanonicalGridding(forest, tuple(tops), tuple(node for _, node in attached))


def _grammar() -> dict[str, Spec]:
    Z = Atom()
    core = Map(Prod(Z, Seq(Z)), lambda p: _Node(tops=len(p[1])))
    T = Deferred()
    T.define(Map(Prod(core, Seq(T)), _build_tree))
    seqT = Seq(T)
    P = Map(Seq(Z, 1), lambda zs: _path(len(zs))[0])
    below = Seq(Prod(Z, seqT))
    U = Map(Union(P, Prod(Seq(Z, 1), prod(Z, Seq(T, 1), below))), _build_upper)
    H = Map(Prod(U, seqT), _build_H)

    L = Prod(Z, Seq(Prod(Z, Seq(Z))))
    LmP = Map(prod(Z, Seq(Z), Prod(Z, Seq(Z, 1)), Seq(Prod(Z, Seq(Z)))), _build_split_path)
    Q = Map(Prod(LmP, Seq(Z)), _build_q)
    S = Map(Union(Q, prod(Q, Seq(T, 1), below)), _build_split_tree)
    later = Seq(Prod(Seq(Z), Union(T, S)))
    DmH = Map(prod(U, seqT, S, later, Seq(Z)), _build_DmH)
    D = Union(H, DmH)
    return {"P": P, "T": T, "U": U, "H": H, "L": L, "L-P": LmP, "Q": Q, "S": S, "D-H": DmH, "D": D}


# ---- tables and sampling ---------------------------------------------------------------

@dataclass
class WeightTables:
    """Exact counts of every grammar symbol for sizes ``0 .. n_max``."""

    n_max: int
    specs: dict[str, Spec] = field(repr=False)

    def __getitem__(self, symbol: str) -> list[int]:
        return [self.specs[symbol].count(n) for n in range(self.n_max + 1)]

    @property
    def symbols(self) -> list[str]:
        return list(self.specs)


def build_tables(n_max: int) -> WeightTables:
    """Count tables for ``P, T, U, H, L, L-P, Q, S, D-H, D`` up to ``n_max``."""
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    specs = _grammar()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        for n in range(n_max + 1):  # fill in size order so the memo recursion stays shallow
            for s in specs.values():
                s.count(n)
    finally:
        sys.setrecursionlimit(limit)
    return WeightTables(n_max, specs)


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = (bound - 1).bit_length()
    if bits == 0:
        return 0
    words = -(-bits // 64)
    excess = 64 * words - bits
    while True:
        raw = rng.bit_generator.random_raw(words)
        x = 0
        for w in raw.tolist():
            x = (x << 64) | w
        x >>= excess
        if x < bound:
            return x


class Sampler:
    """Uniform sampler over ``D_n`` (``cls="D"``) or ``H_n`` (``cls="H"``)."""

    def __init__(self, n_max: int, cls: str = "D", tables: WeightTables | None = None):
        if cls not in ("D", "H"):
            raise PreconditionError("class must be 'D' or 'H'")
        self.cls = cls
        self.tables = tables if tables is not None and tables.n_max >= n_max else build_tables(n_max)
        self.n_max = n_max

    @property
    def _spec(self) -> Spec:
        return self.tables.specs[self.cls]

    def count(self, n: int) -> int:
        return self._spec.count(n)

    def structure(self, n: int, rank: int) -> CanonicalGridding:
        """The canonical gridding with the given rank among size-``n`` objects."""
        if not 0 <= rank < self.count(n):
            raise IndexError("rank out of range")
        value = self._spec.unrank(n, rank)
        if self.cls == "D":
            _, value = value
        return _assemble(value)

    def unrank(self, n: int, rank: int) -> Permutation:
        return rebuild(self.structure(n, rank))

    def draw(self, n: int, rng: np.random.Generator) -> CanonicalGridding:
        if n > self.n_max:
            raise ResourceLimitError(f"tables prepared up to n={self.n_max}, asked for {n}")
        if n < 1:
            raise PreconditionError("n must be at least 1")
        return self.structure(n, _randbelow(rng, self.count(n)))

    def sample(self, n: int, rng: np.random.Generator) -> Permutation:
        return rebuild(self.draw(n, rng))

    def stream(self, n: int, count: int, seed: int) -> Iterator[Permutation]:
        rng = make_rng(seed)
        for _ in range(count):
            yield self.sample(n, rng)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


_CACHE: dict[str, Sampler] = {}


def _sampler(n: int, cls: str) -> Sampler:
    s = _CACHE.get(cls)
    if s is None or s.n_max < n:
        s = Sampler(max(n, 16), cls)
        _CACHE[cls] = s
    return s


def sample(n: int, seed: int, cls: str = "D") -> Permutation:
    """One uniform member of ``D_n`` (or ``H_n``), determined by ``seed``."""
    return _sampler(n, cls).sample(n, make_rng(seed))


@dataclass(frozen=True)
class SampleStats:
    n: int
    trials: int
    mean_top: float
    var_top: float
    se_top: float
    mean_left: float
    var_left: float
    se_left: float
    fraction_in_H: float
    se_in_H: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def sample_stats(n: int, trials: int, seed: int, cls: str = "D") -> SampleStats:
    """Empirical top/left point moments and the fraction avoiding 2413, with standard errors."""
    if trials < 1:
        raise PreconditionError("trials must be positive")
    s = _sampler(n, cls)
    rng = make_rng(seed)
    tops, lefts = [], []
    for _ in range(trials):
        cg = s.draw(n, rng)
        tops.append(cg.n_top)
        lefts.append(cg.n_left)
    t = np.array(tops, dtype=float)
    l = np.array(lefts, dtype=float)
    in_h = (l == 0).astype(float)

    def se(x):
        return float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0

    return SampleStats(n, trials, float(t.mean()), float(t.var()), se(t), float(l.mean()), float(l.var()), se(l),
                       float(in_h.mean()), se(in_h))
