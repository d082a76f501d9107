"""Griddings in the three-cell class ``G = [empty, Av(21); Av(21), Av(213)]``.

A gridding is fixed by a column cut ``c`` (the first ``c`` positions form the
left column) and a row cut ``r`` (values ``<= r`` form the lower row).  The
lower-right cell avoids 213, so its Hasse graph is a skew sum of plane trees;
the points in the top cell are *top points* and those in the left cell are
*left points*.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import InconsistentStructureError, NotInClassError, PreconditionError
from .perm import Permutation, _kern

Point = tuple[int, int]

_213 = (2, 1, 3)
_2143 = (2, 1, 4, 3)


@dataclass(eq=False)
class TreeNode:
    """A vertex of a plane tree; ``point`` is ``(position, value)`` or None for synthesized trees."""

    point: Point | None = None
    children: list["TreeNode"] = field(default_factory=list)

    def __repr__(self) -> str:
        return f"TreeNode({self.point}, {len(self.children)} children)"

    def preorder(self) -> Iterator["TreeNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ascending(self) -> Iterator["TreeNode"]:
        """Vertices in increasing value order: the root, then child blocks from the last child up."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def size(self) -> int:
        return sum(1 for _ in self.preorder())

    def position_span(self) -> tuple[int, int]:
        pos = [v.point[0] for v in self.preorder()]
        return min(pos), max(pos)

    def value_span(self) -> tuple[int, int]:
        val = [v.point[1] for v in self.preorder()]
        return min(val), max(val)

    def to_nested(self) -> list:
        return [list(self.point) if self.point else None, [c.to_nested() for c in self.children]]


def trunk(tree: TreeNode) -> list[TreeNode]:
    """Root, then repeatedly the leftmost child: the left-to-right maxima of the tree."""
    path = [tree]
    while path[-1].children:
        path.append(path[-1].children[0])
    return path


def tip(tree: TreeNode) -> TreeNode:
    return trunk(tree)[-1]


def uppermost_branching_point(tree: TreeNode) -> TreeNode | None:
    """The trunk vertex with at least two children that is nearest the tip."""
    for node in reversed(trunk(tree)):
        if len(node.children) >= 2:
            return node
    return None


def uppermost_non_trunk_vertex(tree: TreeNode) -> TreeNode | None:
    on_trunk = {id(v) for v in trunk(tree)}
    best = None
    for v in tree.preorder():
        if id(v) not in on_trunk and (best is None or v.point[1] > best.point[1]):
            best = v
    return best


@dataclass(eq=False)
class PlaneForest:
    """Skew sum of plane trees, uppermost-leftmost tree first."""

    trees: tuple[TreeNode, ...] = ()

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    @property
    def upper_tree(self) -> TreeNode | None:
        return self.trees[0] if self.trees else None

    def preorder(self) -> Iterator[TreeNode]:
        """All vertices in position order."""
        for t in self.trees:
            yield from t.preorder()

    def ascending(self) -> Iterator[TreeNode]:
        """All vertices in value order."""
        for t in reversed(self.trees):
            yield from t.ascending()

    def size(self) -> int:
        return sum(t.size() for t in self.trees)

    def to_nested(self) -> list:
        return [t.to_nested() for t in self.trees]


def hasse_forest_points(points: Sequence[Point], check: bool = True) -> PlaneForest:
    """Hasse forest of a 213-avoiding point set given in position order.

    The parent of a point is the highest of the points to its lower left; for a
    213-avoider those points form a chain, so this is its unique cover.
    """
    pts = sorted(points)
    if check and _kern.contains(tuple(v for _, v in pts), _213):
        raise PreconditionError("point set contains 213; its Hasse graph is not a forest of plane trees")
    nodes = [TreeNode(p) for p in pts]
    roots = []
    for i, (pos, val) in enumerate(pts):
        parent = None
        for j in range(i):
            pv = pts[j][1]
            if pv < val and (parent is None or pv > pts[parent][1]):
                parent = j
        if parent is None:
            roots.append(nodes[i])
        else:
            nodes[parent].children.append(nodes[i])
    return PlaneForest(tuple(roots))


def hasse_forest(perm213: Permutation, check: bool = True) -> PlaneForest:
    return hasse_forest_points(perm213.points(), check=check)


def lower_left_is_chain(points: Sequence[Point]) -> bool:
    """True iff, for every point, the points to its lower left are totally ordered."""
    pts = sorted(points)
    for i, (_, val) in enumerate(pts):
        below = [p for p in pts[:i] if p[1] < val]
        for a in range(len(below)):
            for b in range(a + 1, len(below)):
                if below[a][1] > below[b][1]:
                    return False
    return True


def splits(point: Point, tree: TreeNode, axis: str) -> bool:
    """Strict interval test of a point against a tree's position span (horizontal) or value span (vertical)."""
    if axis in ("horizontal", "h", "top"):
        lo, hi = tree.position_span()
        x = point[0]
    elif axis in ("vertical", "v", "left"):
        lo, hi = tree.value_span()
        x = point[1]
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return lo < x < hi


@dataclass(frozen=True)
class GriddedPermutation:
    perm: Permutation
    c: int
    r: int

    @property
    def left_points(self) -> list[Point]:
        return [(i + 1, self.perm[i]) for i in range(self.c)]

    @property
    def top_points(self) -> list[Point]:
        return [(i + 1, v) for i, v in enumerate(self.perm) if v > self.r]

    @property
    def lower_points(self) -> list[Point]:
        return [(i + 1, v) for i, v in enumerate(self.perm) if i >= self.c and v <= self.r]

    def is_valid(self) -> bool:
        return is_valid_gridding(self.perm, self.c, self.r)


def is_valid_gridding(perm: Permutation, c: int, r: int) -> bool:
    """Check the empty upper-left cell, the two increasing cells and the 213-avoiding cell."""
    vals = perm.values
    n = len(vals)
    if not (0 <= c <= n and 0 <= r <= n):
        return False
    prev = 0
    for i in range(c):
        v = vals[i]
        if v > r or v < prev:
            return False
        prev = v
    prev = 0
    lower = []
    for i in range(c, n):
        v = vals[i]
        if v > r:
            if v < prev:
                return False
            prev = v
        else:
            lower.append(v)
    return not _kern.contains(tuple(lower), _213)


def _valid_rows(perm: Permutation, c: int) -> list[int]:
    vals = perm.values
    lo = max(vals[:c], default=0)
    rows = []
    for r in range(len(vals), lo - 1, -1):
        if is_valid_gridding(perm, c, r):
            rows.append(r)
        elif rows:
            break  # valid row cuts form an interval
    return rows


def _left_run(perm: Permutation) -> int:
    vals = perm.values
    j = 0
    while j < len(vals) and (j == 0 or vals[j] > vals[j - 1]):
        j += 1
    return j


def all_griddings(perm: Permutation) -> list[GriddedPermutation]:
    """Every ``(c, r)`` giving a valid gridding, ordered by ``c`` then ``r``."""
    out = []
    for c in range(_left_run(perm) + 1):
        for r in sorted(_valid_rows(perm, c)):
            out.append(GriddedPermutation(perm, c, r))
    return out


@dataclass(eq=False)
class CanonicalGridding:
    """Forest of the lower-right cell together with how the top and left points interleave with it.

    ``top_assignment`` has one entry per top point, left to right: the
    lower-cell vertex the top point immediately follows in position order, or
    None when it precedes every lower-cell point.  ``left_assignment`` has one
    entry per left point, bottom to top: the lower-cell vertex immediately
    below it in value order, or None when it is below every lower-cell point.
    ``gridded`` is None for synthesized structures.
    """

    forest: PlaneForest
    top_assignment: tuple[TreeNode | None, ...] = ()
    left_assignment: tuple[TreeNode | None, ...] = ()
    gridded: GriddedPermutation | None = None

    @property
    def n_top(self) -> int:
        return len(self.top_assignment)

    @property
    def n_left(self) -> int:
        return len(self.left_assignment)

    @property
    def c(self) -> int:
        return self.gridded.c if self.gridded else len(self.left_assignment)

    @property
    def r(self) -> int:
        if self.gridded:
            return self.gridded.r
        return self.forest.size() + len(self.left_assignment)

    @property
    def top_points(self) -> list[Point]:
        return self.gridded.top_points if self.gridded else []

    @property
    def left_points(self) -> list[Point]:
        return self.gridded.left_points if self.gridded else []

    def to_record(self) -> dict:
        perm = self.gridded.perm if self.gridded else rebuild(self)
        g = self.gridded or GriddedPermutation(perm, self.c, self.r)
        forest = self.forest if self.gridded else decompose(g).forest
        return {
            "perm": list(perm.values),
            "c": g.c,
            "r": g.r,
            "top_values": [v for _, v in g.top_points],
            "left_values": [v for _, v in g.left_points],
            "trees": forest.to_nested(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record())


def decompose(gridded: GriddedPermutation) -> CanonicalGridding:
    """Split a valid gridding into its lower-cell forest and the top/left interleavings."""
    if not gridded.is_valid():
        raise PreconditionError(f"(c={gridded.c}, r={gridded.r}) is not a valid gridding")
    lower = gridded.lower_points
    forest = hasse_forest_points(lower, check=False)
    by_point = {v.point: v for v in forest.preorder()}

    tops = []
    last = None
    top_set = set(gridded.top_points)
    for i, v in enumerate(gridded.perm.values):
        p = (i + 1, v)
        if p in by_point:
            last = by_point[p]
        elif p in top_set:
            tops.append(last)

    lefts = []
    below = None
    left_set = set(gridded.left_points)
    for p in sorted(lower + gridded.left_points, key=lambda q: q[1]):
        if p in left_set:
            lefts.append(below)
        else:
            below = by_point[p]
    return CanonicalGridding(forest, tuple(tops), tuple(lefts), gridded)


def canonical_gridding_H(perm: Permutation) -> CanonicalGridding:
    """Gridding with an empty left column and as few top points as possible (largest row cut)."""
    n = len(perm)
    for r in range(n, -1, -1):
        if is_valid_gridding(perm, 0, r):
            return decompose(GriddedPermutation(perm, 0, r))
    raise NotInClassError(f"{perm} has no gridding with an empty left column")


def canonical_gridding_D(perm: Permutation) -> CanonicalGridding:
    """Gridding with the fewest left points, the rest gridded with the fewest top points."""
    for c in range(_left_run(perm) + 1):
        rows = _valid_rows(perm, c)
        if rows:
            return decompose(GriddedPermutation(perm, c, max(rows)))
    raise NotInClassError(f"{perm} has no gridding in G")


def construction_gridding(perm: Permutation) -> GriddedPermutation:
    """The explicit gridding used to show membership in G.

    Top points are the longest run ``k, k+1, ..., n`` appearing left to right;
    left points are the longest increasing prefix made of values below ``k``.
    """
    k = perm.top_run_start()
    r = k - 1
    return GriddedPermutation(perm, perm.prefix_run_length(r), r)


def _tree_profiles(forest: PlaneForest):
    for t in forest.trees:
        tr = trunk(t)
        root, top = tr[0], tr[-1]
        u = uppermost_non_trunk_vertex(t)
        yield root.point, top.point, (u.point if u else None)


def gridding_avoids_2143(g: CanonicalGridding | GriddedPermutation) -> bool:
    """Splitting test for 2143-avoidance of a gridding in G.

    Fails if a left point splits a tree below its uppermost non-trunk vertex,
    or if a tree split by a left point also has its trunk split by a top point.
    """
    if isinstance(g, GriddedPermutation):
        g = decompose(g)
    left_vals = [v for _, v in g.left_points]
    top_pos = [p for p, _ in g.top_points]
    for (root_pos, root_val), (tip_pos, tip_val), u in _tree_profiles(g.forest):
        if u is not None and any(root_val < lv < u[1] for lv in left_vals):
            return False
        if any(root_val < lv < tip_val for lv in left_vals) and any(root_pos < tp < tip_pos for tp in top_pos):
            return False
    return True


def _position_rank(forest: PlaneForest) -> dict[int, int]:
    return {id(v): i for i, v in enumerate(forest.preorder())}


def rebuild(cg: CanonicalGridding) -> Permutation:
    """The permutation whose gridding has this forest and these interleavings.

    Only the shape of the forest and the assignments are used, so structures
    assembled without coordinates are accepted.
    """
    forest = cg.forest
    in_pos = list(forest.preorder())
    in_val = list(forest.ascending())
    pos_rank = {id(v): i for i, v in enumerate(in_pos)}
    val_rank = {id(v): i for i, v in enumerate(in_val)}
    if len(pos_rank) != len(in_pos):
        raise InconsistentStructureError("a vertex occurs twice in the forest")

    def ranks(assignment, table, what):
        out = []
        for node in assignment:
            if node is None:
                out.append(-1)
            elif id(node) in table:
                out.append(table[id(node)])
            else:
                raise InconsistentStructureError(f"{what} point attached to a vertex outside the forest")
        if any(a > b for a, b in zip(out, out[1:])):
            raise InconsistentStructureError(f"{what} points are not increasing")
        return out

    top_r = ranks(cg.top_assignment, pos_rank, "top")
    left_r = ranks(cg.left_assignment, val_rank, "left")
    m, a, c = len(in_pos), len(top_r), len(left_r)
    n = m + a + c
    r = m + c

    # values of lower vertices and left points, bottom to top
    lower_val = [0] * m
    left_val = []
    value = 0
    li = 0
    while li < c and left_r[li] == -1:
        value += 1
        left_val.append(value)
        li += 1
    for k in range(m):
        value += 1
        lower_val[pos_rank[id(in_val[k])]] = value
        while li < c and left_r[li] == k:
            value += 1
            left_val.append(value)
            li += 1

    out = list(left_val)
    top_value = r
    ti = 0
    while ti < a and top_r[ti] == -1:
        top_value += 1
        out.append(top_value)
        ti += 1
    for k in range(m):
        out.append(lower_val[k])
        while ti < a and top_r[ti] == k:
            top_value += 1
            out.append(top_value)
            ti += 1
    assert len(out) == n
    return Permutation._trusted(tuple(out))


def render_ascii(cg: CanonicalGridding) -> str:
    """Plot with ``|`` after column ``c`` and ``-`` between rows ``r`` and ``r + 1``."""
    g = cg.gridded
    perm = g.perm if g else rebuild(cg)
    c, r = cg.c, cg.r
    n = len(perm)
    lines = []
    for val in range(n, 0, -1):
        row = []
        for pos in range(1, n + 1):
            row.append("o" if perm[pos - 1] == val else ".")
            if pos == c:
                row.append("|")
        lines.append(" ".join(row))
        if val == r + 1:
            lines.append("-" * (2 * n + (2 if 0 < c else 0) - 1))
    return "\n".join(lines)
