"""Finite filtered spaces.

A filtered space is a finite point set together with a descending chain of
symmetric reflexive relations E_1 >= E_2 >= ... >= E_m, each one recording
"closeness at a scale".  Scale indices are 1-based and 1 is the coarsest
scale, so a larger index always means a finer relation.  All values are
immutable after construction and every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class SpaceError(ValueError):
    """Base class for filtered-space validation failures."""


class NonSymmetric(SpaceError):
    def __init__(self, scale, pair=None):
        self.scale = scale
        self.pair = pair
        super().__init__(f"scale {scale} is not symmetric (pair {pair!r} has no mirror)")


class NonReflexive(SpaceError):
    def __init__(self, scale, point=None):
        self.scale = scale
        self.point = point
        super().__init__(f"scale {scale} is not reflexive at point {point!r}")


class NotNested(SpaceError):
    def __init__(self, scale, pair=None):
        self.scale = scale
        self.pair = pair
        super().__init__(
            f"scale {scale + 1} is not contained in scale {scale} (extra pair {pair!r})"
        )


class HausdorffViolated(SpaceError):
    def __init__(self, pair=None):
        self.pair = pair
        super().__init__(f"hausdorff flag set but finest scale is not the diagonal ({pair!r})")


class AsymmetricMatrix(SpaceError):
    pass


class NonDecreasingRadii(SpaceError):
    pass


class UnknownPoint(SpaceError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"unknown point {point!r}")


class BadScale(SpaceError):
    def __init__(self, scale, depth):
        self.scale = scale
        super().__init__(f"scale index {scale} out of range 1..{depth}")


class ScaleMismatch(SpaceError):
    pass


class EndpointMismatch(SpaceError):
    pass


@dataclass(frozen=True)
class FilteredSpace:
    """Finite point set with a descending chain of entourages.

    ``scales[k-1]`` holds scale k as a frozenset of normalized non-diagonal
    pairs ``(a, b)`` with a before b in point order; the diagonal is implicit.
    ``hausdorff`` asserts that the finest scale is exactly the diagonal.
    """

    points: tuple
    scales: tuple
    hausdorff: bool = False

    def __post_init__(self):
        index = {p: i for i, p in enumerate(self.points)}
        object.__setattr__(self, "_index", index)
        adjacency = []
        for pairs in self.scales:
            nbrs = {p: set() for p in self.points}
            for a, b in pairs:
                nbrs[a].add(b)
                nbrs[b].add(a)
            adjacency.append(
                {p: tuple(sorted(nbrs[p], key=index.__getitem__)) for p in self.points}
            )
        object.__setattr__(self, "_adjacency", tuple(adjacency))
        object.__setattr__(self, "_full", {})

    @property
    def depth(self) -> int:
        return len(self.scales)

    def index(self, point) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise UnknownPoint(point) from None

    def check_scale(self, k: int) -> int:
        if not 1 <= k <= self.depth:
            raise BadScale(k, self.depth)
        return k

    def pair(self, x, y):
        """Normalized non-diagonal pair, or None for a diagonal pair."""
        i, j = self.index(x), self.index(y)
        if i == j:
            return None
        return (x, y) if i < j else (y, x)

    def related(self, k: int, x, y) -> bool:
        self.check_scale(k)
        p = self.pair(x, y)
        return p is None or p in self.scales[k - 1]

    def neighbors(self, k: int, x) -> tuple:
        """Points other than x related to x at scale k, in point order."""
        self.check_scale(k)
        self.index(x)
        return self._adjacency[k - 1][x]

    def scale_pairs(self, k: int) -> frozenset:
        self.check_scale(k)
        return self.scales[k - 1]

    def full_relation(self, k: int) -> frozenset:
        """Scale k as a set of ordered pairs, diagonal included."""
        self.check_scale(k)
        cached = self._full.get(k)
        if cached is None:
            pairs = {(p, p) for p in self.points}
            for a, b in self.scales[k - 1]:
                pairs.add((a, b))
                pairs.add((b, a))
            cached = frozenset(pairs)
            self._full[k] = cached
        return cached

    def sorted_pairs(self, k: int) -> list:
        key = self._index.__getitem__
        return sorted(self.scales[k - 1], key=lambda ab: (key(ab[0]), key(ab[1])))

    def sort_points(self, pts: Iterable) -> tuple:
        return tuple(sorted(pts, key=self._index.__getitem__))


@dataclass(frozen=True)
class Chain:
    """A scale index together with a point sequence walking that scale."""

    scale: int
    seq: tuple

    def __post_init__(self):
        object.__setattr__(self, "seq", tuple(self.seq))
        if not self.seq:
            raise SpaceError("chain must be nonempty")

    @property
    def start(self):
        return self.seq[0]

    @property
    def end(self):
        return self.seq[-1]


@dataclass(frozen=True)
class Partition:
    """Pairwise disjoint blocks covering a carrier set."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        lookup = {}
        for block in self.blocks:
            for p in block:
                if p in lookup:
                    raise SpaceError(f"point {p!r} occurs in two blocks")
                lookup[p] = block
        object.__setattr__(self, "_lookup", lookup)

    @property
    def carrier(self) -> frozenset:
        return frozenset(self._lookup)

    def block_of(self, point) -> tuple:
        try:
            return self._lookup[point]
        except KeyError:
            raise UnknownPoint(point) from None

    def __len__(self):
        return len(self.blocks)


def _normalize_scale(points, index, raw_pairs, k):
    """Strict symmetry/reflexivity check of an ordered pair list for scale k."""
    listed = set()
    for a, b in raw_pairs:
        if a not in index:
            raise UnknownPoint(a)
        if b not in index:
            raise UnknownPoint(b)
        listed.add((a, b))
    for a, b in sorted(listed, key=lambda ab: (index[ab[0]], index[ab[1]])):
        if a != b and (b, a) not in listed:
            raise NonSymmetric(k, (a, b))
    for p in points:
        if (p, p) not in listed:
            raise NonReflexive(k, p)
    normalized = set()
    for a, b in listed:
        if a != b:
            ia, ib = index[a], index[b]
            normalized.add((a, b) if ia < ib else (b, a))
    return frozenset(normalized)


def validate_space(points: Sequence, scales: Sequence, hausdorff: bool = False) -> FilteredSpace:
    """Build a FilteredSpace from explicit ordered pair lists, one per scale.

    Each listed scale must already be symmetric and reflexive; nesting is
    checked, never repaired.  Raises NonSymmetric, NonReflexive, NotNested or
    HausdorffViolated accordingly.
    """
    points = tuple(points)
    if len(set(points)) != len(points):
        raise SpaceError("duplicate point identifiers")
    if not scales:
        raise SpaceError("at least one scale is required")
    index = {p: i for i, p in enumerate(points)}
    normalized = [
        _normalize_scale(points, index, raw, k) for k, raw in enumerate(scales, start=1)
    ]
    for k in range(len(normalized) - 1):
        extra = normalized[k + 1] - normalized[k]
        if extra:
            witness = sorted(extra, key=lambda ab: (index[ab[0]], index[ab[1]]))[0]
            raise NotNested(k + 1, witness)
    if hausdorff and normalized[-1]:
        witness = sorted(normalized[-1], key=lambda ab: (index[ab[0]], index[ab[1]]))[0]
        raise HausdorffViolated(witness)
    return FilteredSpace(points, tuple(normalized), hausdorff)


def from_metric(matrix: Sequence[Sequence], radii: Sequence, points: Sequence = None) -> FilteredSpace:
    """Threshold a distance matrix at strictly decreasing radii.

    Scale k relates x and y when d(x, y) <= r_k (closed entourages).  The
    hausdorff flag is set exactly when the finest radius lies below the
    smallest positive distance.
    """
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise AsymmetricMatrix("distance matrix is not square")
    for i in range(n):
        if matrix[i][i] != 0:
            raise AsymmetricMatrix(f"nonzero diagonal entry at {i}")
        for j in range(n):
            if matrix[i][j] != matrix[j][i]:
                raise AsymmetricMatrix(f"matrix[{i}][{j}] != matrix[{j}][{i}]")
            if matrix[i][j] < 0:
                raise AsymmetricMatrix(f"negative distance at ({i}, {j})")
    radii = tuple(radii)
    if not radii:
        raise NonDecreasingRadii("at least one radius is required")
    for r, s in zip(radii, radii[1:]):
        if not s < r:
            raise NonDecreasingRadii(f"radii must strictly decrease, got {r} then {s}")
    if radii[-1] < 0:
        raise NonDecreasingRadii("radii must be nonnegative")
    if points is None:
        points = tuple(range(n))
    else:
        points = tuple(points)
        if len(points) != n:
            raise SpaceError("point list does not match matrix size")
    scales = []
    for r in radii:
        pairs = set()
        for i in range(n):
            for j in range(i + 1, n):
                if matrix[i][j] <= r:
                    pairs.add((points[i], points[j]))
        scales.append(frozenset(pairs))
    positive = [matrix[i][j] for i in range(n) for j in range(i + 1, n)]
    min_positive = min((d for d in positive if d > 0), default=None)
    hausdorff = min_positive is None or radii[-1] < min_positive
    return FilteredSpace(points, tuple(scales), hausdorff)


def subspace(space: FilteredSpace, keep: Iterable) -> FilteredSpace:
    """Restriction of every scale to a subset of points, in the original order."""
    keep = set(keep)
    for p in keep:
        space.index(p)
    points = tuple(p for p in space.points if p in keep)
    scales = tuple(
        frozenset((a, b) for a, b in pairs if a in keep and b in keep)
        for pairs in space.scales
    )
    return FilteredSpace(points, scales, hausdorff=not scales[-1])


def is_chain(space: FilteredSpace, k: int, seq: Sequence) -> bool:
    """True when every consecutive pair of seq lies in scale k."""
    space.check_scale(k)
    seq = tuple(seq)
    if not seq:
        raise SpaceError("chain must be nonempty")
    for p in seq:
        space.index(p)
    return all(space.related(k, a, b) for a, b in zip(seq, seq[1:]))


def chain(space: FilteredSpace, k: int, seq: Sequence) -> Chain:
    """Validated Chain constructor."""
    if not is_chain(space, k, seq):
        raise SpaceError(f"not a chain at scale {k}: {tuple(seq)!r}")
    return Chain(k, tuple(seq))


def chain_components(space: FilteredSpace, k: int) -> Partition:
    """Connected components of the scale-k closeness graph.

    The space is chain connected at scale k exactly when there is one block.
    """
    space.check_scale(k)
    seen = set()
    blocks = []
    for start in space.points:
        if start in seen:
            continue
        block = [start]
        seen.add(start)
        frontier = [start]
        while frontier:
            nxt = []
            for p in frontier:
                for q in space.neighbors(k, p):
                    if q not in seen:
                        seen.add(q)
                        block.append(q)
                        nxt.append(q)
            frontier = nxt
        blocks.append(space.sort_points(block))
    return Partition(tuple(blocks))


def concat_chains(c: Chain, d: Chain) -> Chain:
    """Concatenation keeping one copy of the shared endpoint."""
    if c.scale != d.scale:
        raise ScaleMismatch(f"scales {c.scale} and {d.scale} differ")
    if c.end != d.start:
        raise EndpointMismatch(f"chain ends at {c.end!r} but next starts at {d.start!r}")
    return Chain(c.scale, c.seq + d.seq[1:])


def invert_chain(c: Chain) -> Chain:
    return Chain(c.scale, tuple(reversed(c.seq)))
