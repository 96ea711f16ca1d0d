"""Dyadic cubes, support trees and exact shell decompositions.

A dyadic cube at level j with integer index k is the half-open box
2**-j * ([0,1)**n + k).  Half-openness makes same-level cubes a partition of
space, so all measure bookkeeping below is exact dyadic-rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple


class DimensionMismatchError(ValueError):
    """Two cubes of different ambient dimension were combined."""


@dataclass(frozen=True)
class DyadicCube:
    """The half-open cube 2**-level * ([0,1)**dim + index)."""

    dim: int
    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        idx = self.index
        if isinstance(idx, int):
            idx = (idx,)
        idx = tuple(int(k) for k in idx)
        if len(idx) != self.dim:
            raise ValueError(f"index length {len(idx)} != dim {self.dim}")
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "level", int(self.level))

    @classmethod
    def make(cls, level: int, index, dim: int | None = None) -> "DyadicCube":
        """Build a cube from a level and an index (int or iterable)."""
        if isinstance(index, int):
            idx = (index,) if dim in (None, 1) else (index,) * dim
        else:
            idx = tuple(int(k) for k in index)
        return cls(dim if dim is not None else len(idx), level, idx)

    @classmethod
    def unit(cls, dim: int) -> "DyadicCube":
        """[0,1)**dim."""
        return cls(dim, 0, (0,) * dim)

    # -- geometry -----------------------------------------------------------

    @property
    def side_log2(self) -> int:
        return -self.level

    @property
    def volume_log2(self) -> int:
        return -self.level * self.dim

    @property
    def volume(self) -> Fraction:
        e = self.level * self.dim
        return Fraction(1, 2**e) if e >= 0 else Fraction(2**-e)

    @property
    def lower_corner(self) -> tuple[Fraction, ...]:
        j = self.level
        if j >= 0:
            return tuple(Fraction(k, 2**j) for k in self.index)
        return tuple(Fraction(k * 2**-j) for k in self.index)

    def sort_key(self) -> tuple:
        return (self.level, self.index)

    # -- tree structure -----------------------------------------------------

    def contains(self, other: "DyadicCube") -> bool:
        """True iff ``other`` is a subset of this cube (as half-open boxes)."""
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"cannot compare cubes of dim {self.dim} and {other.dim}"
            )
        shift = other.level - self.level
        if shift < 0:
            return False
        return all((kq >> shift) == kp for kq, kp in zip(other.index, self.index))

    def ancestor_at(self, level: int) -> "DyadicCube":
        """The unique cube at the given (coarser) level containing this one."""
        if level > self.level:
            raise ValueError(
                f"level {level} is finer than the cube's own level {self.level}"
            )
        shift = self.level - level
        return DyadicCube(self.dim, level, tuple(k >> shift for k in self.index))

    def parent(self) -> "DyadicCube":
        return self.ancestor_at(self.level - 1)

    def child(self, code: int) -> "DyadicCube":
        """Child cube selected by a bit code in [0, 2**dim)."""
        if not 0 <= code < (1 << self.dim):
            raise ValueError(f"child code {code} out of range for dim {self.dim}")
        idx = tuple(2 * k + ((code >> d) & 1) for d, k in enumerate(self.index))
        return DyadicCube(self.dim, self.level + 1, idx)

    def children(self) -> Iterator["DyadicCube"]:
        for code in range(1 << self.dim):
            yield self.child(code)

    def path_from(self, ancestor: "DyadicCube") -> tuple[int, ...]:
        """Child-code path from ``ancestor`` down to this cube."""
        if not ancestor.contains(self):
            raise ValueError(f"{ancestor} does not contain {self}")
        codes = []
        for lvl in range(ancestor.level + 1, self.level + 1):
            shift = self.level - lvl
            code = 0
            for d, k in enumerate(self.index):
                code |= ((k >> shift) & 1) << d
            codes.append(code)
        return tuple(codes)

    def descendant(self, path: Iterable[int]) -> "DyadicCube":
        cube = self
        for code in path:
            cube = cube.child(code)
        return cube

    def __repr__(self) -> str:
        k = self.index[0] if self.dim == 1 else list(self.index)
        return f"Q(j={self.level}, k={k})"


def contains(outer: DyadicCube, inner: DyadicCube) -> bool:
    """Module-level alias for :meth:`DyadicCube.contains`."""
    return outer.contains(inner)


def ancestor_at(cube: DyadicCube, level: int) -> DyadicCube:
    """Module-level alias for :meth:`DyadicCube.ancestor_at`."""
    return cube.ancestor_at(level)


@dataclass(frozen=True)
class SupportTree:
    """A finite set of dyadic cubes hanging under a declared root cube."""

    root: DyadicCube
    nodes: frozenset[DyadicCube]
    max_depth: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        jr = self.root.level
        for q in self.nodes:
            if not self.root.contains(q):
                raise ValueError(f"node {q} lies outside the root {self.root}")
            if not jr <= q.level <= jr + self.max_depth:
                raise ValueError(
                    f"node {q} at level {q.level} violates the depth bound "
                    f"[{jr}, {jr + self.max_depth}]"
                )

    @classmethod
    def build(
        cls,
        nodes: Iterable[DyadicCube],
        root: DyadicCube | None = None,
        max_depth: int | None = None,
    ) -> "SupportTree":
        nodes = frozenset(nodes)
        if root is None:
            if not nodes:
                raise ValueError("cannot infer a root from an empty node set")
            dim = next(iter(nodes)).dim
            root = DyadicCube.unit(dim)
        depth = max((q.level - root.level for q in nodes), default=0)
        if max_depth is None:
            max_depth = depth
        elif max_depth < depth:
            raise ValueError(f"max_depth {max_depth} below actual depth {depth}")
        return cls(root, nodes, max_depth)


class Shell(NamedTuple):
    """One piece of a shell decomposition.

    ``region`` is the cube whose shell this is (the geometric region is that
    cube minus its support descendants), ``active`` is the set of support
    cubes containing every point of the shell, ``measure`` is the exact
    Lebesgue measure of the shell.
    """

    region: DyadicCube
    active: frozenset[DyadicCube]
    measure: Fraction


def _chain_in(tree: SupportTree, cube: DyadicCube) -> frozenset[DyadicCube]:
    """Support cubes of ``tree`` that contain ``cube``."""
    chain = set()
    lo = tree.root.level
    for lvl in range(lo, cube.level + 1):
        a = cube.ancestor_at(lvl)
        if a in tree.nodes:
            chain.add(a)
    return frozenset(chain)


def shell_decomposition(tree: SupportTree, region: DyadicCube) -> list[Shell]:
    """Partition ``region`` into shells on which the active support is constant.

    Returns one shell per support node inside the region (the node minus its
    support descendants) plus, when the region itself is not a support node,
    a top shell for the part of the region not covered by any support cube.
    Zero-measure shells are dropped; the returned measures sum to the measure
    of the region exactly.
    """
    root = tree.root
    if not (root.contains(region) or region.contains(root)):
        raise ValueError(f"{region} is neither inside nor an ancestor of the root")
    inside = [q for q in tree.nodes if region.contains(q)]
    inside.sort(key=lambda q: q.path_from(region))
    paths = [q.path_from(region) for q in inside]

    parent = [-1] * len(inside)
    stack: list[int] = []
    for i, pth in enumerate(paths):
        while stack and paths[stack[-1]] != pth[: len(paths[stack[-1]])]:
            stack.pop()
        parent[i] = stack[-1] if stack else -1
        stack.append(i)

    child_vol = [Fraction(0)] * len(inside)
    top_vol = Fraction(0)
    for i, q in enumerate(inside):
        if parent[i] >= 0:
            child_vol[parent[i]] += q.volume
        else:
            top_vol += q.volume

    shells: list[Shell] = []
    if region not in tree.nodes:
        mu_top = region.volume - top_vol
        if mu_top != 0:
            shells.append(Shell(region, _chain_in(tree, region), mu_top))
    for i, q in enumerate(inside):
        mu = q.volume - child_vol[i]
        if mu != 0:
            shells.append(Shell(q, _chain_in(tree, q), mu))
    return shells
