"""Rooted trees from separated ladders, and the grid-to-tree-product map.

One tree per color: the root stands for the whole space at level 0, and each
member of the color's family at level j becomes a node at depth j.  A node's
parent is the member at the greatest lower level whose point set contains it
(containment is non-strict, so a repeated singleton chains through every
level); members contained in nothing land directly under the root.  Edges
are weighted by level difference, so tree distance is level[u] + level[v]
- 2 * level[lca].

A cone grid point (z, j*R) maps, in each tree, to the level-j node nearest
to z; the product metric is the l1 sum over trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .char_seq import CharSequence
from .hyp_cone import ConeGrid
from .metric_core import FiniteMetricSpace


class TreeError(ValueError):
    """Raised when a ladder does not define a valid tree."""


class RadialCheckError(AssertionError):
    """Raised when an embedded ray climbs its trees too fast."""


@dataclass(frozen=True, eq=False)
class RootedTree:
    """Tree over one color of a separated ladder.

    Attributes:
        level: per-node depth, root 0.
        parent: per-node parent id, root -1.
        members: per-node point index set; the root owns every point.
        refs: per-node (ladder level, member index), root (0, -1).
    """

    space: FiniteMetricSpace
    color: int
    depth: int
    level: np.ndarray
    parent: np.ndarray
    members: tuple[frozenset, ...]
    refs: tuple[tuple[int, int], ...]

    @property
    def n_nodes(self) -> int:
        return len(self.members)

    def children(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.parent == u)

    def nodes_at_level(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.level == j)

    @cached_property
    def _chains(self) -> np.ndarray:
        """(n_nodes, depth+1) ancestor chains, self first, padded with the
        root id (a shared ancestor, so padding never invents one)."""
        out = np.zeros((self.n_nodes, self.depth + 1), dtype=np.int64)
        for u in range(self.n_nodes):
            cur, k = u, 0
            while cur != -1:
                out[u, k] = cur
                cur = int(self.parent[cur])
                k += 1
        return out

    def ancestor_chain(self, u: int) -> list[int]:
        chain = [u]
        while self.parent[chain[-1]] != -1:
            chain.append(int(self.parent[chain[-1]]))
        return chain

    def lca_level(self, u: int, v: int) -> int:
        cu = set(self.ancestor_chain(u))
        best = 0
        for w in self.ancestor_chain(v):
            if w in cu:
                best = max(best, int(self.level[w]))
        return best

    def dist(self, u: int, v: int) -> int:
        return int(self.level[u] + self.level[v] - 2 * self.lca_level(u, v))

    @cached_property
    def all_pairs_dist(self) -> np.ndarray:
        """(n_nodes, n_nodes) integer tree distances via chain matching."""
        ch = self._chains
        lv = self.level.astype(np.int16)
        width = ch.shape[1]
        lca = np.zeros((self.n_nodes, self.n_nodes), dtype=np.int16)
        for a in range(width):
            ca = ch[:, a]
            la = lv[ca]
            for b in range(width):
                match = ca[:, None] == ch[None, :, b]
                np.maximum(lca, np.where(match, la[:, None], 0), out=lca)
        return lv[:, None] + lv[None, :] - 2 * lca

    def steps_to_level(self, u: int, i: int) -> int:
        """Parent hops from u until the level drops to i or below."""
        steps, cur = 0, u
        while self.level[cur] > i:
            cur = int(self.parent[cur])
            if cur == -1:
                raise TreeError("walked past the root")
            steps += 1
        return steps

    def validate(self) -> None:
        if self.level[0] != 0 or self.parent[0] != -1:
            raise TreeError("node 0 must be the level-0 root")
        if np.count_nonzero(self.level == 0) != 1:
            raise TreeError("exactly one root expected")
        for u in range(1, self.n_nodes):
            p = int(self.parent[u])
            if not 0 <= p < self.n_nodes:
                raise TreeError(f"node {u} has invalid parent {p}")
            if self.level[p] >= self.level[u]:
                raise TreeError(f"node {u} does not descend in level")
            if not self.members[u] <= self.members[p]:
                raise TreeError(f"node {u} is not contained in its parent")
            if not self.members[u]:
                raise TreeError(f"node {u} has an empty member")

    def __repr__(self):
        return f"RootedTree(color={self.color}, nodes={self.n_nodes}, depth={self.depth})"


def build_tree(seq: CharSequence, color: int) -> RootedTree:
    """Tree for one color; see module docstring for the parent rule."""
    if not 0 <= color < seq.n_colors:
        raise TreeError(f"color {color} outside 0..{seq.n_colors - 1}")
    space = seq.space
    node_members: list[frozenset] = [frozenset(range(space.n))]
    refs: list[tuple[int, int]] = [(0, -1)]
    levels = [0]
    level_nodes: dict[int, list[int]] = {0: [0]}
    for j in range(1, seq.depth + 1):
        fam = seq.level(j).colors[color]
        ids = []
        for i, u in enumerate(fam.members):
            node_members.append(u.indices)
            refs.append((j, i))
            levels.append(j)
            ids.append(len(node_members) - 1)
        level_nodes[j] = ids
    # per level, which nodes own each point, for fast candidate lookup
    owners: dict[int, dict[int, list[int]]] = {}
    for j in range(1, seq.depth + 1):
        by_point: dict[int, list[int]] = {}
        for nid in level_nodes[j]:
            for p in node_members[nid]:
                by_point.setdefault(p, []).append(nid)
        owners[j] = by_point
    parent = np.full(len(node_members), -1, dtype=np.int64)
    for j in range(1, seq.depth + 1):
        for nid in level_nodes[j]:
            mem = node_members[nid]
            probe = next(iter(mem))
            chosen = -1
            for jc in range(j - 1, 0, -1):
                cands = [c for c in owners[jc].get(probe, ()) if mem <= node_members[c]]
                if len(cands) > 1:
                    raise TreeError(
                        f"ambiguous containment at level {j} color {color}: "
                        f"member {refs[nid][1]} fits {len(cands)} level-{jc} members"
                    )
                if cands:
                    chosen = cands[0]
                    break
            parent[nid] = chosen if chosen != -1 else 0
    tree = RootedTree(
        space=space,
        color=color,
        depth=seq.depth,
        level=np.asarray(levels, dtype=np.int64),
        parent=parent,
        members=tuple(node_members),
        refs=tuple(refs),
    )
    tree.validate()
    return tree


def embed_point(tree: RootedTree, z: int, j: int) -> int:
    """Node at tree level j nearest to z; ties pick the smallest node id."""
    if j == 0:
        return 0
    ids = tree.nodes_at_level(j)
    if ids.size == 0:
        raise TreeError(f"tree has no nodes at level {j}")
    best, best_d = -1, np.inf
    for nid in ids:
        cols = np.fromiter(tree.members[nid], dtype=int, count=len(tree.members[nid]))
        d = float(tree.space.dist[z, cols].min())
        if d < best_d:
            best, best_d = int(nid), d
    return best


@dataclass(frozen=True, eq=False)
class ProductEmbedding:
    """Assignment of every grid point to one node per tree."""

    grid: ConeGrid
    trees: tuple[RootedTree, ...]
    table: np.ndarray  # (n_points, n_trees)
    mode: str = "l1"

    def __post_init__(self):
        if self.mode != "l1":
            raise ValueError(f"unsupported product mode {self.mode!r}")
        if self.table.shape != (self.grid.n_points, len(self.trees)):
            raise ValueError("embedding table shape mismatch")

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def product_dist(self, i: int, k: int) -> int:
        return int(sum(
            t.dist(int(self.table[i, a]), int(self.table[k, a]))
            for a, t in enumerate(self.trees)
        ))

    @cached_property
    def all_pairs_dist(self) -> np.ndarray:
        """(n_points, n_points) integer l1 product distances."""
        n = self.grid.n_points
        out = np.zeros((n, n), dtype=np.int32)
        for a, t in enumerate(self.trees):
            td = t.all_pairs_dist
            col = self.table[:, a]
            out += td[np.ix_(col, col)].astype(np.int32)
        return out

    def __repr__(self):
        return (
            f"ProductEmbedding(points={self.grid.n_points}, trees={self.n_trees}, "
            f"mode={self.mode})"
        )


def embed_grid(seq: CharSequence, grid: ConeGrid,
               trees: tuple[RootedTree, ...] | None = None,
               mode: str = "l1") -> ProductEmbedding:
    """Embed every grid point into the product of the ladder's trees."""
    if grid.space is not seq.space:
        raise TreeError("grid and ladder live on different spaces")
    if grid.depth != seq.depth:
        raise TreeError(
            f"grid depth {grid.depth} does not match ladder depth {seq.depth}"
        )
    if trees is None:
        trees = tuple(build_tree(seq, a) for a in range(seq.n_colors))
    table = np.zeros((grid.n_points, len(trees)), dtype=np.int64)
    for a, tree in enumerate(trees):
        for j in range(1, grid.depth + 1):
            ids = tree.nodes_at_level(j)
            rows = np.empty((ids.size, seq.space.n))
            for k, nid in enumerate(ids):
                cols = np.fromiter(tree.members[nid], dtype=int,
                                   count=len(tree.members[nid]))
                rows[k] = seq.space.dist[:, cols].min(axis=1)
            nearest = ids[rows.argmin(axis=0)]
            lo = grid.index(j, 0)
            table[lo: lo + seq.space.n, a] = nearest
    return ProductEmbedding(grid=grid, trees=trees, table=table, mode=mode)


def rough_triangle_bound(p: float, q: float, t: float) -> bool:
    """Whether p + q <= 3t; holds for any metric triple with t >= p, since
    q <= p + t <= 2t."""
    return p + q <= 3 * t


def radial_check(emb: ProductEmbedding) -> dict:
    """Exhaustive climb test: for every grid point at level j and every
    target level i < j, the slowest tree must take enough parent hops M that
    m * (M + 1) >= j - i + 1, i.e. the trees jointly pass through every
    intermediate level.  Raises RadialCheckError on the first violation.
    """
    m = emb.n_trees
    checks = 0
    max_m = 0
    for idx in range(1, emb.grid.n_points):
        j = int(emb.grid.point_level[idx])
        z = int(emb.grid.point_z[idx])
        for i in range(j):
            steps = max(
                tree.steps_to_level(int(emb.table[idx, a]), i)
                for a, tree in enumerate(emb.trees)
            )
            checks += 1
            max_m = max(max_m, steps)
            if m * (steps + 1) < j - i + 1:
                raise RadialCheckError(
                    f"grid point (z={z}, level={j}) reaches level {i} in "
                    f"{steps} hops: {m}*({steps}+1) < {j - i + 1}"
                )
    return {"checks": checks, "max_steps": max_m, "failures": 0}
