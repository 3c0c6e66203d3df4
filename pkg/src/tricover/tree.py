"""Unrooted binary phylogenetic trees with exact rational edge lengths.

A tree value is immutable after construction; every operation returns a new
value or a plain answer, so trees can be shared freely across tasks.  Vertex
ids are opaque integers that are stable within one tree value; code that needs
a reproducible name for an interior vertex should use
:meth:`PhyloTree.component_triple`, which names it by the least taxon of each
of the three components obtained by deleting the vertex.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from .errors import TreeError

# A split is the bipartition of the taxon set induced by cutting one edge.
# Stored canonically: both blocks sorted, the block holding the least taxon first.
Split = tuple[tuple[str, ...], tuple[str, ...]]

# A resolved quartet topology: two disjoint leaf pairs, each sorted, lesser first.
Quartet = tuple[tuple[str, str], tuple[str, str]]

_RESERVED = set("(),:;")


def is_valid_label(label: str) -> bool:
    """Labels are nonempty and avoid whitespace and Newick punctuation."""
    return (
        isinstance(label, str)
        and bool(label)
        and not any(ch.isspace() or ch in _RESERVED for ch in label)
    )


def as_length(value) -> Fraction:
    """Coerce to an exact rational and require it to be strictly positive."""
    try:
        q = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise TreeError(f"bad edge length {value!r}: {exc}") from None
    if q <= 0:
        raise TreeError(f"non-positive edge length {value!r}")
    return q


def make_quartet(pair_one: tuple[str, str], pair_two: tuple[str, str]) -> Quartet:
    """Canonical form of a quartet topology given its two leaf pairs."""
    a = tuple(sorted(pair_one))
    b = tuple(sorted(pair_two))
    if set(a) & set(b):
        raise ValueError(f"quartet pairs overlap: {a} {b}")
    return (a, b) if a <= b else (b, a)


class PhyloTree:
    """A binary phylogenetic tree: leaves bijectively labelled, interior degree 3.

    Parameters
    ----------
    edges : iterable of (u, v, length)
        Undirected edges with strictly positive rational lengths.  Lengths may
        be ints, strings ("3", "7/2", "0.25") or Fractions.
    leaf_labels : mapping vertex id -> taxon label
        Must cover exactly the degree-1 vertices.
    """

    def __init__(self, edges: Iterable[tuple], leaf_labels: dict[int, str]):
        adj: dict[int, dict[int, Fraction]] = {}
        for u, v, length in edges:
            if u == v:
                raise TreeError(f"self-loop at vertex {u}")
            q = as_length(length)
            adj.setdefault(u, {})
            adj.setdefault(v, {})
            if v in adj[u]:
                raise TreeError(f"duplicate edge {u}-{v}")
            adj[u][v] = q
            adj[v][u] = q
        if not adj:
            raise TreeError("empty tree")

        n_vertices = len(adj)
        n_edges = sum(len(nbrs) for nbrs in adj.values()) // 2
        if n_edges != n_vertices - 1:
            raise TreeError(f"{n_edges} edges on {n_vertices} vertices is not a tree")
        # Connectivity: walk from an arbitrary vertex.
        seen = {next(iter(adj))}
        stack = [next(iter(adj))]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n_vertices:
            raise TreeError("graph is not connected")

        leaves = {v for v, nbrs in adj.items() if len(nbrs) == 1}
        if set(leaf_labels) != leaves:
            raise TreeError(
                f"leaf labels must cover exactly the degree-1 vertices "
                f"(labelled {sorted(leaf_labels)}, leaves {sorted(leaves)})"
            )
        for v, nbrs in adj.items():
            if v not in leaves and len(nbrs) != 3:
                raise TreeError(f"interior vertex {v} has degree {len(nbrs)}, want 3")
        for label in leaf_labels.values():
            if not is_valid_label(label):
                raise TreeError(f"bad taxon label {label!r}")
        if len(set(leaf_labels.values())) != len(leaf_labels):
            dupes = sorted(
                lab
                for lab in set(leaf_labels.values())
                if sum(1 for x in leaf_labels.values() if x == lab) > 1
            )
            raise TreeError(f"duplicate taxon label(s) {dupes}")
        if len(leaves) < 3:
            raise TreeError(f"need at least 3 taxa, got {len(leaves)}")

        self._adj = adj
        self._leaf_label = dict(leaf_labels)
        self._label_leaf = {lab: v for v, lab in leaf_labels.items()}
        self._taxa = frozenset(leaf_labels.values())
        self._dist_cache: dict[tuple[str, str], Fraction] | None = None

    # -- basic accessors -------------------------------------------------

    @property
    def taxa(self) -> frozenset[str]:
        return self._taxa

    @property
    def n_taxa(self) -> int:
        return len(self._taxa)

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def leaves(self) -> list[int]:
        return sorted(self._leaf_label)

    def interior_vertices(self) -> list[int]:
        return sorted(v for v in self._adj if v not in self._leaf_label)

    def edges(self) -> list[tuple[int, int, Fraction]]:
        out = []
        for u, nbrs in self._adj.items():
            for v, q in nbrs.items():
                if u < v:
                    out.append((u, v, q))
        return sorted(out)

    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self._adj[v]))

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edge_length(self, u: int, v: int) -> Fraction:
        return self._adj[u][v]

    def is_leaf(self, v: int) -> bool:
        return v in self._leaf_label

    def leaf(self, taxon: str) -> int:
        try:
            return self._label_leaf[taxon]
        except KeyError:
            raise TreeError(f"unknown taxon {taxon!r}") from None

    def label(self, v: int) -> str:
        return self._leaf_label[v]

    # -- paths, distances, medians ---------------------------------------

    def _path(self, u: int, v: int) -> list[int]:
        """Vertex sequence of the unique u..v path."""
        if u == v:
            return [u]
        parent = {u: None}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            if w == v:
                break
            for x in self._adj[w]:
                if x not in parent:
                    parent[x] = w
                    queue.append(x)
        path = [v]
        while path[-1] != u:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    def distance(self, x: str, y: str) -> Fraction:
        """Sum of edge lengths on the path between taxa x and y; 0 iff x == y."""
        u, v = self.leaf(x), self.leaf(y)
        path = self._path(u, v)
        return sum(
            (self._adj[a][b] for a, b in zip(path, path[1:])), start=Fraction(0)
        )

    def path_edges(self, x: str, y: str) -> list[tuple[int, int]]:
        """Edges (as sorted id pairs) on the path between taxa x and y."""
        path = self._path(self.leaf(x), self.leaf(y))
        return [(min(a, b), max(a, b)) for a, b in zip(path, path[1:])]

    def distance_matrix(self) -> dict[tuple[str, str], Fraction]:
        """All leaf-to-leaf distances, keyed by sorted taxon pairs (cached)."""
        if self._dist_cache is None:
            matrix: dict[tuple[str, str], Fraction] = {}
            for x in sorted(self._taxa):
                # One BFS per leaf; accumulate path lengths.
                start = self.leaf(x)
                acc: dict[int, Fraction] = {start: Fraction(0)}
                queue = deque([start])
                while queue:
                    w = queue.popleft()
                    for nbr, q in self._adj[w].items():
                        if nbr not in acc:
                            acc[nbr] = acc[w] + q
                            queue.append(nbr)
                for y in sorted(self._taxa):
                    if x < y:
                        matrix[(x, y)] = acc[self.leaf(y)]
            self._dist_cache = matrix
        return self._dist_cache

    def median(self, x: str, y: str, z: str) -> int:
        """The unique vertex lying on all three pairwise paths between x, y, z."""
        if len({x, y, z}) != 3:
            raise TreeError(f"median needs three distinct taxa, got {x},{y},{z}")
        u, v, w = self.leaf(x), self.leaf(y), self.leaf(z)
        common = (
            set(self._path(u, v)) & set(self._path(u, w)) & set(self._path(v, w))
        )
        assert len(common) == 1, f"median of {x},{y},{z} not unique: {common}"
        return common.pop()

    # -- components and splits -------------------------------------------

    def components_without(self, v: int) -> tuple[frozenset[str], ...]:
        """Taxon sets of the components of the tree minus interior vertex v.

        Ordered by least contained taxon; always three components.
        """
        if self.is_leaf(v):
            raise TreeError(f"vertex {v} is a leaf, not interior")
        comps = []
        for start in self._adj[v]:
            seen = {v, start}
            stack = [start]
            taxa = set()
            while stack:
                w = stack.pop()
                if w in self._leaf_label:
                    taxa.add(self._leaf_label[w])
                for x in self._adj[w]:
                    if x not in seen:
                        seen.add(x)
                        stack.append(x)
            comps.append(frozenset(taxa))
        return tuple(sorted(comps, key=min))

    def component_triple(self, v: int) -> tuple[str, str, str]:
        """Canonical name for interior vertex v: least taxon per component."""
        a, b, c = (min(comp) for comp in self.components_without(v))
        out = tuple(sorted((a, b, c)))
        return out  # type: ignore[return-value]

    def _split_of_edge(self, u: int, v: int) -> Split:
        seen = {v, u}
        stack = [u]
        side = set()
        while stack:
            w = stack.pop()
            if w in self._leaf_label:
                side.add(self._leaf_label[w])
            for x in self._adj[w]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        other = self._taxa - side
        block_a = tuple(sorted(side))
        block_b = tuple(sorted(other))
        if min(block_b) < min(block_a):
            block_a, block_b = block_b, block_a
        return (block_a, block_b)

    def splits(self) -> frozenset[Split]:
        """One split per edge (2n-3 of them, including the n trivial ones)."""
        return frozenset(self._split_of_edge(u, v) for u, v, _ in self.edges())

    def split_lengths(self) -> dict[Split, Fraction]:
        """Map each split to the length of the edge inducing it."""
        return {self._split_of_edge(u, v): q for u, v, q in self.edges()}

    def isomorphic(self, other: "PhyloTree", compare_lengths: bool = False) -> bool:
        """Label-preserving isomorphism, i.e. equal split sets.

        With ``compare_lengths``, the edge lengths behind matching splits must
        agree exactly as well.
        """
        if self.taxa != other.taxa:
            raise TreeError(
                f"taxon sets differ: {sorted(self.taxa)} vs {sorted(other.taxa)}"
            )
        if compare_lengths:
            return self.split_lengths() == other.split_lengths()
        return self.splits() == other.splits()

    # -- derived trees -----------------------------------------------------

    def restrict(self, taxa: Iterable[str]) -> "PhyloTree":
        """Subtree spanned by the given taxa, degree-2 vertices suppressed.

        Suppressed paths contribute the sum of their edge lengths.  Kept
        vertices retain their ids.
        """
        keep_taxa = frozenset(taxa)
        if not keep_taxa <= self._taxa:
            raise TreeError(f"unknown taxa {sorted(keep_taxa - self._taxa)}")
        if len(keep_taxa) < 3:
            raise TreeError(f"restriction needs at least 3 taxa, got {len(keep_taxa)}")

        # Prune to the Steiner tree of the kept leaves.
        adj = {v: dict(nbrs) for v, nbrs in self._adj.items()}
        keep_leaves = {self._label_leaf[t] for t in keep_taxa}
        fringe = [
            v
            for v, nbrs in adj.items()
            if len(nbrs) == 1 and v not in keep_leaves
        ]
        while fringe:
            v = fringe.pop()
            (nbr,) = adj[v]
            del adj[v]
            del adj[nbr][v]
            if len(adj[nbr]) == 1 and nbr not in keep_leaves:
                fringe.append(nbr)

        # Contract degree-2 chains between branching/leaf vertices.
        nodes = {v for v, nbrs in adj.items() if len(nbrs) != 2}
        new_edges = []
        visited = set()
        for v in sorted(nodes):
            for nbr in sorted(adj[v]):
                if (v, nbr) in visited:
                    continue
                length = adj[v][nbr]
                prev, cur = v, nbr
                while cur not in nodes:
                    (nxt,) = (w for w in adj[cur] if w != prev)
                    length += adj[cur][nxt]
                    prev, cur = cur, nxt
                visited.add((v, nbr))
                visited.add((cur, prev))
                lo, hi = (v, cur) if v < cur else (cur, v)
                new_edges.append((lo, hi, length))
        labels = {self._label_leaf[t]: t for t in keep_taxa}
        return PhyloTree(sorted(set(new_edges)), labels)

    def remove_leaf(self, taxon: str) -> "PhyloTree":
        """Drop one leaf and suppress its neighbour; needs at least 4 taxa."""
        if len(self._taxa) < 4:
            raise TreeError("cannot remove a leaf from a 3-taxon tree")
        leaf = self.leaf(taxon)
        (mid,) = self._adj[leaf]
        a, b = sorted(w for w in self._adj[mid] if w != leaf)
        merged = self._adj[mid][a] + self._adj[mid][b]
        edges = [
            (u, v, q)
            for u, v, q in self.edges()
            if leaf not in (u, v) and mid not in (u, v)
        ]
        edges.append((a, b, merged))
        labels = {v: lab for v, lab in self._leaf_label.items() if v != leaf}
        return PhyloTree(sorted(edges), labels)

    # -- quartets and cherries ---------------------------------------------

    def quartet_topology(self, a: str, b: str, x: str, y: str) -> Quartet:
        """The resolved quartet displayed on four distinct taxa.

        The pairing ab|xy holds exactly when the a..b path and the x..y path
        are vertex-disjoint; on a binary tree exactly one pairing qualifies.
        """
        if len({a, b, x, y}) != 4:
            raise TreeError(f"quartet needs four distinct taxa: {a},{b},{x},{y}")
        ids = {t: self.leaf(t) for t in (a, b, x, y)}
        pairings = [((a, b), (x, y)), ((a, x), (b, y)), ((a, y), (b, x))]
        resolved = []
        for p, q in pairings:
            path_p = set(self._path(ids[p[0]], ids[p[1]]))
            path_q = set(self._path(ids[q[0]], ids[q[1]]))
            if not path_p & path_q:
                resolved.append(make_quartet(p, q))
        assert len(resolved) == 1, f"quartet on {a},{b},{x},{y} not resolved"
        return resolved[0]

    def cherries(self) -> frozenset[tuple[str, str]]:
        """All pairs of leaves adjacent to a common vertex."""
        out = set()
        for v in self.interior_vertices():
            leaf_nbrs = sorted(
                self._leaf_label[w] for w in self._adj[v] if w in self._leaf_label
            )
            for pair in combinations(leaf_nbrs, 2):
                out.add(pair)
        return frozenset(out)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PhyloTree(n={self.n_taxa}, taxa={sorted(self._taxa)})"


def quartet_from_distances(
    dist: dict[tuple[str, str], Fraction], a: str, b: str, x: str, y: str
) -> Quartet:
    """Quartet topology from exact leaf distances via the four-point rule.

    The pairing with the strictly smallest distance sum is the displayed
    quartet; for a binary tree with positive lengths it agrees with
    :meth:`PhyloTree.quartet_topology`.
    """

    def d(p: str, q: str) -> Fraction:
        return dist[(p, q) if p < q else (q, p)]

    sums = [
        (d(a, b) + d(x, y), ((a, b), (x, y))),
        (d(a, x) + d(b, y), ((a, x), (b, y))),
        (d(a, y) + d(b, x), ((a, y), (b, x))),
    ]
    sums.sort(key=lambda item: item[0])
    assert sums[0][0] < sums[1][0], f"degenerate quartet {a},{b},{x},{y}"
    return make_quartet(*sums[0][1])


def iter_quadruples(taxa: Iterable[str]) -> Iterator[tuple[str, str, str, str]]:
    """Sorted 4-subsets of a taxon set."""
    return combinations(sorted(taxa), 4)
