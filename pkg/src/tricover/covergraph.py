"""The cover graph of a cord set and its 2-tree decompositions.

The cover graph has the taxa as vertices and the cords as edges.  Its
triangles coincide with the supported triples of the cover, which makes the
graph a purely combinatorial mirror of the tree-side analysis; everything
here is computed from the graph alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .covers import Cord, Triple, TripletCover, cord_set, make_triple
from .errors import CapacityError, SectionError

DECOMPOSITION_TRIANGLE_CAP = 12


class CoverGraph:
    """A simple undirected graph on a taxon set."""

    def __init__(self, vertices, edges):
        self.vertices = frozenset(vertices)
        self.edges = frozenset(edges)
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            if u == v or u not in adj or v not in adj:
                raise ValueError(f"bad edge {u},{v}")
            adj[u].add(v)
            adj[v].add(u)
        self.adjacency = adj

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CoverGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


def build_cover_graph(cover: TripletCover) -> CoverGraph:
    return CoverGraph(cover.taxa, cover.cords)


def triangles(graph: CoverGraph) -> frozenset[Triple]:
    """All 3-cliques, found edge by edge through common neighbourhoods."""
    out = set()
    for u, v in sorted(graph.edges):
        for w in graph.adjacency[u] & graph.adjacency[v]:
            if w > v:
                out.add(make_triple(u, v, w))
    return frozenset(out)


def _connected(adjacency: dict[str, set[str]], among: set[str]) -> bool:
    if not among:
        return True
    start = next(iter(among))
    seen = {start}
    stack = [start]
    while stack:
        for w in adjacency[stack.pop()]:
            if w in among and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == among


def is_two_connected(graph: CoverGraph) -> bool:
    """Connected with no cut vertex, checked by deleting each vertex in turn."""
    if len(graph.vertices) < 3:
        raise ValueError("2-connectivity test needs at least 3 vertices")
    everything = set(graph.vertices)
    if not _connected(graph.adjacency, everything):
        return False
    return all(
        _connected(graph.adjacency, everything - {v}) for v in sorted(everything)
    )


def is_two_tree(graph: CoverGraph) -> tuple[bool, list[str] | None]:
    """Recognise 2-trees by eliminating degree-2 vertices with adjacent
    neighbours; returns a witness construction order when successful.

    A degree-2 vertex whose neighbours are adjacent lies in exactly one
    triangle, so the elimination directly reverses the defining ordering.
    """
    n = len(graph.vertices)
    if n < 3:
        raise ValueError("a 2-tree needs at least 3 vertices")
    if len(graph.edges) != 2 * n - 3:
        return False, None
    adj = {v: set(nbrs) for v, nbrs in graph.adjacency.items()}
    eliminated: list[str] = []
    while len(adj) > 3:
        victim = None
        for v in sorted(adj):
            if len(adj[v]) == 2:
                a, b = adj[v]
                if b in adj[a]:
                    victim = v
                    break
        if victim is None:
            return False, None
        for w in adj[victim]:
            adj[w].discard(victim)
        del adj[victim]
        eliminated.append(victim)
    last = sorted(adj)
    if any(len(adj[v]) != 2 for v in last):
        return False, None
    return True, last + list(reversed(eliminated))


@dataclass(frozen=True)
class TwoTreeBlock:
    """One block of a decomposition, with the triple order that accreted it."""

    vertices: frozenset[str]
    edges: frozenset[Cord]
    order: tuple[Triple, ...]

    @property
    def triangles(self) -> frozenset[Triple]:
        return frozenset(self.order)


@dataclass(frozen=True)
class TwoTreeDecomposition:
    blocks: tuple[TwoTreeBlock, ...]

    def __post_init__(self):
        seen: set[Cord] = set()
        for block in self.blocks:
            if seen & block.edges:
                raise ValueError("block edge sets must be pairwise disjoint")
            seen |= block.edges
        if not self.blocks:
            raise ValueError("a decomposition needs at least one block")

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def vertex_union(self) -> frozenset[str]:
        out: set[str] = set()
        for block in self.blocks:
            out |= block.vertices
        return frozenset(out)

    @property
    def edge_union(self) -> frozenset[Cord]:
        out: set[Cord] = set()
        for block in self.blocks:
            out |= block.edges
        return frozenset(out)

    @property
    def triangle_partition(self) -> frozenset[Triple]:
        out: set[Triple] = set()
        for block in self.blocks:
            out |= block.triangles
        return frozenset(out)


def decomposition_from_section(section) -> TwoTreeDecomposition:
    """Greedy triple accretion: grow a block by repeatedly taking the least
    unused triple sharing two taxa with a triple already in the block, then
    start the next block.  Valid sections always produce 2-tree blocks; any
    violation means the input was not a section and raises
    :class:`SectionError`.
    """
    remaining = sorted(set(section))
    if not remaining:
        raise SectionError("empty triple family")
    blocks: list[TwoTreeBlock] = []
    while remaining:
        seq = [remaining.pop(0)]
        vertices = set(seq[0])
        while True:
            pick = None
            for t in remaining:
                if any(len(set(t) & set(prev)) == 2 for prev in seq):
                    pick = t
                    break
            if pick is None:
                break
            fresh = set(pick) - vertices
            if len(fresh) != 1:
                raise SectionError(
                    f"triple {pick} re-enters the block on {sorted(vertices)}; "
                    "the family is not a section"
                )
            remaining.remove(pick)
            seq.append(pick)
            vertices |= set(pick)
        edges = cord_set(seq)
        if len(edges) != 2 * len(vertices) - 3:
            raise SectionError("block is not a 2-tree; the family is not a section")
        blocks.append(TwoTreeBlock(frozenset(vertices), edges, tuple(seq)))
    try:
        return TwoTreeDecomposition(tuple(blocks))
    except ValueError as exc:
        raise SectionError(str(exc)) from None


def is_strict(graph: CoverGraph, decomposition: TwoTreeDecomposition) -> bool:
    """True iff every triangle of the graph lies inside one block's edge set."""
    for block in decomposition.blocks:
        if not block.edges <= graph.edges:
            raise ValueError("decomposition block is not a subgraph")
    block_edges = [block.edges for block in decomposition.blocks]
    for t in triangles(graph):
        needed = cord_set([t])
        if not any(needed <= edges for edges in block_edges):
            return False
    return True


def verify_counting(decomposition: TwoTreeDecomposition) -> bool:
    """Exact check of |F| = 2|W| - 4 + m for the decomposition's own graph."""
    total_edges = sum(len(block.edges) for block in decomposition.blocks)
    return total_edges == 2 * len(decomposition.vertex_union) - 4 + decomposition.m


def all_two_tree_decompositions(
    graph: CoverGraph, cap: int = DECOMPOSITION_TRIANGLE_CAP
) -> list[frozenset[frozenset[Triple]]]:
    """Exhaustively enumerate 2-tree decompositions, each reported as the set
    of its blocks' triangle sets.  Desk-scale oracle, capped by triangle count.

    Every block of a decomposition is a 2-tree, hence the union of its own
    triangles, which are pairwise connected through shared pairs; so valid
    blocks are exactly the consistent triangle subsets, and decompositions
    are exact covers of the edge set by disjoint valid blocks.
    """
    tris = sorted(triangles(graph))
    if len(tris) > cap:
        raise CapacityError(
            f"decomposition search capped at {cap} triangles, got {len(tris)}"
        )
    edges = sorted(graph.edges)
    if any(graph.degree(v) == 0 for v in graph.vertices):
        return []
    in_triangle = cord_set(tris)
    if not frozenset(edges) <= in_triangle:
        return []

    k = len(tris)
    valid_blocks: list[tuple[int, frozenset[Triple], frozenset[Cord]]] = []
    for mask in range(1, 1 << k):
        subset = [tris[i] for i in range(k) if mask >> i & 1]
        if not _pair_connected(subset):
            continue
        block_edges = cord_set(subset)
        block_vertices = set().union(*(set(t) for t in subset))
        if len(block_edges) != 2 * len(block_vertices) - 3:
            continue
        ok, _ = is_two_tree(CoverGraph(block_vertices, block_edges))
        if not ok:
            continue
        if triangles(CoverGraph(block_vertices, block_edges)) != frozenset(subset):
            continue
        valid_blocks.append((mask, frozenset(subset), block_edges))

    by_edge: dict[Cord, list[int]] = {e: [] for e in edges}
    for i, (_, _, block_edges) in enumerate(valid_blocks):
        for e in block_edges:
            by_edge[e].append(i)

    results: list[frozenset[frozenset[Triple]]] = []
    all_edges = frozenset(edges)

    def search(covered: frozenset[Cord], used_mask: int, chosen: list[int]):
        if covered == all_edges:
            results.append(
                frozenset(valid_blocks[i][1] for i in chosen)
            )
            return
        target = min(all_edges - covered)
        for i in by_edge[target]:
            mask, _, block_edges = valid_blocks[i]
            if mask & used_mask or block_edges & covered:
                continue
            search(covered | block_edges, used_mask | mask, chosen + [i])

    search(frozenset(), 0, [])
    return results


def _pair_connected(triples: list[Triple]) -> bool:
    """Whether the triples form one component under the share-two relation."""
    if not triples:
        return False
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(len(triples)):
            if j not in seen and len(set(triples[i]) & set(triples[j])) == 2:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(triples)
