"""Triplet covers of a binary phylogenetic tree and their classification.

A cord is an unordered pair of taxa; a cord set is a triplet cover when every
interior vertex v has a supporting triple: one leaf from each component of the
tree minus v, all three pairs being cords.  This module computes supports,
the supported-triple set and its sections, and the minimal / sparse /
Hall-type predicates, all exactly and at desk scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterable, Iterator

from .errors import CapacityError, CoverError, NotTripletCoverError
from .tree import PhyloTree, is_valid_label

Cord = tuple[str, str]
Triple = tuple[str, str, str]

# vertex id -> set of supporting triples
SupportMap = dict[int, frozenset[Triple]]

HALL_SUBSET_CAP = 22


def cord(x: str, y: str) -> Cord:
    if x == y:
        raise CoverError(f"a cord needs two distinct taxa, got {x!r} twice")
    return (x, y) if x < y else (y, x)


def make_triple(x: str, y: str, z: str) -> Triple:
    if len({x, y, z}) != 3:
        raise CoverError(f"a triple needs three distinct taxa: {x},{y},{z}")
    a, b, c = sorted((x, y, z))
    return (a, b, c)


def cord_set(triples: Iterable[Triple]) -> frozenset[Cord]:
    """All 2-subsets of the given triples."""
    out = set()
    for t in triples:
        for pair in combinations(sorted(t), 2):
            out.add(pair)
    return frozenset(out)


def all_cords(taxa: Iterable[str]) -> frozenset[Cord]:
    return frozenset(combinations(sorted(taxa), 2))


@dataclass(frozen=True)
class TripletCover:
    """A set of cords over a fixed taxon set (not necessarily a cover)."""

    taxa: frozenset[str]
    cords: frozenset[Cord]

    @classmethod
    def make(cls, taxa: Iterable[str], pairs: Iterable[Iterable[str]]) -> "TripletCover":
        taxon_set = frozenset(taxa)
        if len(taxon_set) < 3:
            raise CoverError(f"need at least 3 taxa, got {len(taxon_set)}")
        for t in taxon_set:
            if not is_valid_label(t):
                raise CoverError(f"bad taxon label {t!r}")
        cords = set()
        for pair in pairs:
            x, y = pair
            if x not in taxon_set or y not in taxon_set:
                raise CoverError(f"cord {x},{y} uses a taxon outside the taxon set")
            cords.add(cord(x, y))
        return cls(taxon_set, frozenset(cords))

    def __len__(self) -> int:
        return len(self.cords)

    def multiplicity(self, x: str) -> int:
        """Number of cords containing x."""
        if x not in self.taxa:
            raise CoverError(f"unknown taxon {x!r}")
        return sum(1 for c in self.cords if x in c)

    def min_multiplicity(self) -> int:
        """Minimum multiplicity over all taxa (the report's "mu")."""
        return min(self.multiplicity(x) for x in sorted(self.taxa))

    def remove_taxon(self, x: str) -> "TripletCover":
        """Drop every cord containing x; the taxon set shrinks accordingly."""
        if x not in self.taxa:
            raise CoverError(f"unknown taxon {x!r}")
        return TripletCover(
            self.taxa - {x}, frozenset(c for c in self.cords if x not in c)
        )

    def add_cords(self, pairs: Iterable[Cord]) -> "TripletCover":
        return TripletCover.make(self.taxa, set(self.cords) | set(pairs))

    def without(self, c: Cord) -> "TripletCover":
        return TripletCover(self.taxa, self.cords - {c})


def _check_same_taxa(tree: PhyloTree, cover: TripletCover):
    if tree.taxa != cover.taxa:
        raise CoverError(
            f"cover taxa {sorted(cover.taxa)} do not match tree taxa "
            f"{sorted(tree.taxa)}"
        )


def _supporting_triples(
    tree: PhyloTree, cords: frozenset[Cord], v: int, first_only: bool = False
) -> list[Triple]:
    comp_a, comp_b, comp_c = tree.components_without(v)
    found = []
    for a in sorted(comp_a):
        for b in sorted(comp_b):
            if cord(a, b) not in cords:
                continue
            for c in sorted(comp_c):
                if cord(a, c) in cords and cord(b, c) in cords:
                    found.append(make_triple(a, b, c))
                    if first_only:
                        return found
    return found


def support_map(tree: PhyloTree, cover: TripletCover) -> SupportMap:
    """The support of every interior vertex: all triples, one leaf per
    component of the tree minus the vertex, whose three pairs are cords."""
    _check_same_taxa(tree, cover)
    result: SupportMap = {}
    for v in tree.interior_vertices():
        result[v] = frozenset(_supporting_triples(tree, cover.cords, v))
    # Supports of distinct vertices are disjoint (each triple's median is
    # the supported vertex); guard the bookkeeping.
    total = sum(len(s) for s in result.values())
    assert total == len(set().union(*result.values()) if result else set()), (
        "supports of distinct vertices must be disjoint"
    )
    return result


def is_triplet_cover(tree: PhyloTree, cover: TripletCover) -> bool:
    """True iff every interior vertex has at least one supporting triple."""
    _check_same_taxa(tree, cover)
    return all(
        _supporting_triples(tree, cover.cords, v, first_only=True)
        for v in tree.interior_vertices()
    )


def first_unsupported_vertex(tree: PhyloTree, cover: TripletCover) -> int | None:
    """The unsupported interior vertex with the least canonical triple, if any."""
    _check_same_taxa(tree, cover)
    bad = [
        v
        for v in tree.interior_vertices()
        if not _supporting_triples(tree, cover.cords, v, first_only=True)
    ]
    if not bad:
        return None
    return min(bad, key=tree.component_triple)


def supported_triples(tree: PhyloTree, cover: TripletCover) -> frozenset[Triple]:
    """Disjoint union of all supports (every triangle of the cover graph)."""
    support = support_map(tree, cover)
    out: set[Triple] = set()
    for triples in support.values():
        out |= triples
    return frozenset(out)


def _require_cover(tree: PhyloTree, cover: TripletCover, op: str):
    if not is_triplet_cover(tree, cover):
        v = first_unsupported_vertex(tree, cover)
        name = tree.component_triple(v) if v is not None else None
        raise NotTripletCoverError(
            f"{op} requires a triplet cover; interior vertex {name} is unsupported"
        )


def is_minimal(tree: PhyloTree, cover: TripletCover) -> bool:
    """True iff removing any single cord destroys the cover property."""
    _require_cover(tree, cover, "is_minimal")
    return not any(
        is_triplet_cover(tree, cover.without(c)) for c in sorted(cover.cords)
    )


def minimalize(
    tree: PhyloTree, cover: TripletCover, order: Iterable[Cord] | str = "lex"
) -> TripletCover:
    """Greedily remove cords (lexicographically by default) while the result
    stays a triplet cover.  One ordered pass suffices: covering is monotone,
    so a cord that survives its own trial can never become removable later.
    """
    _require_cover(tree, cover, "minimalize")
    if order == "lex":
        trial_order = sorted(cover.cords)
    else:
        trial_order = list(order)  # type: ignore[arg-type]
        if set(trial_order) != set(cover.cords):
            raise CoverError("removal order must enumerate exactly the cords")
    current = cover
    for c in trial_order:
        candidate = current.without(c)
        if is_triplet_cover(tree, candidate):
            current = candidate
    return current


def is_sparse(tree: PhyloTree, cover: TripletCover) -> bool:
    """True iff the supported-triple set has exactly |X|-2 members."""
    _require_cover(tree, cover, "is_sparse")
    return len(supported_triples(tree, cover)) == len(cover.taxa) - 2


def is_hall_type(
    taxa: Iterable[str], triples: Iterable[Triple], cap: int = HALL_SUBSET_CAP
) -> bool:
    """Brute-force Hall-type test: the triples must cover the taxon set and
    every nonempty subfamily C' must satisfy |union C'| >= |C'| + 2.

    Subsets are enumerated explicitly; families larger than ``cap`` raise
    :class:`CapacityError`.
    """
    taxon_list = sorted(set(taxa))
    triple_list = sorted(set(triples))
    k = len(triple_list)
    if k > cap:
        raise CapacityError(f"Hall-type check capped at {cap} triples, got {k}")
    index = {t: i for i, t in enumerate(taxon_list)}
    masks = []
    for t in triple_list:
        m = 0
        for x in t:
            if x not in index:
                raise CoverError(f"triple {t} uses a taxon outside the taxon set")
            m |= 1 << index[x]
        masks.append(m)
    full = (1 << len(taxon_list)) - 1
    union_all = 0
    for m in masks:
        union_all |= m
    if union_all != full:
        return False

    def extend(start: int, union_mask: int, count: int) -> bool:
        for j in range(start, k):
            nu = union_mask | masks[j]
            if nu.bit_count() < count + 3:
                return False
            if not extend(j + 1, nu, count + 1):
                return False
        return True

    return extend(0, 0, 0)


def section_count(support: SupportMap) -> int:
    """Number of sections: the product of the support sizes."""
    total = 1
    for triples in support.values():
        total *= len(triples)
    return total


def _sorted_support_items(support: SupportMap) -> list[tuple[int, list[Triple]]]:
    items = [(v, sorted(triples)) for v, triples in support.items()]
    # Supports are disjoint and nonempty, so the least triple is a unique key.
    items.sort(key=lambda item: item[1][0])
    return items


def iter_sections(support: SupportMap) -> Iterator[frozenset[Triple]]:
    """Lazily yield sections (one triple per vertex) in lexicographic order."""
    for v, triples in support.items():
        if not triples:
            raise NotTripletCoverError(
                f"vertex {v} has empty support; sections need a triplet cover"
            )
    items = _sorted_support_items(support)
    for choice in product(*(triples for _, triples in items)):
        yield frozenset(choice)


def enumerate_sections(support: SupportMap, limit: int) -> list[frozenset[Triple]]:
    """Up to ``limit`` sections, in the order of :func:`iter_sections`."""
    if limit < 1:
        raise ValueError("limit must be positive")
    out = []
    for section in iter_sections(support):
        out.append(section)
        if len(out) >= limit:
            break
    return out


Chooser = Callable[[PhyloTree, int, tuple[frozenset[str], ...]], tuple[str, str, str]]


def least_label_chooser(
    tree: PhyloTree, v: int, comps: tuple[frozenset[str], ...]
) -> tuple[str, str, str]:
    return tuple(min(comp) for comp in comps)  # type: ignore[return-value]


def seeded_chooser(seed: int) -> Chooser:
    """One uniformly random leaf per component, reproducible from the seed.

    The returned chooser is stateful; :func:`canonical_cover` invokes it in
    the canonical interior-vertex order, which keeps results deterministic.
    """
    rng = random.Random(seed)

    def choose(tree, v, comps):
        return tuple(sorted(comp)[rng.randrange(len(comp))] for comp in comps)

    return choose


def canonical_cover(tree: PhyloTree, chooser: Chooser | str = "least") -> TripletCover:
    """Cover built by picking one leaf per component at every interior vertex
    and taking the three pairs; always a triplet cover by construction."""
    if chooser == "least":
        chooser = least_label_chooser
    elif isinstance(chooser, str):
        raise CoverError(f"unknown chooser policy {chooser!r}")
    cords: set[Cord] = set()
    for v in sorted(tree.interior_vertices(), key=tree.component_triple):
        comps = tree.components_without(v)
        picks = chooser(tree, v, comps)
        if len(picks) != 3 or any(p not in c for p, c in zip(picks, comps)):
            raise CoverError(f"chooser returned an invalid selection {picks}")
        a, b, c = picks
        cords |= {cord(a, b), cord(a, c), cord(b, c)}
    return TripletCover(tree.taxa, frozenset(cords))
