"""Newick reading and writing for unrooted binary trees.

Grammar (rooted syntax, branch lengths mandatory except on the outermost
group)::

    tree    := subtree ";"
    subtree := leaf | "(" subtree ("," subtree)+ ")" [":" length]
    leaf    := label ":" length

Lengths are decimal literals ("2", "0.25") or rational literals ("7/2"); both
are read exactly.  The outermost group is the root: with three children it
becomes an interior vertex of the unrooted tree, with two children the two
root edges are merged into one (lengths summed).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import NewickError
from .tree import PhyloTree

_LABEL_RE = re.compile(r"[^\s(),:;]+")
_LENGTH_RE = re.compile(r"\d+/\d+|\d+(\.\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str):
        raise NewickError(message, self.pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}, found {self.peek()!r}")
        self.pos += 1

    def parse_length(self) -> Fraction:
        match = _LENGTH_RE.match(self.text, self.pos)
        if not match:
            self.fail("expected a branch length")
        token = match.group(0)
        if "/" in token and int(token.split("/")[1]) == 0:
            self.fail(f"zero denominator in length literal {token!r}")
        value = Fraction(token)
        if value <= 0:
            self.fail(f"non-positive branch length {token!r}")
        self.pos = match.end()
        return value

    def parse_subtree(self, at_root: bool):
        """Returns ("leaf", label, length) or ("node", children, length|None)."""
        self.skip_ws()
        if self.peek() == "(":
            self.pos += 1
            children = [self.parse_subtree(False)]
            self.skip_ws()
            while self.peek() == ",":
                self.pos += 1
                children.append(self.parse_subtree(False))
                self.skip_ws()
            if len(children) < 2:
                self.fail("an internal node needs at least two children")
            self.expect(")")
            self.skip_ws()
            length = None
            if self.peek() == ":":
                self.pos += 1
                self.skip_ws()
                length = self.parse_length()
            if at_root:
                if length is not None:
                    self.fail("the root may not carry a branch length")
            elif length is None:
                self.fail("missing branch length on an interior edge")
            return ("node", children, length)
        match = _LABEL_RE.match(self.text, self.pos)
        if not match:
            self.fail("expected a leaf label or '('")
        label = match.group(0)
        self.pos = match.end()
        self.skip_ws()
        if self.peek() != ":":
            self.fail(f"missing branch length after leaf {label!r}")
        self.pos += 1
        self.skip_ws()
        length = self.parse_length()
        return ("leaf", label, length)


def parse_newick(text: str) -> PhyloTree:
    """Parse rooted-syntax Newick into the implied unrooted binary tree.

    Raises :class:`NewickError` with a position for syntax problems and
    :class:`TreeError` for structural ones (non-binary vertex, duplicate
    taxon, too few taxa).
    """
    parser = _Parser(text)
    parser.skip_ws()
    root = parser.parse_subtree(True)
    parser.skip_ws()
    parser.expect(";")
    parser.skip_ws()
    if parser.pos != len(text):
        parser.fail("trailing characters after ';'")
    if root[0] == "leaf":
        raise NewickError("a tree must have an internal root group", 0)

    edges: list[tuple[int, int, Fraction]] = []
    labels: dict[int, str] = {}
    counter = [0]

    def build(node, parent: int | None, parent_length: Fraction | None) -> int:
        vid = counter[0]
        counter[0] += 1
        kind, payload, length = node
        if kind == "leaf":
            labels[vid] = payload
        else:
            for child in payload:
                build(child, vid, child[2])
        if parent is not None:
            edges.append((parent, vid, parent_length))
        return vid

    _, children, _ = root
    if len(children) == 2:
        # Degree-2 root: merge the two root edges.
        counter[0] = 0
        left = build(children[0], None, None)
        right = build(children[1], None, None)
        edges.append((left, right, children[0][2] + children[1][2]))
    else:
        root_id = counter[0]
        counter[0] += 1
        for child in children:
            build(child, root_id, child[2])
    return PhyloTree(edges, labels)


def format_length(value: Fraction) -> str:
    """Exact textual form: "3" for integers, "7/2" otherwise."""
    return str(value)


def write_newick(tree: PhyloTree) -> str:
    """Canonical Newick: rooted at the interior vertex adjacent to the least
    taxon, children ordered by their least descendant taxon."""
    least = min(tree.taxa)
    (root,) = (w for w in tree.neighbors(tree.leaf(least)))

    def render(v: int, parent: int) -> tuple[str, str]:
        length = format_length(tree.edge_length(parent, v))
        if tree.is_leaf(v):
            label = tree.label(v)
            return label, f"{label}:{length}"
        parts = sorted(
            render(w, v) for w in tree.neighbors(v) if w != parent
        )
        body = ",".join(text for _, text in parts)
        return parts[0][0], f"({body}):{length}"

    parts = sorted(render(w, root) for w in tree.neighbors(root))
    return "(" + ",".join(text for _, text in parts) + ");"
