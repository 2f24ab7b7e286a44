"""Leveled rooted trees: fiber trees, bushes, spring bushes.

A tree is stored as a parent map over hashable node ids.  Children keep
their insertion order, which matters for a few deterministic choices
(default root assignments, tie breaking in canonical child order).

Leaves are the extremal vertices different from the root.  The
single-vertex tree is special: its root stands for the unique
(irreducible) fiber component, so its type is ``(1,)`` and its leaf
levels are ``[0]``.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterator, Mapping, Sequence

NodeId = Hashable
TreeType = tuple[int, ...]

DEFAULT_MAX_AUT = 10**6


class TreeError(ValueError):
    """Malformed tree, invalid type vector, or violated precondition."""


class EnumerationLimitError(RuntimeError):
    """Raised when an automorphism enumeration would exceed the cap."""


def max_aut() -> int:
    raw = os.environ.get("GDF_MAX_AUT")
    return int(raw) if raw else DEFAULT_MAX_AUT


class RootedTree:
    """Immutable rooted tree given by a parent map."""

    def __init__(self, parent: Mapping[NodeId, NodeId | None]):
        parent = dict(parent)
        roots = [v for v, p in parent.items() if p is None]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        children: dict[NodeId, list[NodeId]] = {v: [] for v in parent}
        for v, p in parent.items():
            if p is None:
                continue
            if p not in children:
                raise TreeError(f"parent {p!r} of {v!r} is not a node")
            children[p].append(v)
        root = roots[0]
        level = {root: 0}
        order = [root]
        for v in order:
            for c in children[v]:
                level[c] = level[v] + 1
                order.append(c)
        if len(order) != len(parent):
            raise TreeError("parent links are cyclic or disconnected")
        self._parent = parent
        self._children = {v: tuple(cs) for v, cs in children.items()}
        self._root = root
        self._level = level
        self._order = tuple(order)

    # construction -------------------------------------------------------

    @classmethod
    def from_nested(cls, nested: Sequence) -> RootedTree:
        """Build from the nested-list form; ids are preorder integers."""
        parent: dict[int, int | None] = {}

        def walk(node, par):
            if not isinstance(node, (list, tuple)):
                raise TreeError(f"nested tree nodes must be lists, got {node!r}")
            me = len(parent)
            parent[me] = par
            for child in node:
                walk(child, me)

        walk(nested, None)
        return cls(parent)

    @classmethod
    def single_vertex(cls) -> RootedTree:
        return cls({0: None})

    @classmethod
    def chain(cls, length: int) -> RootedTree:
        return cls({i: (i - 1 if i else None) for i in range(length + 1)})

    # accessors -----------------------------------------------------------

    @property
    def root(self) -> NodeId:
        return self._root

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        """Nodes in breadth-first order from the root."""
        return self._order

    def parent(self, v: NodeId) -> NodeId | None:
        return self._parent[v]

    def children(self, v: NodeId) -> tuple[NodeId, ...]:
        return self._children[v]

    def level(self, v: NodeId) -> int:
        return self._level[v]

    def parent_map(self) -> dict[NodeId, NodeId | None]:
        return dict(self._parent)

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, v) -> bool:
        return v in self._parent

    @property
    def n_edges(self) -> int:
        return len(self._parent) - 1

    def leaves(self) -> list[NodeId]:
        """Leaves in breadth-first order (root excluded)."""
        return [v for v in self._order if v != self._root and not self._children[v]]

    def is_leaf(self, v: NodeId) -> bool:
        return v != self._root and not self._children[v]

    def subtree_height(self, v: NodeId) -> int:
        return self._subtree_height[v]

    @cached_property
    def _subtree_height(self) -> dict[NodeId, int]:
        h: dict[NodeId, int] = {}
        for v in reversed(self._order):
            h[v] = 1 + max((h[c] for c in self._children[v]), default=-1)
        return h

    @cached_property
    def _codes(self) -> dict[NodeId, str]:
        # AHU-style encoding; '(' sorts before ')' so deeper subtrees come first
        code: dict[NodeId, str] = {}
        for v in reversed(self._order):
            code[v] = "(" + "".join(sorted(code[c] for c in self._children[v])) + ")"
        return code

    def code(self, v: NodeId | None = None) -> str:
        """Canonical encoding of the subtree at ``v`` (default: the root)."""
        return self._codes[self._root if v is None else v]

    def canonical_children(self, v: NodeId) -> tuple[NodeId, ...]:
        """Children sorted by canonical code, input order breaking ties."""
        return tuple(sorted(self._children[v], key=self._codes.__getitem__))

    # serialization -------------------------------------------------------

    def to_nested(self) -> list:
        def walk(v):
            return [walk(c) for c in self._children[v]]

        return walk(self._root)

    def to_adjacency(self) -> dict:
        return {"parent": {str(v): (None if p is None else str(p)) for v, p in self._parent.items()}}

    @classmethod
    def from_adjacency(cls, data: Mapping) -> RootedTree:
        try:
            parent = data["parent"]
        except (KeyError, TypeError):
            raise TreeError("adjacency form needs a 'parent' object") from None
        if not isinstance(parent, Mapping):
            raise TreeError("'parent' must be an object")
        return cls({str(k): (None if p is None else str(p)) for k, p in parent.items()})

    @classmethod
    def from_json(cls, data) -> RootedTree:
        """Accept either serialization (already decoded, or as text)."""
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, list):
            return cls.from_nested(data)
        if isinstance(data, Mapping):
            return cls.from_adjacency(data)
        raise TreeError(f"cannot read a tree from {type(data).__name__}")

    def to_text(self) -> str:
        return json.dumps(self.to_nested(), separators=(",", ""))

    # comparison ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self._parent == other._parent

    def __hash__(self) -> int:
        return hash(frozenset(self._parent.items()))

    def __repr__(self) -> str:
        return f"RootedTree({self.to_text()})"


# ---------------------------------------------------------------------------
# basic invariants


def height(t: RootedTree) -> int:
    return t.subtree_height(t.root)


def tree_type(t: RootedTree) -> TreeType:
    if len(t) == 1:
        return (1,)
    counts = [0] * (height(t) + 1)
    for v in t.leaves():
        counts[t.level(v)] += 1
    return tuple(counts)


def leaves_with_levels(t: RootedTree) -> list[int]:
    """Sorted leaf levels; ``[0]`` for the single-vertex tree."""
    if len(t) == 1:
        return [0]
    return sorted(t.level(v) for v in t.leaves())


def validate_type(tt: Sequence[int]) -> TreeType:
    tt = tuple(int(x) for x in tt)
    if not tt or any(x < 0 for x in tt):
        raise TreeError(f"invalid tree type {tt}")
    if len(tt) == 1:
        if tt != (1,):
            raise TreeError(f"a height-0 type must be (1), got {tt}")
        return tt
    if tt[0] != 0:
        raise TreeError(f"type {tt}: a leaf on level 0 cannot coexist with other vertices")
    if tt[-1] < 1:
        raise TreeError(f"type {tt}: last entry must be positive")
    return tt


def is_chain(t: RootedTree) -> bool:
    return all(len(t.children(v)) <= 1 for v in t.nodes)


def is_bush(t: RootedTree) -> bool:
    return all(len(t.children(v)) <= 1 for v in t.nodes if v != t.root)


def truncate(t: RootedTree, level: int) -> RootedTree:
    if level < 0:
        raise TreeError("truncation level must be non-negative")
    return RootedTree({v: p for v, p in t.parent_map().items() if t.level(v) <= level})


def is_spring_bush(t: RootedTree) -> bool:
    h = height(t)
    if h < 1:
        raise TreeError("spring bushes have height >= 1")
    base = truncate(t, h - 1)
    if not is_bush(base):
        return False
    base_leaves = set(base.leaves()) if len(base) > 1 else {base.root}
    return all(t.parent(v) in base_leaves for v in t.nodes if t.level(v) == h)


def leafless(t: RootedTree) -> RootedTree:
    """The tree with all leaves and their edges removed."""
    return RootedTree({v: p for v, p in t.parent_map().items() if not t.is_leaf(v)})


# ---------------------------------------------------------------------------
# normal-form constructions


def bush_of_type(tt: Sequence[int]) -> RootedTree:
    """The bush with ``n_i`` branches of length ``i``; longest branches first."""
    tt = validate_type(tt)
    if tt == (1,):
        return RootedTree.single_vertex()
    parent: dict[int, int | None] = {0: None}
    for length in range(len(tt) - 1, 0, -1):
        for _ in range(tt[length]):
            prev = 0
            for _ in range(length):
                node = len(parent)
                parent[node] = prev
                prev = node
    return RootedTree(parent)


def gizatullin_tree(tt: Sequence[int]) -> RootedTree:
    """Trunk ``v_0..v_{h-1}`` with ``n_{i+1}`` leaves hanging off ``v_i``."""
    tt = validate_type(tt)
    h = len(tt) - 1
    if h < 1:
        raise TreeError("gizatullin_tree needs height >= 1")
    parent: dict[int, int | None] = {i: (i - 1 if i else None) for i in range(h)}
    for i in range(h):
        for _ in range(tt[i + 1]):
            parent[len(parent)] = i
    return RootedTree(parent)


# ---------------------------------------------------------------------------
# isomorphisms and automorphisms


@dataclass(frozen=True)
class TreeIso:
    """Root-preserving isomorphism ``source -> target`` as a vertex map."""

    mapping: Mapping[NodeId, NodeId]

    def __call__(self, v: NodeId) -> NodeId:
        return self.mapping[v]

    def inverse(self) -> TreeIso:
        return TreeIso({w: v for v, w in self.mapping.items()})

    def then(self, other: TreeIso) -> TreeIso:
        """Apply ``self`` first, then ``other``."""
        return TreeIso({v: other.mapping[w] for v, w in self.mapping.items()})

    def is_identity(self) -> bool:
        return all(v == w for v, w in self.mapping.items())

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeIso) and dict(self.mapping) == dict(other.mapping)


def check_iso(t1: RootedTree, t2: RootedTree, iso: TreeIso) -> bool:
    m = iso.mapping
    if set(m) != set(t1.nodes) or set(m.values()) != set(t2.nodes) or len(t1) != len(t2):
        return False
    if m[t1.root] != t2.root:
        return False
    return all(t2.parent(m[v]) == m[p] for v, p in t1.parent_map().items() if p is not None)


def _grouped(t: RootedTree, v: NodeId) -> list[tuple[str, list[NodeId]]]:
    groups: list[tuple[str, list[NodeId]]] = []
    for c in t.canonical_children(v):
        code = t.code(c)
        if groups and groups[-1][0] == code:
            groups[-1][1].append(c)
        else:
            groups.append((code, [c]))
    return groups


def _match(t1, v1, t2, v2, out: dict) -> None:
    out[v1] = v2
    for c1, c2 in zip(t1.canonical_children(v1), t2.canonical_children(v2)):
        _match(t1, c1, t2, c2, out)


def tree_iso(t1: RootedTree, t2: RootedTree) -> TreeIso | None:
    if t1.code() != t2.code():
        return None
    out: dict = {}
    _match(t1, t1.root, t2, t2.root, out)
    return TreeIso(out)


def _product(factories, i=0) -> Iterator[dict]:
    # lazy cartesian product of map-generators, merged into one dict
    if i == len(factories):
        yield {}
        return
    for head in factories[i]():
        for tail in _product(factories, i + 1):
            yield {**head, **tail}


def _iter_maps(t1, v1, t2, v2, fix_leaves: bool) -> Iterator[dict]:
    g1, g2 = _grouped(t1, v1), _grouped(t2, v2)
    choices = []
    for (code, a), (_, b) in zip(g1, g2):
        if len(a) == 1 or (fix_leaves and code == "()"):
            choices.append([b])
        else:
            choices.append(list(itertools.permutations(b)))
    for pick in itertools.product(*choices):
        pairs = [(x, y) for a_b, perm in zip(g1, pick) for x, y in zip(a_b[1], perm)]
        factories = [
            (lambda x=x, y=y: _iter_maps(t1, x, t2, y, fix_leaves)) for x, y in pairs
        ]
        for sub in _product(factories):
            yield {v1: v2, **sub}


@dataclass(frozen=True)
class AutGroup:
    """Aut(tree) by generators and order, plus the effective quotient Aut*.

    ``kernel_order`` is the order of the pointwise stabilizer K of the
    leafless tree; ``star_order`` is ``order // kernel_order``.
    """

    tree: RootedTree
    generators: tuple[TreeIso, ...]
    order: int
    kernel_order: int
    star_tree: RootedTree

    @property
    def star_order(self) -> int:
        return self.order // self.kernel_order

    def elements(self, limit: int | None = None) -> Iterator[TreeIso]:
        _check_cap(self.order, limit)
        t = self.tree
        for m in _iter_maps(t, t.root, t, t.root, fix_leaves=False):
            yield TreeIso(m)

    def star_elements(self, limit: int | None = None) -> Iterator[TreeIso]:
        """One representative per K-coset, restricted to the leafless tree."""
        _check_cap(self.star_order, limit)
        t = self.tree
        keep = set(self.star_tree.nodes)
        for m in _iter_maps(t, t.root, t, t.root, fix_leaves=True):
            yield TreeIso({v: w for v, w in m.items() if v in keep})


def _check_cap(order: int, limit: int | None) -> None:
    cap = max_aut() if limit is None else limit
    if order > cap:
        raise EnumerationLimitError(f"group of order {order} exceeds enumeration cap {cap}")


def _swap(t: RootedTree, a: NodeId, b: NodeId) -> TreeIso:
    m = {v: v for v in t.nodes}
    fwd: dict = {}
    _match(t, a, t, b, fwd)
    for x, y in fwd.items():
        m[x] = y
        m[y] = x
    return TreeIso(m)


def aut_group(t: RootedTree) -> AutGroup:
    gens = []
    order = 1
    kernel = 1
    for v in t.nodes:
        for code, members in _grouped(t, v):
            order *= math.factorial(len(members))
            if code == "()":
                kernel *= math.factorial(len(members))
            for a, b in zip(members, members[1:]):
                gens.append(_swap(t, a, b))
    return AutGroup(t, tuple(gens), order, kernel, leafless(t))
