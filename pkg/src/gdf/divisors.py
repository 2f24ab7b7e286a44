"""Marked base curves, graph divisors, DF quotients and type divisors.

The base curve is never represented through its function field.  All
that the classification consumes is the lattice of principal divisors
supported on the marked points ``b_1..b_n`` (a sublattice of Z^n) and a
finite list of marked-point permutations induced by automorphisms of B.

Sign convention: a :class:`TypeDivisor` stores the non-negative leaf
levels ``l_ij``; the divisor it stands for is the anti-effective
``-sum l_ij b_ij``.  A shift vector ``c`` relates two type divisors by
``levels_2(i) = {l - c_i : l in levels_1(i)}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from . import lattice
from .trees import NodeId, RootedTree, height, is_chain


class StructureError(ValueError):
    """Objects over different bases or with mismatched point counts."""


def _as_perm(p: Sequence[int], n: int) -> tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if sorted(p) == list(range(n)):
        return p
    if sorted(p) == list(range(1, n + 1)):
        return tuple(x - 1 for x in p)
    raise ValueError(f"{list(p)} is not a permutation of {n} points")


@dataclass(frozen=True)
class BaseCurve:
    """Marked points, principal lattice generators and base automorphisms.

    ``base_autos`` holds 0-based images: automorphism ``s`` sends ``b_i`` to
    ``b_{s[i]}``.  The identity is always available and need not be listed.
    """

    points: tuple[str, ...]
    principal_lattice: tuple[tuple[int, ...], ...] = ()
    base_autos: tuple[tuple[int, ...], ...] = ()
    units_trivial: bool = True

    def __post_init__(self):
        n = len(self.points)
        if n < 1:
            raise ValueError("a base curve needs at least one marked point")
        if len(set(self.points)) != n:
            raise ValueError("marked point labels must be distinct")
        gens = tuple(tuple(int(x) for x in g) for g in self.principal_lattice)
        for g in gens:
            if len(g) != n:
                raise ValueError(f"lattice generator {list(g)} has wrong length (expected {n})")
        autos = tuple(_as_perm(p, n) for p in self.base_autos)
        object.__setattr__(self, "principal_lattice", gens)
        object.__setattr__(self, "base_autos", autos)
        object.__setattr__(self, "points", tuple(self.points))
        for s in autos:
            for g in gens:
                if not self.is_principal(permute_vector(g, s)):
                    raise ValueError(
                        f"lattice is not closed under base automorphism {list(s)}"
                    )

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def hnf(self) -> lattice.HNF:
        return lattice.hermite_normal_form(self.principal_lattice, self.n)

    def is_principal(self, d: Sequence[int]) -> bool:
        return lattice.membership(self.hnf, d) is not None

    def witness(self, d: Sequence[int]) -> tuple[int, ...] | None:
        """Coefficients over ``principal_lattice`` summing to ``d``."""
        return lattice.membership(self.hnf, d)

    def automorphisms(self) -> list[tuple[int, ...]]:
        ident = tuple(range(self.n))
        out = [ident]
        out.extend(s for s in self.base_autos if s != ident and s not in out)
        return out

    @classmethod
    def affine_line(cls, points: int | Sequence[str] = 1, **kw) -> BaseCurve:
        """Every divisor on A^1 is principal: the lattice is all of Z^n."""
        labels = _labels(points)
        n = len(labels)
        gens = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls(labels, gens, **kw)

    @classmethod
    def rigid(cls, points: int | Sequence[str] = 1, **kw) -> BaseCurve:
        return cls(_labels(points), (), **kw)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "principal_lattice": [list(g) for g in self.principal_lattice],
            "base_autos": [list(s) for s in self.base_autos],
            "units_trivial": self.units_trivial,
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> BaseCurve:
        if isinstance(data, str):
            return preset(data, 1)
        if "preset" in data:
            pts = data.get("points", 1)
            return preset(
                data["preset"],
                pts,
                base_autos=tuple(data.get("base_autos", ())),
                units_trivial=bool(data.get("units_trivial", True)),
            )
        return cls(
            tuple(data["points"]),
            tuple(tuple(g) for g in data.get("principal_lattice", ())),
            tuple(tuple(s) for s in data.get("base_autos", ())),
            bool(data.get("units_trivial", True)),
        )


def _labels(points) -> tuple[str, ...]:
    if isinstance(points, int):
        return tuple(f"b{i + 1}" for i in range(points))
    return tuple(points)


def preset(name: str, points=1, **kw) -> BaseCurve:
    if name == "affine-line":
        return BaseCurve.affine_line(points, **kw)
    if name == "rigid":
        return BaseCurve.rigid(points, **kw)
    raise ValueError(f"unknown base preset {name!r}")


def permute_vector(d: Sequence[int], s: Sequence[int]) -> tuple[int, ...]:
    """Push a divisor forward along ``b_i -> b_{s[i]}``."""
    out = [0] * len(d)
    for i, x in enumerate(d):
        out[s[i]] = x
    return tuple(out)


def _tree_json(t: RootedTree):
    # the nested form renumbers vertices; keep explicit ids when it would
    nested = t.to_nested()
    return nested if RootedTree.from_nested(nested) == t else t.to_adjacency()


@dataclass(frozen=True)
class GraphDivisor:
    base: BaseCurve
    trees: tuple[RootedTree, ...]

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.trees) != self.base.n:
            raise StructureError(
                f"{len(self.trees)} trees for {self.base.n} marked points"
            )

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def heights(self) -> tuple[int, ...]:
        return tuple(height(t) for t in self.trees)

    @property
    def height(self) -> int:
        return max(self.heights)

    @property
    def total_height(self) -> int:
        """h(D) = sum of the tree heights."""
        return sum(self.heights)

    @property
    def n_edges(self) -> int:
        return sum(t.n_edges for t in self.trees)

    def with_trees(self, trees) -> GraphDivisor:
        return GraphDivisor(self.base, tuple(trees))

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "trees": [_tree_json(t) for t in self.trees]}

    @classmethod
    def from_json(cls, data: Mapping) -> GraphDivisor:
        trees = [RootedTree.from_json(t) for t in data["trees"]]
        base_data = data.get("base", "affine-line")
        if isinstance(base_data, str):
            base = preset(base_data, len(trees))
        elif "preset" in base_data and "points" not in base_data:
            base = BaseCurve.from_json({**base_data, "points": len(trees)})
        else:
            base = BaseCurve.from_json(base_data)
        return cls(base, tuple(trees))

    @classmethod
    def single(cls, tree: RootedTree, base: BaseCurve | None = None) -> GraphDivisor:
        return cls(base or BaseCurve.affine_line(1), (tree,))


# ---------------------------------------------------------------------------
# DF quotients and type divisors


@dataclass(frozen=True)
class DFPoint:
    leaf: NodeId
    level: int


@dataclass(frozen=True)
class DFQuotient:
    """Per marked point, the fiber components (leaves) with their levels."""

    points: tuple[tuple[DFPoint, ...], ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.points)


@dataclass(frozen=True)
class TypeDivisor:
    """Per marked point, the sorted multiset of leaf levels (see module doc)."""

    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "levels", tuple(tuple(sorted(int(x) for x in ls)) for ls in self.levels)
        )

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(ls) for ls in self.levels)

    def shifted(self, c: Sequence[int]) -> TypeDivisor:
        """Levels ``l - c_i``: the divisor gains ``+sum c_i b_i`` pulled back."""
        return TypeDivisor(tuple(tuple(l - ci for l in ls) for ls, ci in zip(self.levels, c)))

    def to_json(self) -> dict:
        return {"levels": [list(ls) for ls in self.levels], "sign": "anti-effective"}


def _leaf_points(t: RootedTree) -> tuple[DFPoint, ...]:
    if len(t) == 1:
        return (DFPoint(t.root, 0),)
    return tuple(DFPoint(v, t.level(v)) for v in t.leaves())


def df_quotient(d: GraphDivisor) -> DFQuotient:
    return DFQuotient(tuple(_leaf_points(t) for t in d.trees))


def type_divisor(d: GraphDivisor) -> TypeDivisor:
    return TypeDivisor(tuple(tuple(p.level for p in pts) for pts in df_quotient(d).points))


def pic_rank_excess(d: GraphDivisor) -> int:
    """rho = sum (N_j - 1): the rank excess of Pic DF over Pic B."""
    return sum(n - 1 for n in df_quotient(d).counts)


def is_chain_divisor(d: GraphDivisor) -> bool:
    return all(is_chain(t) for t in d.trees)


def is_principal(vec: Sequence[int], base: BaseCurve) -> bool:
    return base.is_principal(vec)


# ---------------------------------------------------------------------------
# linear equivalence

SHAPE_MISMATCH = "point-count-mismatch"
NOT_CONSTANT = "shift-not-constant"
NOT_PRINCIPAL = "shift-not-principal"


def forced_shift(t1: TypeDivisor, t2: TypeDivisor) -> tuple[tuple[int, ...] | None, str | None]:
    """The only shift that can relate ``t1`` to ``t2``, or a reason code."""
    if t1.n != t2.n:
        raise StructureError(f"type divisors over {t1.n} and {t2.n} points")
    if t1.counts != t2.counts:
        return None, SHAPE_MISMATCH
    c = []
    for a, b in zip(t1.levels, t2.levels):
        diffs = {x - y for x, y in zip(a, b)}
        if len(diffs) != 1:
            return None, NOT_CONSTANT
        c.append(diffs.pop())
    return tuple(c), None


def linear_equivalent(t1: TypeDivisor, t2: TypeDivisor, base: BaseCurve) -> tuple[int, ...] | None:
    """Shift ``c`` in the principal lattice with ``t2 = t1.shifted(c)``."""
    if t1.n != base.n:
        raise StructureError("type divisor and base have different point counts")
    c, _ = forced_shift(t1, t2)
    if c is None or not base.is_principal(c):
        return None
    return c

