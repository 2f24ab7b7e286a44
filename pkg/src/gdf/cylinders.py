"""Cylinder isomorphism over B: decision with certificates, stretchings,
bush normal forms and a complete canonical invariant.

Two GDF surfaces have B-isomorphic cylinders exactly when their DF
quotients are B-isomorphic (same component count over every marked
point) and their type divisors differ by a principal divisor.  The
certificate records the per-point bijection of DF points, the shift
``c`` (``level_Y(sigma(j)) = level_X(j) - c_i``) and an integer
combination of the lattice generators equal to ``c``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import lattice
from .divisors import (
    GraphDivisor,
    NodeId,
    StructureError,
    df_quotient,
    forced_shift,
    type_divisor,
)
from .trees import RootedTree, TreeError, bush_of_type, tree_type


@dataclass(frozen=True)
class CylIsoCertificate:
    sigma: tuple[tuple[tuple[NodeId, NodeId], ...], ...]
    shift: tuple[int, ...]
    lattice_witness: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "sigma": [[[str(a), str(b)] for a, b in pairs] for pairs in self.sigma],
            "shift": list(self.shift),
            "lattice_witness": list(self.lattice_witness),
        }


@dataclass(frozen=True)
class CylinderDecision:
    """Outcome of a cylinder test; ``certificate`` is None iff ``reason`` is set."""

    certificate: CylIsoCertificate | None
    reason: str | None = None
    base_permutation: tuple[int, ...] | None = None
    note: str = ""

    @property
    def isomorphic(self) -> bool:
        return self.certificate is not None

    def __bool__(self) -> bool:
        return self.isomorphic

    def to_json(self) -> dict:
        out = {"isomorphic": self.isomorphic, "sigma": None, "shift": None,
               "lattice_witness": None, "reason": self.reason}
        if self.certificate is not None:
            out.update(self.certificate.to_json())
        if self.base_permutation is not None:
            out["base_permutation"] = list(self.base_permutation)
        if self.note:
            out["note"] = self.note
        return out


def _same_base(dx: GraphDivisor, dy: GraphDivisor) -> None:
    if dx.base != dy.base:
        raise StructureError("graph divisors live over different base curves")


def cylinders_isomorphic_over_B(dx: GraphDivisor, dy: GraphDivisor) -> CylinderDecision:
    _same_base(dx, dy)
    c, reason = forced_shift(type_divisor(dx), type_divisor(dy))
    if c is None:
        return CylinderDecision(None, reason)
    witness = dx.base.witness(c)
    if witness is None:
        return CylinderDecision(None, "shift-not-principal")
    sigma = []
    for px, py in zip(df_quotient(dx).points, df_quotient(dy).points):
        # stable sorts keep input order among equal levels
        sx = sorted(px, key=lambda p: p.level)
        sy = sorted(py, key=lambda p: p.level)
        sigma.append(tuple((a.leaf, b.leaf) for a, b in zip(sx, sy)))
    return CylinderDecision(CylIsoCertificate(tuple(sigma), c, witness))


def verify_certificate(dx: GraphDivisor, dy: GraphDivisor, cert: CylIsoCertificate) -> bool:
    """Recheck a certificate from scratch: bijections, levels, lattice witness."""
    base = dx.base
    if dy.base != base or len(cert.sigma) != base.n or len(cert.shift) != base.n:
        return False
    for i, (tx, ty) in enumerate(zip(dx.trees, dy.trees)):
        lx = {p.leaf: p.level for p in df_quotient(GraphDivisor.single(tx)).points[0]}
        ly = {p.leaf: p.level for p in df_quotient(GraphDivisor.single(ty)).points[0]}
        pairs = cert.sigma[i]
        if sorted(map(str, (a for a, _ in pairs))) != sorted(map(str, lx)):
            return False
        if sorted(map(str, (b for _, b in pairs))) != sorted(map(str, ly)):
            return False
        if len(pairs) != len(lx) or len(pairs) != len(ly):
            return False
        if any(ly[b] != lx[a] - cert.shift[i] for a, b in pairs):
            return False
    combo = lattice.combine(base.principal_lattice, cert.lattice_witness, base.n)
    if len(cert.lattice_witness) != len(base.principal_lattice):
        return False
    return combo == tuple(cert.shift)


def transport(d: GraphDivisor, s: Sequence[int]) -> GraphDivisor:
    """Move the tree over ``b_i`` to ``b_{s[i]}``."""
    trees: list[RootedTree | None] = [None] * d.n
    for i, t in enumerate(d.trees):
        trees[s[i]] = t
    return d.with_trees(trees)


def cylinders_isomorphic_fiberwise(dx: GraphDivisor, dy: GraphDivisor) -> CylinderDecision:
    """Search the listed base automorphisms (identity first) for a match."""
    _same_base(dx, dy)
    note = f"searched {len(dx.base.automorphisms())} base automorphism(s) from the supplied list"
    first = None
    for s in dx.base.automorphisms():
        dec = cylinders_isomorphic_over_B(transport(dx, s), dy)
        if dec:
            return CylinderDecision(dec.certificate, None, s, note)
        first = first or dec
    return CylinderDecision(None, first.reason, None, note)


# ---------------------------------------------------------------------------
# stretchings


@dataclass(frozen=True)
class StretchSpec:
    a: tuple[int, ...]
    principal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if any(x < 0 for x in self.a):
            raise ValueError(f"stretching divisor {list(self.a)} is not effective")


def _fresh_ids(t: RootedTree, k: int) -> list:
    ids = set(t.nodes)
    if all(isinstance(v, int) for v in ids):
        top = max(ids) + 1
        return list(range(top, top + k))
    out, i = [], 0
    while len(out) < k:
        cand = f"s{i}"
        if cand not in ids:
            out.append(cand)
        i += 1
    return out


def stretch_tree(t: RootedTree, a: int) -> RootedTree:
    if a < 0:
        raise ValueError("stretch length must be non-negative")
    if a == 0:
        return t
    new = _fresh_ids(t, a)
    parent = t.parent_map()
    parent[t.root] = new[-1]
    parent[new[0]] = None
    for lo, hi in zip(new, new[1:]):
        parent[hi] = lo
    return RootedTree(parent)


def stretch(d: GraphDivisor, spec: StretchSpec | Sequence[int]) -> GraphDivisor:
    if not isinstance(spec, StretchSpec):
        spec = StretchSpec(tuple(spec))
    if len(spec.a) != d.n:
        raise StructureError(f"stretch vector has {len(spec.a)} entries for {d.n} points")
    if spec.principal and not d.base.is_principal(spec.a):
        raise ValueError(f"stretch divisor {list(spec.a)} is flagged principal but is not")
    return d.with_trees(stretch_tree(t, a) for t, a in zip(d.trees, spec.a))


def stretch_type_law_check(d: GraphDivisor, spec: StretchSpec | Sequence[int]) -> bool:
    """Levels over ``b_i`` rise by ``a_i``, i.e. the type divisor drops by A."""
    a = spec.a if isinstance(spec, StretchSpec) else tuple(spec)
    before = type_divisor(d)
    after = type_divisor(stretch(d, spec))
    return after == before.shifted(tuple(-x for x in a))


# ---------------------------------------------------------------------------
# normal forms and the canonical invariant


def bushify(d: GraphDivisor) -> GraphDivisor:
    """Replace each fiber tree by the bush of the same type (cylinder class kept)."""
    return d.with_trees(bush_of_type(tree_type(t)) for t in d.trees)


def gizatullin_normal_form(d: GraphDivisor) -> GraphDivisor:
    from .trees import gizatullin_tree

    out = []
    for t in d.trees:
        tt = tree_type(t)
        try:
            out.append(gizatullin_tree(tt))
        except TreeError:
            out.append(t)
    return d.with_trees(out)


@dataclass(frozen=True)
class CanonicalRecord:
    """Sorted per-point levels after the canonical compensating shift."""

    levels: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"levels": [list(x) for x in self.levels]}


def cylinder_canonical_invariant(d: GraphDivisor) -> CanonicalRecord:
    levels = type_divisor(d).levels
    mins = tuple(min(ls) for ls in levels)
    residue, _ = lattice.reduce(d.base.hnf, mins)
    # residue = mins - lambda with lambda principal; shift every level by -lambda
    return CanonicalRecord(
        tuple(tuple(l - m + r for l in ls) for ls, m, r in zip(levels, mins, residue))
    )
