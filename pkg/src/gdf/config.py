"""Configuration spaces of graph divisors and the affine group acting on them.

A configuration assigns to every vertex ``v`` that has children a set of
``r(v) = #children`` distinct rationals.  The group acts by

    s'(v) = alpha * s(aut(v)) + beta[i, level(v)],

where ``aut`` is a tree automorphism taken modulo the leaf permutations.
Vertices are addressed by ``(point index, vertex id)``.  Trees of height 0
have no such vertices and contribute nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .divisors import GraphDivisor, StructureError, is_chain_divisor
from .poly import frac, frac_str
from .trees import EnumerationLimitError, NodeId, RootedTree, aut_group, height, max_aut

Key = tuple[int, NodeId]


class ConfigError(ValueError):
    """Configuration or group element that does not fit its divisor."""


class UnitsNontrivialError(ValueError):
    """The moduli quotient is not reported when the base has non-constant units."""


def domain(d: GraphDivisor) -> list[Key]:
    """Vertices with at least one child, tree by tree in BFS order."""
    return [(i, v) for i, t in enumerate(d.trees) for v in t.nodes if t.children(v)]


def config_space_dim(d: GraphDivisor) -> int:
    return d.n_edges


def _level_keys(d: GraphDivisor) -> list[tuple[int, int]]:
    return [(i, l) for i, t in enumerate(d.trees) for l in range(height(t))]


# ---------------------------------------------------------------------------
# JSON keys: bare vertex ids when they are unambiguous, "label:vertex" otherwise


def _flat_keys(d: GraphDivisor) -> bool:
    ids = [str(v) for _, v in domain(d)]
    return len(ids) == len(set(ids))


def _key_str(d: GraphDivisor, k: Key, flat: bool) -> str:
    i, v = k
    return str(v) if flat else f"{d.base.points[i]}:{v}"


def _key_lookup(d: GraphDivisor) -> dict[str, Key]:
    out: dict[str, Key] = {}
    flat = _flat_keys(d)
    for k in domain(d):
        out[_key_str(d, k, False)] = k
        if flat:
            out[str(k[1])] = k
    return out


@dataclass(frozen=True)
class Configuration:
    divisor: GraphDivisor
    points: Mapping[Key, tuple[Fraction, ...]]

    def __post_init__(self):
        clean = {k: tuple(sorted(frac(x) for x in xs)) for k, xs in self.points.items()}
        object.__setattr__(self, "points", clean)

    def __getitem__(self, k: Key) -> tuple[Fraction, ...]:
        return self.points[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.divisor == other.divisor and self.points == other.points

    def __hash__(self) -> int:
        return hash(frozenset(self.points.items()))

    def scaled(self, lam) -> Configuration:
        lam = frac(lam)
        return Configuration(self.divisor, {k: tuple(lam * x for x in xs) for k, xs in self.points.items()})

    def to_json(self) -> dict:
        flat = _flat_keys(self.divisor)
        return {
            _key_str(self.divisor, k, flat): [frac_str(x) for x in self.points[k]]
            for k in domain(self.divisor)
            if k in self.points
        }

    @classmethod
    def from_json(cls, d: GraphDivisor, data: Mapping) -> Configuration:
        lookup = _key_lookup(d)
        pts = {}
        for key, xs in data.items():
            if key not in lookup:
                raise ConfigError(f"configuration key {key!r} is not a vertex with children")
            pts[lookup[key]] = [frac(x) for x in xs]
        return cls(d, pts)


def configuration_problems(s: Configuration) -> list[str]:
    """Diagnostics; the configuration is valid when the list is empty."""
    d = s.divisor
    problems = []
    dom = domain(d)
    for k in dom:
        i, v = k
        label = _key_str(d, k, False)
        if k not in s.points:
            problems.append(f"{label}: missing from the configuration")
            continue
        xs = s.points[k]
        r = len(d.trees[i].children(v))
        if len(xs) != r:
            problems.append(f"{label}: {len(xs)} points for {r} children")
        if len(set(xs)) != len(xs):
            problems.append(f"{label}: repeated point (on the discriminant)")
    extra = set(s.points) - set(dom)
    for i, v in sorted(extra, key=str):
        problems.append(f"{i}:{v}: not a vertex with children")
    return problems


def validate_configuration(s: Configuration) -> tuple[bool, list[str]]:
    problems = configuration_problems(s)
    return not problems, problems


# ---------------------------------------------------------------------------
# group elements


@dataclass(frozen=True)
class GroupElement:
    alpha: Fraction
    beta: Mapping[tuple[int, int], Fraction]
    autos: tuple[Mapping[NodeId, NodeId], ...]

    def __post_init__(self):
        a = frac(self.alpha)
        if a == 0:
            raise ConfigError("alpha must be nonzero")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", {k: frac(x) for k, x in self.beta.items()})
        object.__setattr__(self, "autos", tuple(dict(m) for m in self.autos))

    def aut(self, k: Key) -> Key:
        i, v = k
        return i, self.autos[i].get(v, v)

    def to_json(self, d: GraphDivisor) -> dict:
        return {
            "alpha": frac_str(self.alpha),
            "beta": {
                d.base.points[i]: [frac_str(self.beta[(i, l)]) for l in range(height(t))]
                for i, t in enumerate(d.trees)
            },
            "auto": {
                d.base.points[i]: {str(v): str(w) for v, w in self.autos[i].items()}
                for i in range(d.n)
            },
        }

    @classmethod
    def from_json(cls, d: GraphDivisor, data: Mapping) -> GroupElement:
        beta = {}
        for i, label in enumerate(d.base.points):
            for l, x in enumerate(data.get("beta", {}).get(label, [])):
                beta[(i, l)] = frac(x)
        autos = []
        for i, t in enumerate(d.trees):
            by_name = {str(v): v for v in t.nodes}
            raw = data.get("auto", {}).get(d.base.points[i], {})
            autos.append({by_name[a]: by_name[b] for a, b in raw.items()})
        return cls(frac(data.get("alpha", 1)), beta, tuple(autos))


def identity(d: GraphDivisor) -> GroupElement:
    return GroupElement(1, {k: 0 for k in _level_keys(d)}, tuple({} for _ in d.trees))


def element_problems(g: GroupElement, d: GraphDivisor) -> list[str]:
    problems = []
    if set(g.beta) != set(_level_keys(d)):
        problems.append("beta must be defined exactly on the levels 0..h_i-1 of each tree")
    if len(g.autos) != d.n:
        return problems + [f"{len(g.autos)} tree automorphisms for {d.n} trees"]
    for i, t in enumerate(d.trees):
        dom = [v for v in t.nodes if t.children(v)]
        m = {v: g.autos[i].get(v, v) for v in dom}
        if sorted(map(str, m.values())) != sorted(map(str, dom)):
            problems.append(f"tree {i}: automorphism is not a permutation of the non-leaf vertices")
            continue
        for v, w in m.items():
            if t.level(v) != t.level(w) or len(t.children(v)) != len(t.children(w)):
                problems.append(f"tree {i}: {v} -> {w} does not preserve level and arity")
            p = t.parent(v)
            if p is not None and m.get(p, p) != t.parent(w):
                problems.append(f"tree {i}: {v} -> {w} does not preserve the parent")
    return problems


def act(g: GroupElement, s: Configuration) -> Configuration:
    d = s.divisor
    problems = element_problems(g, d)
    if problems:
        raise ConfigError("; ".join(problems))
    out = {}
    for k in domain(d):
        i, v = k
        b = g.beta[(i, d.trees[i].level(v))]
        out[k] = tuple(g.alpha * x + b for x in s.points[g.aut(k)])
    return Configuration(d, out)


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """``g1 . g2``: acting by it equals acting by g2 first, then g1."""
    beta = {k: g1.alpha * g2.beta[k] + g1.beta[k] for k in g1.beta}
    autos = []
    for a1, a2 in zip(g1.autos, g2.autos):
        keys = set(a1) | set(a2)
        autos.append({v: a2.get(a1.get(v, v), a1.get(v, v)) for v in keys})
    return GroupElement(g1.alpha * g2.alpha, beta, tuple(autos))


def inverse(g: GroupElement) -> GroupElement:
    beta = {k: -b / g.alpha for k, b in g.beta.items()}
    autos = tuple({w: v for v, w in a.items()} for a in g.autos)
    return GroupElement(1 / g.alpha, beta, autos)


# ---------------------------------------------------------------------------
# slice, orbits, stabilizers


def barycentric_slice(s: Configuration) -> tuple[Configuration, dict[tuple[int, int], Fraction]]:
    """Translate every (tree, level) so its barycentres average to 0.

    Returns the sliced configuration and the shift added at each level.
    """
    d = s.divisor
    shift = {}
    for i, l in _level_keys(d):
        t = d.trees[i]
        bars = [
            sum(s.points[(i, v)]) / len(s.points[(i, v)])
            for v in t.nodes
            if t.children(v) and t.level(v) == l
        ]
        shift[(i, l)] = -sum(bars) / len(bars)
    out = {
        (i, v): tuple(x + shift[(i, d.trees[i].level(v))] for x in xs)
        for (i, v), xs in s.points.items()
    }
    return Configuration(d, out), shift


def _star_autos(d: GraphDivisor) -> Iterator[tuple[dict, ...]]:
    per_tree = []
    total = 1
    for t in d.trees:
        if height(t) == 0:
            per_tree.append(None)
            continue
        ag = aut_group(t)
        total *= ag.star_order
        per_tree.append(ag)
    if total > max_aut():
        raise EnumerationLimitError(f"Aut* of order {total} exceeds enumeration cap {max_aut()}")
    gens = [
        (lambda ag=ag: iter([{}])) if ag is None else (lambda ag=ag: (m.mapping for m in ag.star_elements()))
        for ag in per_tree
    ]
    # lazy product so that searches can stop early
    def rec(i):
        if i == len(gens):
            yield ()
            return
        for head in gens[i]():
            for tail in rec(i + 1):
                yield (dict(head),) + tail

    yield from rec(0)


def _scale_for(x: Configuration, y: Configuration, autos, dom) -> list[Fraction]:
    """Candidate alphas with ``alpha * x(aut v) = y(v)`` for every ``v``."""
    for k in dom:
        yk = y.points[k]
        top_y = max(abs(a) for a in yk)
        if top_y:
            i, v = k
            top_x = max(abs(a) for a in x.points[(i, autos[i].get(v, v))])
            if not top_x:
                return []
            r = top_y / top_x
            return [r, -r]
    return [Fraction(1)]


def _matches(x: Configuration, y: Configuration, alpha, autos, dom) -> bool:
    for i, v in dom:
        img = sorted(alpha * a for a in x.points[(i, autos[i].get(v, v))])
        if img != list(y.points[(i, v)]):
            return False
    return True


def orbit_equivalent(s1: Configuration, s2: Configuration) -> GroupElement | None:
    """A group element carrying ``s1`` to ``s2``, or None."""
    d = s1.divisor
    if s2.divisor != d:
        raise StructureError("configurations over different graph divisors")
    for s in (s1, s2):
        problems = configuration_problems(s)
        if problems:
            raise ConfigError("; ".join(problems))
    x, sh1 = barycentric_slice(s1)
    y, sh2 = barycentric_slice(s2)
    dom = domain(d)
    for autos in _star_autos(d):
        for alpha in _scale_for(x, y, autos, dom):
            if _matches(x, y, alpha, autos, dom):
                beta = {k: alpha * sh1[k] - sh2[k] for k in sh1}
                return GroupElement(alpha, beta, autos)
    return None


@dataclass(frozen=True)
class StabilizerReport:
    d: int | None
    infinite: bool
    geometric_d: int | None
    note: str

    def to_json(self) -> dict:
        return {"d": self.d, "infinite": self.infinite, "geometric_d": self.geometric_d, "note": self.note}


FIELD_NOTE = (
    "computed over the rationals: the only roots of unity are +1 and -1, so d is 1 or 2"
)


def mu_d_stabilizer(s: Configuration) -> StabilizerReport:
    """Order of the group of scalings that fix the slice of ``s`` up to Aut*."""
    d = s.divisor
    problems = configuration_problems(s)
    if problems:
        raise ConfigError("; ".join(problems))
    if is_chain_divisor(d):
        return StabilizerReport(None, True, None, "chain divisor: the full multiplicative group acts")
    x, _ = barycentric_slice(s)
    dom = domain(d)
    order = 1
    for autos in _star_autos(d):
        if _matches(x, x, Fraction(-1), autos, dom):
            order = 2
            break
    return StabilizerReport(order, False, order, FIELD_NOTE)


# ---------------------------------------------------------------------------
# dimensions and reports


def moduli_dim(d: GraphDivisor) -> int:
    if not (d.base.units_trivial or d.n == 1):
        raise UnitsNontrivialError(
            "units-nontrivial: the base has non-constant units and more than one marked point"
        )
    if is_chain_divisor(d):
        return 0
    return max(d.n_edges - d.total_height - 1, 0)


@dataclass(frozen=True)
class AutVectorReport:
    points: tuple[str, ...]
    top: tuple[int, ...]
    per_level: tuple[tuple[int, ...], ...]

    @staticmethod
    def _fmt(points, coeffs) -> str:
        terms = [f"{c}*{p}" for p, c in zip(points, coeffs) if c]
        return " + ".join(terms) or "0"

    def text(self) -> str:
        lines = [f"D_m = {self._fmt(self.points, self.top)}"]
        for l, row in enumerate(self.per_level, start=1):
            lines.append(f"D_{l} = {self._fmt(self.points, row)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "top": list(self.top),
            "levels": {str(l): list(row) for l, row in enumerate(self.per_level, start=1)},
        }


def aut_vector_group_report(d: GraphDivisor) -> AutVectorReport:
    """Divisors ``D_l = sum min(l, h_i) b_i`` for ``l = 1..height``."""
    hs = d.heights
    rows = tuple(tuple(min(l, h) for h in hs) for l in range(1, d.height + 1))
    return AutVectorReport(d.base.points, hs, rows)


# ---------------------------------------------------------------------------
# modification centers


@dataclass(frozen=True)
class Center:
    point: int
    level: int
    vertex: NodeId
    child: NodeId
    coordinate: Fraction


def modification_centers(s: Configuration) -> list[list[Center]]:
    """Per level, the points blown up: child ``w`` of ``v`` sits at ``t_v = c``.

    Children in canonical order are matched with the sorted configuration
    points of their parent.
    """
    d = s.divisor
    out: list[list[Center]] = [[] for _ in range(d.height)]
    for i, v in domain(d):
        t = d.trees[i]
        kids = t.canonical_children(v)
        xs = s.points.get((i, v), ())
        if len(kids) != len(xs):
            raise ConfigError(f"vertex {v} of tree {i}: {len(kids)} children, {len(xs)} points")
        for w, c in zip(kids, xs):
            out[t.level(v)].append(Center(i, t.level(v), v, w, c))
    return out


def configuration_from_centers(d: GraphDivisor, centers: Sequence[Sequence[Center]]) -> Configuration:
    pts: dict[Key, list[Fraction]] = {}
    for level in centers:
        for c in level:
            pts.setdefault((c.point, c.vertex), []).append(c.coordinate)
    return Configuration(d, pts)


def centers_to_json(d: GraphDivisor, centers: Sequence[Sequence[Center]]) -> list:
    return [
        [
            {"point": d.base.points[c.point], "vertex": str(c.vertex), "child": str(c.child),
             "coordinate": frac_str(c.coordinate)}
            for c in level
        ]
        for level in centers
    ]


def random_configuration(d: GraphDivisor, rng, spread: int = 10) -> Configuration:
    """Distinct random integers at every vertex (``rng`` is a ``random.Random``)."""
    pts = {}
    for i, v in domain(d):
        r = len(d.trees[i].children(v))
        pts[(i, v)] = rng.sample(range(-spread, spread + 1), r)
    return Configuration(d, pts)


def random_element(d: GraphDivisor, rng, spread: int = 5) -> GroupElement:
    alpha = Fraction(rng.choice([x for x in range(-spread, spread + 1) if x]), rng.randint(1, 3))
    beta = {k: Fraction(rng.randint(-spread, spread), rng.randint(1, 3)) for k in _level_keys(d)}
    autos = []
    for t in d.trees:
        if height(t) == 0:
            autos.append({})
            continue
        ag = aut_group(t)
        if ag.star_order <= 64:
            autos.append(dict(rng.choice(list(ag.star_elements())).mapping))
        else:
            autos.append(dict(next(ag.star_elements()).mapping))
    return GroupElement(alpha, beta, tuple(autos))
