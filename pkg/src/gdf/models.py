"""Accompanying sequences of bushes and spring bushes, and explicit models.

A bush of height m with branches ``B_alpha`` (one per chosen rational
root ``alpha``) is encoded by monic squarefree polynomials

    p_i = prod over branches of length >= i of (u - alpha),   r_i = p_1 / p_i,

and the surface ``z t_1 = p_1(u)``, ``z t_i = r_i(u) t_{i-1}`` (i = 2..m)
has the bush as the fiber tree over ``z = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .poly import MPoly, RatPoly, frac, frac_str
from .trees import RootedTree, TreeError, height, is_bush, is_spring_bush, truncate


class SequenceError(ValueError):
    """An accompanying sequence that violates its defining invariants."""


@dataclass(frozen=True)
class Root:
    alpha: Fraction
    length: int
    branch: Hashable = None


@dataclass(frozen=True)
class AccompanyingSequence:
    m: int
    p: tuple[RatPoly, ...]
    r: tuple[RatPoly, ...]
    roots: tuple[Root, ...]

    def p_at(self, i: int) -> RatPoly:
        """``p_i`` for 1-based ``i``; ``p_{m+1} = 1``."""
        return self.p[i - 1] if i <= self.m else RatPoly([1])

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "p": [x.to_json() for x in self.p],
            "r": [x.to_json() for x in self.r],
            "roots": [{"alpha": frac_str(x.alpha), "length": x.length} for x in self.roots],
        }


def _branches(t: RootedTree) -> list:
    # decreasing length, input order among equal lengths
    return sorted(t.children(t.root), key=lambda c: -t.subtree_height(c))


def accompanying_sequence(
    t: RootedTree, roots: Mapping | Sequence | None = None
) -> AccompanyingSequence:
    """Accompanying sequence of a bush.

    ``roots`` maps root-children (branch ids) to rationals, or lists the
    rationals in default branch order; the default is ``0, 1, ..., d-1``.
    """
    if not is_bush(t):
        raise TreeError("accompanying sequences are defined for bushes")
    m = height(t)
    if m < 1:
        raise TreeError("the bush must have height >= 1")
    branches = _branches(t)
    if roots is None:
        values = [Fraction(k) for k in range(len(branches))]
    elif isinstance(roots, Mapping):
        values = [frac(roots[b]) for b in branches]
    else:
        values = [frac(x) for x in roots]
        if len(values) != len(branches):
            raise ValueError(f"{len(values)} roots for {len(branches)} branches")
    if len(set(values)) != len(values):
        raise ValueError("assigned roots must be pairwise distinct")
    rts = tuple(Root(a, t.subtree_height(b) + 1, b) for a, b in zip(values, branches))
    return sequence_from_roots(rts, m)


def sequence_from_roots(roots: Sequence[Root], m: int | None = None) -> AccompanyingSequence:
    roots = tuple(roots)
    m = max(x.length for x in roots) if m is None else m
    p = tuple(RatPoly.from_roots(x.alpha for x in roots if x.length >= i) for i in range(1, m + 1))
    r = tuple(p[0].exact_divide(pi) for pi in p)
    return AccompanyingSequence(m, p, r, roots)


def branch_length(seq: AccompanyingSequence, alpha) -> int:
    """Largest ``l`` with ``p_1(alpha) = ... = p_l(alpha) = 0``."""
    alpha = frac(alpha)
    if seq.p[0](alpha) != 0:
        raise ValueError(f"{alpha} is not a root of p_1")
    l = 0
    while l < seq.m and seq.p[l](alpha) == 0:
        l += 1
    # the r-side vanishing pattern must agree
    pattern = [seq.r[i](alpha) != 0 for i in range(seq.m)]
    if pattern != [i < l for i in range(seq.m)]:
        raise SequenceError(f"p- and r-vanishing patterns disagree at {alpha}")
    return l


def sequence_problems(seq: AccompanyingSequence) -> list[str]:
    """Invariant violations of an accompanying sequence (empty when valid)."""
    problems = []
    one = RatPoly([1])
    if len(seq.p) != seq.m or len(seq.r) != seq.m:
        return [f"expected {seq.m} pairs (p_i, r_i)"]
    for i, (p, r) in enumerate(zip(seq.p, seq.r), start=1):
        if not p.is_monic() or not r.is_monic():
            problems.append(f"p_{i} or r_{i} is not monic")
        if not p.is_squarefree():
            problems.append(f"p_{i} has a repeated root")
        if not r.is_squarefree():
            problems.append(f"r_{i} has a repeated root")
        if r * p != seq.p[0]:
            problems.append(f"r_{i} * p_{i} != p_1")
    if seq.r and seq.r[0] != one:
        problems.append("r_1 != 1")
    for i in range(seq.m - 1):
        if not seq.p[i + 1].divides(seq.p[i]):
            problems.append(f"p_{i + 2} does not divide p_{i + 1}")
        if not seq.r[i].divides(seq.r[i + 1]):
            problems.append(f"r_{i + 1} does not divide r_{i + 2}")
    alphas = [x.alpha for x in seq.roots]
    if len(set(alphas)) != len(alphas):
        problems.append("repeated root in the root list")
    for i in range(1, seq.m + 1):
        expect = sum(1 for x in seq.roots if x.length >= i)
        if seq.p[i - 1].degree != expect:
            problems.append(f"deg p_{i} = {seq.p[i - 1].degree}, expected {expect}")
    return problems


def tree_from_sequence(seq: AccompanyingSequence) -> RootedTree:
    """The bush with one branch of length ``l(alpha)`` per root of ``p_1``."""
    problems = sequence_problems(seq)
    if problems:
        raise SequenceError("; ".join(problems))
    lengths = sorted((branch_length(seq, x.alpha) for x in seq.roots), reverse=True)
    if len(lengths) != seq.p[0].degree:
        raise SequenceError("root list does not exhaust the roots of p_1")
    parent: dict[int, int | None] = {0: None}
    for length in lengths:
        prev = 0
        for _ in range(length):
            node = len(parent)
            parent[node] = prev
            prev = node
    return RootedTree(parent)


# ---------------------------------------------------------------------------
# explicit models


@dataclass(frozen=True)
class Equation:
    lhs: MPoly
    rhs: MPoly

    @property
    def poly(self) -> MPoly:
        return self.lhs - self.rhs

    def __str__(self) -> str:
        return f"{self.lhs} - ({self.rhs})"


@dataclass(frozen=True)
class SurfaceModel:
    variables: tuple[str, ...]
    equations: tuple[Equation, ...]

    def evaluate(self, point: Mapping[str, object]) -> list[Fraction]:
        return [eq.poly.evaluate(point) for eq in self.equations]

    def text(self) -> str:
        return "\n".join(f"{eq} = 0" for eq in self.equations)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "equations": [
                {"text": str(eq), "terms": eq.poly.to_json()} for eq in self.equations
            ],
        }


def _uvar(p: RatPoly) -> MPoly:
    return MPoly.from_univariate(p, "u")


def surface_equations(seq: AccompanyingSequence, j: int | None = None) -> SurfaceModel:
    j = seq.m if j is None else j
    if not 1 <= j <= seq.m:
        raise ValueError(f"level {j} outside 1..{seq.m}")
    z = MPoly.var("z")
    t = [MPoly.var(f"t{i}") for i in range(1, j + 1)]
    eqs = [Equation(z * t[0], _uvar(seq.p[0]))]
    for i in range(2, j + 1):
        eqs.append(Equation(z * t[i - 1], _uvar(seq.r[i - 1]) * t[i - 2]))
    return SurfaceModel(("z", "u", *(f"t{i}" for i in range(1, j + 1))), tuple(eqs))


@dataclass(frozen=True)
class DanielewskiModel:
    bush: RootedTree
    sequence: AccompanyingSequence
    model: SurfaceModel


def danielewski_model(m: int, roots: Sequence) -> DanielewskiModel:
    """``z^m t = p(u)`` with ``p`` the monic polynomial with the given roots."""
    if m < 1:
        raise ValueError("m must be >= 1")
    roots = [frac(a) for a in roots]
    if not roots or len(set(roots)) != len(roots):
        raise ValueError("roots must be non-empty and pairwise distinct")
    seq = sequence_from_roots([Root(a, m) for a in roots], m)
    z, t = MPoly.var("z"), MPoly.var("t")
    zm = MPoly({(("z", m),): 1})
    model = SurfaceModel(("z", "u", "t"), (Equation(zm * t, _uvar(seq.p[0])),))
    return DanielewskiModel(tree_from_sequence(seq), seq, model)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class FiberReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def verify_fiber_structure(seq: AccompanyingSequence) -> FiberReport:
    """Algebraic proxies for smoothness and reducedness of the model fibers."""
    checks = []
    problems = sequence_problems(seq)
    checks.append(Check("sequence invariants", not problems, "; ".join(problems)))
    for i, p in enumerate(seq.p, start=1):
        checks.append(Check(f"p_{i} squarefree", p.is_squarefree()))
    for i in range(1, seq.m + 1):
        expect = sum(1 for x in seq.roots if x.length >= i)
        checks.append(
            Check(f"deg p_{i} bookkeeping", seq.p[i - 1].degree == expect,
                  f"deg {seq.p[i - 1].degree}, branches reaching level {i}: {expect}")
        )
    for x in seq.roots:
        a = x.alpha
        l = sum(1 for p in seq.p if p(a) == 0)
        p_ok = all(seq.p[i](a) == 0 for i in range(l)) and l == x.length
        r_ok = all((seq.r[i](a) != 0) == (i < l) for i in range(seq.m))
        checks.append(Check(f"vanishing pattern at {frac_str(a)}", p_ok and r_ok,
                            f"l(alpha) = {l}, declared {x.length}"))
    return FiberReport(tuple(checks))


# ---------------------------------------------------------------------------
# spring bushes


def default_q_alpha(n: int) -> RatPoly:
    """``v`` for ``n = 1``, otherwise ``prod_{k<n} (v - k)``."""
    return RatPoly.from_roots(range(n), var="v")


@dataclass(frozen=True)
class SpringData:
    spring: RootedTree
    base_sequence: AccompanyingSequence
    extended: AccompanyingSequence
    n_alpha: Mapping[Fraction, int]
    top_length: Mapping[Fraction, int]
    q_alpha: Mapping[Fraction, RatPoly]
    q: MPoly

    @property
    def h_hat(self) -> int:
        return self.extended.m

    @property
    def p_top(self) -> RatPoly:
        return self.extended.p[-1]

    @property
    def r_top(self) -> RatPoly:
        return self.extended.r[-1]

    @property
    def N(self) -> int:
        return sum(self.n_alpha.values())

    def level_count(self, i: int) -> int:
        """Sum of ``n(alpha)`` over branches reaching level ``i + 1``."""
        return sum(n for a, n in self.n_alpha.items() if self.top_length[a] >= i + 1)

    def to_json(self) -> dict:
        return {
            "p_top": self.p_top.to_json(),
            "r_top": self.r_top.to_json(),
            "n_alpha": {frac_str(a): n for a, n in self.n_alpha.items()},
            "q_alpha": {frac_str(a): q.to_json() for a, q in self.q_alpha.items()},
            "q": self.q.to_json(),
            "q_text": str(self.q),
            "N": self.N,
        }


def spring_q(
    spring: RootedTree,
    seq: AccompanyingSequence | None = None,
    q_alpha: Mapping | None = None,
) -> SpringData:
    """Spring data of a spring bush over the accompanying sequence of its truncation."""
    h_hat = height(spring)
    if not is_spring_bush(spring):
        raise TreeError("input is not a spring bush")
    h = h_hat - 1
    if h < 1:
        raise TreeError("spring data needs a truncation of height >= 1")
    base = truncate(spring, h)
    if seq is None:
        seq = accompanying_sequence(base)
    if seq.m != h:
        raise ValueError(f"sequence has height {seq.m}, truncation has height {h}")
    n_alpha, top_len, ext_roots = {}, {}, []
    for x in seq.roots:
        if x.branch not in spring or spring.parent(x.branch) != spring.root:
            raise ValueError("sequence roots are not tied to branches of this spring bush")
        # walk up the chain inside the truncation
        v = x.branch
        while spring.level(v) < h and spring.children(v):
            v = spring.children(v)[0]
        top = [c for c in spring.children(v)] if spring.level(v) == h else []
        n_alpha[x.alpha] = max(len(top), 1)
        top_len[x.alpha] = h_hat if top else x.length
        ext_roots.append(Root(x.alpha, top_len[x.alpha], x.branch))
    overrides = {frac(k): v for k, v in (q_alpha or {}).items()}
    qa = {}
    for a, n in n_alpha.items():
        q_a = overrides.get(a, default_q_alpha(n))
        if not isinstance(q_a, RatPoly):
            q_a = RatPoly.from_json(q_a, var="v")
        q_a = RatPoly(q_a.coeffs, "v")
        if q_a.degree != n or not q_a.is_monic() or not q_a.is_squarefree():
            raise ValueError(f"q_alpha at {a} must be monic squarefree of degree {n}")
        if n == 1 and q_a != RatPoly.x("v"):
            raise ValueError("q_alpha must be v when n(alpha) = 1")
        qa[a] = q_a
    p1 = seq.p[0]
    q = MPoly()
    for a, q_a in qa.items():
        cofactor = p1.exact_divide(RatPoly([-a, 1]))
        q = q + MPoly.from_univariate(q_a, "v") * _uvar(cofactor)
    extended = sequence_from_roots(ext_roots, h_hat)
    return SpringData(spring, seq, extended, n_alpha, top_len, qa, q)


def spring_model(sd: SpringData) -> SurfaceModel:
    """Equations of the bush model at height h-hat plus ``z w = q(u, v)``."""
    base = surface_equations(sd.extended)
    z, w = MPoly.var("z"), MPoly.var("w")
    eqs = base.equations + (Equation(z * w, sd.q),)
    return SurfaceModel(base.variables + ("v", "w"), eqs)
