"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import gen  # noqa: E402
import oracles  # noqa: E402
from gdf import config as cfg  # noqa: E402
from gdf.cylinders import (  # noqa: E402
    bushify,
    cylinder_canonical_invariant,
    cylinders_isomorphic_over_B,
    stretch,
    stretch_type_law_check,
    verify_certificate,
)
from gdf.divisors import (  # noqa: E402
    BaseCurve,
    GraphDivisor,
    is_chain_divisor,
    pic_rank_excess,
    type_divisor,
)
from gdf.models import accompanying_sequence, branch_length, spring_q, tree_from_sequence  # noqa: E402
from gdf.poly import RatPoly  # noqa: E402
from gdf.trees import (  # noqa: E402
    RootedTree,
    gizatullin_tree,
    height,
    tree_iso,
    tree_type,
    truncate,
)

RESULTS: dict[int, tuple[bool, str]] = {}
SEED = 20240601


def T(nested):
    return RootedTree.from_nested(nested)


class Check:
    """Collects failures so a criterion reports every problem it found."""

    def __init__(self):
        self.failures: list[str] = []
        self.count = 0

    def __call__(self, ok: bool, what: str) -> None:
        self.count += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(what)
        elif not ok:
            self.failures.append("")

    @property
    def ok(self) -> bool:
        return not self.failures

    def detail(self, summary: str) -> str:
        if self.ok:
            return summary
        shown = [f for f in self.failures if f][:5]
        return f"{summary}; {len(self.failures)} failing checks, e.g. {shown}"


# ---------------------------------------------------------------------------


def criterion_1():
    chk = Check()
    cases = [
        ("bush (0,2,1,2)", gen.BUSH_0212, (0, 2, 1, 2)),
        ("spring bush (0,0,3,1,2)", gen.SPRING_00312, (0, 0, 3, 1, 2)),
        ("fork (0,1,2)", gen.FORK_012, (0, 1, 2)),
        ("bush (0,1,2)", gen.BUSH_012, (0, 1, 2)),
    ]
    for name, nested, expected in cases:
        got = tree_type(T(nested))
        chk(got == expected, f"{name}: {got} != {expected}")
    chk(tree_iso(truncate(T(gen.SPRING_00312), 3), T(gen.BUSH_0032)) is not None,
        "truncated spring bush is not the (0,0,3,2) bush")
    return chk.ok, chk.detail("reference tree types and truncation reproduced")


def criterion_2():
    chk = Check()
    bush = T(gen.BUSH_0212)
    seq = accompanying_sequence(bush, list(range(5)))

    def prod(k):
        # expanded independently of the library constructor
        out = RatPoly([1])
        for i in range(k):
            out = out * RatPoly([-i, 1])
        return out

    expected = [prod(5), prod(3), RatPoly([0, -1, 1])]
    for i, (got, want) in enumerate(zip(seq.p, expected), start=1):
        chk(got.coeffs == want.coeffs, f"p_{i} = {got}")
    for i, (p, r) in enumerate(zip(seq.p, seq.r), start=1):
        chk((r * p).coeffs == prod(5).coeffs and prod(5).divmod(p)[0] == r, f"r_{i} != p_1/p_{i}")
    lengths = [branch_length(seq, a) for a in range(5)]
    chk(sorted(lengths, reverse=True) == [3, 3, 2, 1, 1], f"branch lengths {lengths}")
    chk(tree_iso(tree_from_sequence(seq), bush) is not None, "roundtrip tree differs from the (0,2,1,2) bush")
    return chk.ok, chk.detail("accompanying sequence of the (0,2,1,2) bush reproduced")


def criterion_3(n_instances: int = 1000):
    rng = random.Random(SEED + 3)
    chk = Check()
    positives = 0
    for k in range(n_instances):
        base = gen.random_base(rng, rng.randint(1, 3), ["full", "zero", "rank1"][k % 3])
        x = gen.random_divisor(rng, base)
        y = gen.partner(rng, x) if rng.random() < 0.6 else gen.random_divisor(rng, base)
        dec = cylinders_isomorphic_over_B(x, y)
        want = oracles.cylinder_oracle(type_divisor(x).levels, type_divisor(y).levels,
                                       base.principal_lattice, bound=10)
        chk(dec.isomorphic == want, f"instance {k}: decision {dec.isomorphic}, oracle {want}")
        if dec:
            positives += 1
            chk(verify_certificate(x, y, dec.certificate), f"instance {k}: bad certificate")
    return chk.ok, chk.detail(f"{n_instances} instances, {positives} isomorphic, 0 disagreements")


def criterion_4(n_cases: int = 500):
    rng = random.Random(SEED + 4)
    chk = Check()
    principal = 0
    for k in range(n_cases):
        d = gen.random_divisor(rng)
        a = tuple(rng.randint(0, 4) for _ in range(d.n))
        b = tuple(rng.randint(0, 4) for _ in range(d.n))
        s = stretch(d, a)
        want = tuple(tuple(l + ai for l in ls) for ls, ai in zip(type_divisor(d).levels, a))
        chk(type_divisor(s).levels == tuple(tuple(sorted(x)) for x in want), f"case {k}: levels")
        chk(stretch_type_law_check(d, a), f"case {k}: law check")
        if d.base.is_principal(a):
            principal += 1
            dec = cylinders_isomorphic_over_B(d, s)
            chk(dec.isomorphic and dec.certificate.shift == tuple(-x for x in a),
                f"case {k}: shift {dec.certificate and dec.certificate.shift} for A={a}")
        twice, once = stretch(s, b), stretch(d, tuple(x + y for x, y in zip(a, b)))
        chk(all(tree_iso(p, q) for p, q in zip(twice.trees, once.trees)), f"case {k}: composition")
    return chk.ok, chk.detail(f"{n_cases} stretchings, {principal} with principal A")


def criterion_5(n_cases: int = 300):
    rng = random.Random(SEED + 5)
    chk = Check()
    giz = 0
    for k in range(n_cases):
        d = gen.random_divisor(rng)
        b = bushify(d)
        dec = cylinders_isomorphic_over_B(d, b)
        chk(dec.isomorphic and dec.certificate.shift == (0,) * d.n, f"case {k}: bushify")
        chk(all(tree_iso(p, q) for p, q in zip(bushify(b).trees, b.trees)), f"case {k}: idempotence")
        t = d.trees[0]
        if height(t) >= 1:
            giz += 1
            single = GraphDivisor.single(t)
            g = GraphDivisor.single(gizatullin_tree(tree_type(t)))
            chk(cylinders_isomorphic_over_B(single, g).isomorphic, f"case {k}: gizatullin")
    return chk.ok, chk.detail(f"{n_cases} divisors bushified, {giz} gizatullin comparisons")


def criterion_6(n_cases: int = 300):
    rng = random.Random(SEED + 6)
    chk = Check()
    for k in range(n_cases):
        spring = gen.random_spring_bush(rng)
        sd = spring_q(spring)
        tt = tree_type(spring)
        chk(sd.N == sum(tt[1:]), f"case {k}: N = {sd.N}, type {tt}")
        for i in range(height(spring)):
            chk(sd.level_count(i) == sum(tt[i + 1:]), f"case {k}: N_{i}")
    spring = T(gen.SPRING_00312)
    sd = spring_q(spring, accompanying_sequence(truncate(spring, 3), list(range(5))))
    p1 = sd.base_sequence.p[0]
    chk(sd.p_top.coeffs == RatPoly([0, 1]).coeffs, f"p_4 = {sd.p_top}")
    chk(sd.r_top.coeffs == p1.divmod(RatPoly([0, 1]))[0].coeffs, f"r_4 = {sd.r_top}")
    chk(sd.N == 6, f"spring bush N = {sd.N}")
    return chk.ok, chk.detail(f"{n_cases} spring data; reference spring bush gives (p_4, r_4) = (u, p_1/u)")


def _small_divisor(rng):
    base = gen.random_base(rng, rng.randint(1, 2))
    return gen.random_divisor(rng, base, max_leaves=4, max_level=3)


def criterion_7(n_cases: int = 300):
    rng = random.Random(SEED + 7)
    chk = Check()
    for k in range(n_cases):
        d = _small_divisor(rng)
        s1 = cfg.random_configuration(d, rng, spread=4)
        s2 = cfg.act(cfg.random_element(d, rng), s1) if rng.random() < 0.5 else cfg.random_configuration(d, rng, 4)
        s3 = cfg.act(cfg.random_element(d, rng), s2) if rng.random() < 0.5 else cfg.random_configuration(d, rng, 4)
        e = {}
        for (a, sa), (b, sb) in [((1, s1), (2, s2)), ((2, s2), (1, s1)), ((2, s2), (3, s3)),
                                 ((1, s1), (3, s3)), ((1, s1), (1, s1))]:
            g = cfg.orbit_equivalent(sa, sb)
            e[(a, b)] = g
            if g is not None:
                chk(cfg.act(g, sa) == sb, f"triple {k}: witness {a}->{b} fails")
            want = oracles.orbit_oracle(d, sa.points, sb.points)
            chk((g is not None) == want, f"triple {k}: {a}->{b} verdict {g is not None}, oracle {want}")
        chk(e[(1, 1)] is not None, f"triple {k}: not reflexive")
        chk((e[(1, 2)] is None) == (e[(2, 1)] is None), f"triple {k}: not symmetric")
        if e[(1, 2)] is not None and e[(2, 3)] is not None:
            chk(e[(1, 3)] is not None, f"triple {k}: not transitive")
            chk(cfg.act(cfg.compose(e[(2, 3)], e[(1, 2)]), s1) == s3, f"triple {k}: composite witness")

    for k in range(n_cases):
        d = _small_divisor(rng)
        s = cfg.random_configuration(d, rng)
        t = cfg.act(cfg.random_element(d, rng), s)
        h = cfg.orbit_equivalent(s, t)
        chk(h is not None and cfg.act(h, s) == t, f"recover {k}")

    for k in range(50):
        lengths = [rng.randint(0, 4) for _ in range(rng.randint(1, 3))]
        d = GraphDivisor(BaseCurve.affine_line(len(lengths)), tuple(RootedTree.chain(m) for m in lengths))
        s1, s2 = cfg.random_configuration(d, rng), cfg.random_configuration(d, rng)
        chk(cfg.orbit_equivalent(s1, s2) is not None, f"chain {k}: configurations not equivalent")
        chk(cfg.moduli_dim(d) == 0, f"chain {k}: moduli_dim != 0")

    bush = GraphDivisor.single(T(gen.BUSH_0212))
    # edge count straight from the nested data
    def count_nodes(x):
        return 1 + sum(count_nodes(c) for c in x)

    edges = count_nodes(gen.BUSH_0212) - 1
    chk(cfg.config_space_dim(bush) == edges, f"config_space_dim {cfg.config_space_dim(bush)} != {edges}")
    chk(cfg.moduli_dim(bush) == edges - 3 - 1, f"moduli_dim {cfg.moduli_dim(bush)}")
    pm = GraphDivisor.single(T([[], []]))
    chk(cfg.mu_d_stabilizer(cfg.Configuration(pm, {(0, 0): [-1, 1]})).d == 2, "mu_d of {-1,1}")
    return chk.ok, chk.detail(
        f"{n_cases} triples + {n_cases} recoveries; the (0,2,1,2) bush has {edges} edges so "
        f"config_space_dim = {cfg.config_space_dim(bush)}, moduli_dim = {cfg.moduli_dim(bush)}"
    )


def criterion_8(n_divisors: int = 200):
    rng = random.Random(SEED + 8)
    chk = Check()
    summary = []
    for kind in ("full", "zero", "rank1"):
        base = gen.random_base(rng, 2, kind)
        seeds = [gen.random_divisor(rng, base, max_leaves=4, max_level=4) for _ in range(n_divisors // 5)]
        family = [gen.partner(rng, rng.choice(seeds)) for _ in range(n_divisors - len(seeds))] + seeds
        inv = [cylinder_canonical_invariant(d) for d in family]
        equal = 0
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                dec = cylinders_isomorphic_over_B(family[i], family[j]).isomorphic
                same = inv[i] == inv[j]
                equal += same
                chk(dec == same, f"{kind}: pair ({i},{j}) decision {dec}, invariant {same}")
        summary.append(f"{kind}: {equal} isomorphic pairs")
    return chk.ok, chk.detail(f"3 families of {n_divisors} divisors, all pairs ({', '.join(summary)})")


def criterion_9(n_cases: int = 1000):
    rng = random.Random(SEED + 9)
    chk = Check()
    chains = 0
    for k in range(n_cases):
        d = gen.random_divisor(rng)
        rho = pic_rank_excess(d)
        direct = sum(len(oracles.leaf_levels_direct(t)) - 1 for t in d.trees)
        chk(rho == direct, f"case {k}: rho {rho} != {direct}")
        chain = all(len(t.children(v)) <= 1 for t in d.trees for v in t.nodes)
        chains += chain
        chk((rho == 0) == chain == is_chain_divisor(d), f"case {k}: chain test")
    return chk.ok, chk.detail(f"{n_cases} divisors, {chains} chain divisors")


CRITERIA = {
    1: ("reference trees", criterion_1),
    2: ("accompanying sequence of the (0,2,1,2) bush", criterion_2),
    3: ("decision vs brute-force oracle", criterion_3),
    4: ("stretching laws", criterion_4),
    5: ("bush normal form", criterion_5),
    6: ("spring-bush counts", criterion_6),
    7: ("orbit layer", criterion_7),
    8: ("invariant completeness", criterion_8),
    9: ("Pic bookkeeping", criterion_9),
}


def line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"criterion {n} ({CRITERIA[n][0]}): {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    try:
        RESULTS[n] = CRITERIA[n][1]()
    except Exception as exc:  # report crashes as failures too
        RESULTS[n] = (False, f"raised {type(exc).__name__}: {exc}")
    print(line(n))
    assert RESULTS[n][0], line(n)


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        try:
            RESULTS[n] = CRITERIA[n][1]()
        except Exception as exc:
            RESULTS[n] = (False, f"raised {type(exc).__name__}: {exc}")
        print(line(n), flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
