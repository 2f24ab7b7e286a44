"""Command-line front end.

Every command reads JSON inputs (a file path, or the JSON text itself),
prints a JSON or text report and exits with 0 (constructed / positive
decision), 1 (negative decision, reason given) or 2 (input error).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import config as cfg
from . import cylinders as cyl
from . import models
from .divisors import GraphDivisor, StructureError, type_divisor
from .poly import frac, frac_str
from .trees import (
    EnumerationLimitError,
    RootedTree,
    TreeError,
    gizatullin_tree,
    height,
    tree_type,
    truncate,
    validate_type,
)

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class Result:
    data: Any
    text: str
    status: int = OK
    extra: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# input loading


def _read(arg: str, what: str) -> Any:
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            raw, src = fh.read(), arg
    else:
        raw, src = arg, "<inline>"
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        if src == "<inline>" and not raw.lstrip().startswith(("[", "{")):
            raise InputError(f"{what}: no such file {arg!r}") from None
        raise InputError(f"{what} {src}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _guard(what: str, fn: Callable, *args):
    try:
        return fn(*args)
    except KeyError as exc:
        raise InputError(f"{what}: missing field {exc.args[0]!r}") from None
    except (ValueError, TypeError, TreeError, StructureError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: {exc}") from None


def load_tree(arg: str) -> RootedTree:
    data = _read(arg, "tree")
    if isinstance(data, dict) and "trees" in data:
        d = load_divisor_data(data, "tree")
        if d.n != 1:
            raise InputError("tree: divisor file holds more than one tree")
        return d.trees[0]
    return _guard("tree", RootedTree.from_json, data)


def load_divisor_data(data: Any, what: str = "divisor") -> GraphDivisor:
    if isinstance(data, list):
        data = {"trees": [data]}
    if not isinstance(data, dict):
        raise InputError(f"{what}: expected an object with 'trees'")
    if not isinstance(data.get("trees"), list):
        raise InputError(f"{what}: field 'trees' must be a list of trees")
    return _guard(what, GraphDivisor.from_json, data)


def load_divisor(arg: str) -> GraphDivisor:
    return load_divisor_data(_read(arg, "divisor"))


def parse_ints(arg: str, what: str) -> tuple[int, ...]:
    text = arg
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    body = text.strip().strip("()[]")
    try:
        return tuple(int(x) for x in body.split(",") if x.strip())
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text.strip()!r}") from None


def load_config(d: GraphDivisor, arg: str) -> cfg.Configuration:
    data = _read(arg, "configuration")
    if not isinstance(data, dict):
        raise InputError("configuration: expected an object mapping vertex ids to point lists")
    s = _guard("configuration", cfg.Configuration.from_json, d, data)
    problems = cfg.configuration_problems(s)
    if problems:
        raise InputError("configuration: " + "; ".join(problems))
    return s


# ---------------------------------------------------------------------------
# commands


def _type_text(tt) -> str:
    return "(" + ",".join(map(str, tt)) + ")"


def cmd_tp(a) -> Result:
    tt = tree_type(load_tree(a.tree))
    return Result({"type": list(tt)}, _type_text(tt))


def cmd_bushify(a) -> Result:
    out = cyl.bushify(load_divisor(a.divisor))
    return Result(out.to_json(), json.dumps(out.to_json()["trees"]))


def cmd_giz(a) -> Result:
    tt = _guard("type", validate_type, parse_ints(a.type, "type"))
    t = _guard("type", gizatullin_tree, tt)
    return Result({"tree": t.to_nested()}, t.to_text())


def cmd_typediv(a) -> Result:
    d = load_divisor(a.divisor)
    td = type_divisor(d)
    lines = [f"{p}: {list(ls)}" for p, ls in zip(d.base.points, td.levels)]
    return Result(td.to_json(), "\n".join(lines))


def _decision_result(dec: cyl.CylinderDecision) -> Result:
    if dec:
        c = dec.certificate
        text = f"isomorphic: shift c = {list(c.shift)}, lattice witness {list(c.lattice_witness)}"
        if dec.base_permutation is not None:
            text += f", base permutation {list(dec.base_permutation)}"
        return Result(dec.to_json(), text)
    return Result(dec.to_json(), f"not isomorphic: {dec.reason}", NEGATIVE)


def cmd_cyliso(a) -> Result:
    dx, dy = load_divisor(a.x), load_divisor(a.y)
    fn = cyl.cylinders_isomorphic_fiberwise if a.fiberwise else cyl.cylinders_isomorphic_over_B
    return _decision_result(_guard("cyliso", fn, dx, dy))


def cmd_stretch(a) -> Result:
    d = load_divisor(a.divisor)
    spec = _guard("stretch", cyl.StretchSpec, parse_ints(a.a, "A"), a.principal)
    out = _guard("stretch", cyl.stretch, d, spec)
    data = out.to_json()
    res = Result(data, json.dumps(data["trees"]))
    if a.check_law:
        ok = cyl.stretch_type_law_check(d, spec)
        data["law_holds"] = ok
        res.text += f"\ntype divisor law: {'holds' if ok else 'FAILS'}"
        res.status = OK if ok else NEGATIVE
    return res


def cmd_canon(a) -> Result:
    rec = cyl.cylinder_canonical_invariant(load_divisor(a.divisor))
    return Result(rec.to_json(), "\n".join(str(list(x)) for x in rec.levels))


def _model_tree(arg: str) -> RootedTree:
    data = _read(arg, "model input")
    if isinstance(data, dict) and "trees" in data:
        d = load_divisor_data(data)
        tall = [t for t in d.trees if height(t) > 0]
        if len(tall) != 1:
            raise InputError("model input: need exactly one tree of positive height")
        return tall[0]
    return _guard("model input", RootedTree.from_json, data)


def cmd_model(a) -> Result:
    t = _model_tree(a.input)
    roots = [_guard("roots", frac, r) for r in a.roots] if a.roots else None
    if a.spring:
        base = _guard("model", truncate, t, height(t) - 1)
        seq = _guard("model", models.accompanying_sequence, base, roots)
        sd = _guard("model", models.spring_q, t, seq)
        m = models.spring_model(sd)
        report = models.verify_fiber_structure(sd.extended)
        counts = {
            "N": sd.N,
            "N_matches_type": sd.N == sum(tree_type(t)[1:]),
            "level_counts": [sd.level_count(i) for i in range(height(t))],
        }
        data = {"model": m.to_json(), "spring": sd.to_json(), "counts": counts, "report": report.to_json()}
    else:
        seq = _guard("model", models.accompanying_sequence, t, roots)
        m = models.surface_equations(seq)
        report = models.verify_fiber_structure(seq)
        data = {"sequence": seq.to_json(), "model": m.to_json(), "report": report.to_json()}
    lines = [m.text(), ""]
    lines += [f"[{'pass' if c.passed else 'FAIL'}] {c.name}" for c in report.checks]
    return Result(data, "\n".join(lines), OK if report.ok else NEGATIVE)


def cmd_configdim(a) -> Result:
    n = cfg.config_space_dim(load_divisor(a.divisor))
    return Result({"config_space_dim": n}, str(n))


def cmd_orbiteq(a) -> Result:
    d = load_divisor(a.divisor)
    s1, s2 = load_config(d, a.s1), load_config(d, a.s2)
    g = cfg.orbit_equivalent(s1, s2)
    if g is None:
        return Result({"equivalent": False, "element": None, "reason": "no-group-element"},
                      "not equivalent", NEGATIVE)
    data = {"equivalent": True, "element": g.to_json(d)}
    return Result(data, f"equivalent: alpha = {frac_str(g.alpha)}\n{json.dumps(data['element'])}")


def cmd_slice(a) -> Result:
    d = load_divisor(a.divisor)
    s0, shift = cfg.barycentric_slice(load_config(d, a.s))
    shifts = {
        p: [frac_str(shift[(i, l)]) for l in range(height(t))]
        for i, (p, t) in enumerate(zip(d.base.points, d.trees))
    }
    data = {"configuration": s0.to_json(), "shifts": shifts}
    return Result(data, json.dumps(data["configuration"]))


def cmd_stab(a) -> Result:
    d = load_divisor(a.divisor)
    rep = cfg.mu_d_stabilizer(load_config(d, a.s))
    text = "d = infinite (multiplicative group)" if rep.infinite else f"d = {rep.d}"
    return Result(rep.to_json(), f"{text}\n{rep.note}")


def cmd_modulidim(a) -> Result:
    d = load_divisor(a.divisor)
    try:
        n = cfg.moduli_dim(d)
    except cfg.UnitsNontrivialError as exc:
        return Result({"moduli_dim": None, "flag": "units-nontrivial", "reason": str(exc)},
                      f"refused: {exc}", NEGATIVE)
    rep = cfg.aut_vector_group_report(d)
    data = {"moduli_dim": n, "config_space_dim": cfg.config_space_dim(d),
            "total_height": d.total_height, "aut_vector": rep.to_json()}
    return Result(data, f"{n}\n{rep.text()}")


def cmd_centers(a) -> Result:
    d = load_divisor(a.divisor)
    centers = _guard("centers", cfg.modification_centers, load_config(d, a.s))
    data = {"levels": cfg.centers_to_json(d, centers)}
    lines = []
    for l, level in enumerate(data["levels"]):
        pts = ", ".join(f"{c['point']}:{c['vertex']}->{c['child']} @ {c['coordinate']}" for c in level)
        lines.append(f"level {l}: {pts}")
    return Result(data, "\n".join(lines))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="gdf", description="Fiber trees, cylinders and moduli of GDF surfaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, *args):
        p = sub.add_parser(name, parents=[common], help=help_)
        for arg in args:
            p.add_argument(arg)
        p.set_defaults(func=fn)
        return p

    add("tp", cmd_tp, "type vector of a tree", "tree")
    add("bushify", cmd_bushify, "replace trees by bushes of the same type", "divisor")
    add("giz", cmd_giz, "Gizatullin tree of a type vector", "type")
    add("typediv", cmd_typediv, "type divisor (leaf levels per point)", "divisor")
    p = add("cyliso", cmd_cyliso, "decide isomorphism of cylinders", "x", "y")
    p.add_argument("--fiberwise", action="store_true", help="also search listed base automorphisms")
    p = add("stretch", cmd_stretch, "insert chains below the roots", "divisor", "a")
    p.add_argument("--principal", action="store_true", help="require A to be principal")
    p.add_argument("--check-law", action="store_true", help="verify the type divisor transformation")
    add("canon", cmd_canon, "canonical cylinder invariant", "divisor")
    p = add("model", cmd_model, "explicit equations of a bush or spring bush", "input")
    p.add_argument("--roots", nargs="+", help="rationals assigned to branches (default 0,1,...)")
    p.add_argument("--spring", action="store_true", help="treat the tree as a spring bush")
    add("configdim", cmd_configdim, "dimension of the configuration space", "divisor")
    add("orbiteq", cmd_orbiteq, "decide orbit equivalence of configurations", "divisor", "s1", "s2")
    add("slice", cmd_slice, "barycentric slice of a configuration", "divisor", "s")
    add("stab", cmd_stab, "order of the scaling stabilizer", "divisor", "s")
    add("modulidim", cmd_modulidim, "moduli dimension and automorphism divisors", "divisor")
    add("centers", cmd_centers, "modification centers of a configuration", "divisor", "s")
    return ap


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        res = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (TreeError, StructureError, cfg.ConfigError, EnumerationLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if args.format == "json":
        _emit(json.dumps(res.data, indent=2, sort_keys=False), args.output)
    else:
        _emit(res.text, args.output)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
