"""Command line interface: JSON lines in, JSON lines (or CSV) out.

Exit codes: 0 success, 2 verification failure, 1 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .cohomology import GradedClass, build_basis, edge_quads, multiply, multiply_generator, monomial_class, all_standard_relations
from .formal import (
    ProjectionError,
    VectorField,
    a_from_b,
    assoc_check,
    b_from_a,
    build_B,
    check_comm,
    check_maximality,
    extract_lalgebra,
    formal_projection,
    glue,
    has_flat_identity,
    random_lalgebra,
)
from .homology import pairing
from .lalgebra import LAlgebra, evaluate_tree_correlator, tensor, verify
from .series import Series
from .trees import PaintedSet, enumerate_stable_partitions, enumerate_trees, family_from_json, parse_label, tree_cache

MAX_LABELS = 8
MAX_ORDER = 8
EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Output:
    def __init__(self, path):
        self.lines = []
        self.path = path

    def record(self, obj):
        self.lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))

    def raw(self, text):
        self.lines.append(text.rstrip("\n"))

    def flush(self):
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path and self.path != "-":
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _threads():
    raw = os.environ.get("PAINTED_OPERAD_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("PAINTED_OPERAD_THREADS must be a positive integer") from None
    if n < 1:
        raise UsageError("PAINTED_OPERAD_THREADS must be a positive integer")
    return n


def _load(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON input: {exc}") from None


def _ground(args):
    if args.whites is None:
        raise UsageError("--whites is required")
    blacks = args.blacks or 0
    if args.whites < 0 or blacks < 0:
        raise UsageError("label counts must be nonnegative")
    if args.whites + blacks > MAX_LABELS and not args.override_caps:
        raise UsageError(f"|S| = {args.whites + blacks} exceeds the cap {MAX_LABELS}; pass --override-caps")
    return PaintedSet.standard(args.whites, blacks)


def _ring_ground(args):
    S = _ground(args)
    try:
        S.check_ring_ground()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return S


def _check_order(order, args):
    if order > MAX_ORDER and not args.override_caps:
        raise UsageError(f"order {order} exceeds the cap {MAX_ORDER}; pass --override-caps")


def _series(data, args):
    s = Series.from_json(data)
    _check_order(s.order, args)
    return s


def _lalg(data, args):
    L = LAlgebra.from_json(data)
    _check_order(L.order, args)
    return L


def _class(S, data):
    if "monomial" in data:
        masks = [S.mask(parse_label(x) for x in p["part"]) for p in data["monomial"]]
        return monomial_class(masks, build_basis(S))
    return GradedClass.from_json(S, data)


# --- ring commands --------------------------------------------------------------------


def cmd_trees(args, out):
    S = _ground(args)
    trees = enumerate_trees(S, args.edges)
    if args.count:
        out.raw(str(len(trees)))
        return EXIT_OK
    counts = {}
    for g in trees:
        out.record({"edges": len(g), "tree": g.to_json()})
        counts[len(g)] = counts.get(len(g), 0) + 1
    out.record({"summary": "trees", "total": len(trees), "by_edges": [counts.get(k, 0) for k in range(max(counts, default=-1) + 1)]})
    return EXIT_OK


def cmd_partitions(args, out):
    S = _ground(args)
    parts = enumerate_stable_partitions(S)
    if args.count:
        out.raw(str(len(parts)))
        return EXIT_OK
    for p in parts:
        out.record(p.to_json())
    out.record({"summary": "partitions", "total": len(parts)})
    return EXIT_OK


def cmd_betti(args, out):
    S = _ring_ground(args)
    out.record({"dims": build_basis(S).dims})
    return EXIT_OK


def cmd_normalform(args, out):
    S = _ring_ground(args)
    basis = build_basis(S)
    x = _class(S, _load(args.input))
    out.record(basis.normal_form(x).to_json())
    return EXIT_OK


def cmd_multiply(args, out):
    S = _ring_ground(args)
    basis = build_basis(S)
    data = _load(args.input)
    if "x" not in data or "y" not in data:
        raise UsageError("multiply expects an object with keys x and y")
    out.record(multiply(_class(S, data["x"]), _class(S, data["y"]), basis).to_json())
    return EXIT_OK


def cmd_relations(args, out):
    S = _ring_ground(args)
    if args.degree is None or args.degree < 1:
        raise UsageError("--degree >= 1 is required")
    rels = all_standard_relations(S, args.degree, enumerate_trees(S, args.degree - 1))
    for rel in rels:
        terms = sorted(rel.items(), key=lambda kv: kv[0].masks)
        out.record({"degree": args.degree, "terms": [{"tree": g.to_json(), "coeff": str(c)} for g, c in terms]})
    out.record({"summary": "relations", "degree": args.degree, "count": len(rels)})
    return EXIT_OK


def cmd_pairing(args, out):
    S = _ring_ground(args)
    basis = build_basis(S)
    if args.degree is None or not 0 <= args.degree <= basis.top:
        raise UsageError(f"--degree must lie in 0..{basis.top}")
    pm = pairing(basis, args.degree)
    out.raw(pm.to_csv())
    if not pm.nondegenerate:
        print(f"pairing in degree {args.degree} is degenerate", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args, out):
    """Seeded choice-independence sweep over random (tree, edge) pairs."""
    S = _ring_ground(args)
    basis = build_basis(S)
    rng = random.Random(args.seed)
    pool = [g for d in range(1, basis.top + 1) for g in basis.trees[d]]
    if not pool:
        out.record({"summary": "sweep", "cases": 0, "failures": 0, "seed": args.seed})
        return EXIT_OK
    count = args.count_n if args.count_n is not None else 100
    failures = 0
    for case in range(count):
        g = rng.choice(pool)
        m = rng.choice(g.masks)
        quads = edge_quads(tree_cache(g), m)
        q1, q2 = rng.choice(quads), rng.choice(quads)
        a = basis.normal_form(multiply_generator(m, g, q1))
        b = basis.normal_form(multiply_generator(m, g, q2))
        if a != b:
            failures += 1
            out.record({"case": case, "tree": g.to_json(), "status": "fail"})
    out.record({"summary": "sweep", "cases": count, "failures": failures, "seed": args.seed})
    return EXIT_FAIL if failures else EXIT_OK


# --- L-algebra and formal geometry commands ------------------------------------------------


def cmd_gen_lalg(args, out):
    order = args.order or 3
    _check_order(order, args)
    if args.dim_f < 1 or args.dim_t < 0:
        raise UsageError("need --dimF >= 1 and --dimT >= 0")
    L = random_lalgebra(random.Random(args.seed), args.dim_t, args.dim_f, order)
    out.record(L.to_json())
    return EXIT_OK


def cmd_lalg_verify(args, out):
    L = _lalg(_load(args.input), args)
    rep = verify(L)
    for rec in rep.records(L.dimT):
        out.record(rec)
    out.record({"summary": "lalg-verify", "status": "pass" if rep.ok else "fail", "verified_order": rep.verified_order, "violations": len(rep.violations), "slot_symmetric": not rep.slot_violations})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_lalg_eval(args, out):
    data = _load(args.input)
    L = _lalg(data["lalgebra"], args)
    S = PaintedSet.standard(int(data.get("whites", args.whites or 0)), int(data.get("blacks", args.blacks or 0)))
    S.check_ring_ground()
    g = family_from_json(S, data.get("tree", []))
    vec = evaluate_tree_correlator(L, g, data.get("root", "w1"), data["inputs"], data.get("slot"))
    out.record({"output": [str(x) for x in vec]})
    return EXIT_OK


def _comm_report(rep, out):
    out.record(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_comm_check(args, out):
    return _comm_report(check_comm(_series(_load(args.input), args)), out)


def cmd_comm_fromlalg(args, out):
    out.record(build_B(_lalg(_load(args.input), args)).to_json())
    return EXIT_OK


def cmd_assoc_check(args, out):
    A = VectorField.from_json(_load(args.input))
    _check_order(A.order, args)
    rep = assoc_check(A)
    rec = rep.to_json()
    rec["flat_identity"] = has_flat_identity(A, 0)
    out.record(rec)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_assoc_tocomm(args, out):
    A = VectorField.from_json(_load(args.input))
    _check_order(A.order, args)
    out.record(b_from_a(A).to_json())
    return EXIT_OK


def cmd_comm_toassoc(args, out):
    data = _load(args.input)
    Bs = _series(data["B"], args)
    try:
        A = a_from_b(Bs, data["h"])
    except ValueError as exc:
        out.record({"status": "fail", "reason": str(exc)})
        return EXIT_FAIL
    out.record(A.to_json())
    return EXIT_OK


def cmd_extract(args, out):
    Bs = _series(_load(args.input), args)
    out.record(extract_lalgebra(Bs, args.dim_t).to_json())
    return EXIT_OK


def cmd_glue(args, out):
    data = _load(args.input)
    B1 = _series(data["B1"], args)
    if "A2" in data:
        second = VectorField.from_json(data["A2"])
    elif "B2" in data:
        second = _series(data["B2"], args)
    else:
        raise UsageError("glue expects B1 and one of A2 or B2")
    out.record(glue(B1, second, data["h"]).to_json())
    return EXIT_OK


def cmd_project(args, out):
    if not args.base or not args.total:
        raise UsageError("project needs --base and --total")
    base = _series(_load(args.base), args)
    total = _series(_load(args.total), args)
    try:
        P = formal_projection(base, total)
    except ProjectionError as exc:
        out.record({"status": "fail", "reason": str(exc)})
        return EXIT_FAIL
    rec = P.to_json()
    table = {}
    m = len(P.base_vars)
    for k, comps in sorted(P.lam.items(), key=lambda kv: (sum(kv[0]), [-x for x in kv[0]])):
        sub = "".join(str(x) for x in k)
        for i, s in enumerate(comps):
            if s.terms:
                table[f"λ{sub}" if m == 1 else f"λ{i + 1}_{sub}"] = s.to_text()
    rec["table"] = table
    rec["status"] = "pass"
    out.record(rec)
    return EXIT_OK


def cmd_maximality(args, out):
    Bs = _series(_load(args.input), args)
    out.record(check_maximality(Bs, args.order).to_json())
    return EXIT_OK


def cmd_tensor(args, out):
    data = _load(args.input)
    L1, L2 = _lalg(data["L1"], args), _lalg(data["L2"], args)
    out.record(tensor(L1, L2).to_json())
    return EXIT_OK


COMMANDS = {
    "trees": (cmd_trees, "enumerate painted stable trees"),
    "partitions": (cmd_partitions, "enumerate painted stable 2-partitions"),
    "betti": (cmd_betti, "graded dimensions of the cohomology ring"),
    "normalform": (cmd_normalform, "normal form of a class"),
    "multiply": (cmd_multiply, "product of two classes"),
    "relations": (cmd_relations, "standard linear relations in a degree"),
    "pairing": (cmd_pairing, "integration pairing matrix as CSV"),
    "sweep": (cmd_sweep, "seeded choice-independence sweep"),
    "gen-lalg": (cmd_gen_lalg, "random valid L-algebra"),
    "lalg-verify": (cmd_lalg_verify, "check the identities among top correlators"),
    "lalg-eval": (cmd_lalg_eval, "evaluate a tree correlator"),
    "comm-check": (cmd_comm_check, "check the commutativity equations"),
    "comm-fromlalg": (cmd_comm_fromlalg, "generating series B of an L-algebra"),
    "comm-tolalg": (cmd_extract, "L-algebra of a series B"),
    "comm-toassoc": (cmd_comm_toassoc, "vector field integrating B along a primitive vector"),
    "assoc-check": (cmd_assoc_check, "check oriented associativity and the flat identity"),
    "assoc-tocomm": (cmd_assoc_tocomm, "series B of a vector field"),
    "glue": (cmd_glue, "pull back along t -> B1(t) h"),
    "project": (cmd_project, "formal projection between two solutions"),
    "maximality": (cmd_maximality, "truncated maximality test"),
    "tensor": (cmd_tensor, "tensor product of two L-algebras"),
}


def build_parser():
    p = _Parser(prog="painted-operad", description="Exact computations with painted stable trees.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, helptext) in COMMANDS.items():
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--whites", type=int)
        s.add_argument("--blacks", type=int, default=0)
        s.add_argument("--edges", type=int)
        s.add_argument("--degree", type=int)
        s.add_argument("--order", type=int)
        s.add_argument("--in", dest="input", default="-")
        s.add_argument("--out", default="-")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--override-caps", action="store_true")
        s.add_argument("--dimT", dest="dim_t", type=int, default=None if name == "comm-tolalg" else 1)
        s.add_argument("--dimF", dest="dim_f", type=int, default=1)
        if name == "sweep":
            s.add_argument("--count", dest="count_n", type=int)
        else:
            s.add_argument("--count", action="store_true")
        if name == "project":
            s.add_argument("--base")
            s.add_argument("--total")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.out)
    func = COMMANDS[args.command][0]
    try:
        _threads()
        code = func(args, out)
    except UsageError as exc:
        print(f"painted-operad {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError) as exc:
        print(f"painted-operad {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
