"""Command-line front end.

Machine-readable JSON goes to stdout, human summaries and diagnostics go to
stderr.  Exit codes:

  run:      0 = unknown/accept, 1 = reject, 2 = usage or input error
  decide:   0 = solvable, 1 = not solvable, 3 = inconclusive, 2 = error
  oracle:   0 = homomorphism exists, 1 = none, 2 = error
  others:   0 = ok, 2 = error
"""

import argparse
import json
import sys

from . import consistency, fixtures, solvability
from .algebra import (
    AlgebraView,
    FiniteOperation,
    conservative_witness,
    induced_digraph,
    is_majority,
    is_polymorphism,
    is_polymorphism_via_power,
    maximal_scc,
    operation_to_dict,
    parse_operation,
    strongly_connected_components,
    two_semilattice_witness,
)
from .errors import BudgetError, ToolkitError
from .homs import enumerate_homs, find_hom
from .structures import (
    element_label,
    instance_to_dict,
    parse_instance,
    parse_structure,
    structure_to_dict,
)

_METHODS = ("ac", "laac", "pac", "sac")


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def _say(text):
    print(text, file=sys.stderr)


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ToolkitError(f"cannot read {path}: {exc}") from None


def _cmd_run(args):
    inst = parse_instance(_read(args.instance))
    if args.method == "ac":
        outcome = consistency.arc_consistency(inst, trace=args.trace)
    elif args.method == "laac":
        outcome = consistency.laac(inst)
    elif args.method == "pac":
        outcome = consistency.pac(inst, parallel=args.parallel)
    else:
        outcome = consistency.sac(inst, trace=args.trace)
    _emit(outcome.to_json_dict())
    _say(f"{args.method}: {outcome.verdict}")
    return 1 if outcome.verdict == consistency.REJECT else 0


def _cmd_decide(args):
    template = parse_structure(_read(args.template))
    if args.method == "ac":
        verdict = solvability.ac_solves(template)
    elif args.method == "laac":
        verdict = solvability.laac_solves(template)
    elif args.method == "pac":
        verdict = solvability.pac_solves_up_to(template, args.nmax)
    else:
        verdict = solvability.sac_solves_up_to(template, args.nmax)
    _emit(verdict.to_json_dict())
    _say(f"{args.method}: {verdict.outcome}" + (
        f" (level {verdict.level})" if verdict.level else ""
    ))
    return {"solvable": 0, "not_solvable": 1, "inconclusive": 3}[verdict.outcome]


def _cmd_check_op(args):
    op = parse_operation(_read(args.operation))
    report = {
        "arity": op.arity,
        "majority": None,
        "two_semilattice": None,
        "two_semilattice_witness": None,
        "conservative": None,
        "conservative_witness": None,
        "polymorphism": None,
        "maximal_scc": None,
        "sccs": None,
    }
    if op.arity == 3:
        report["majority"] = is_majority(op)
    if op.arity == 2:
        witness = two_semilattice_witness(op)
        report["two_semilattice"] = witness is None
        report["two_semilattice_witness"] = list(witness) if witness else None
        cw = conservative_witness(op)
        report["conservative"] = cw is None
        report["conservative_witness"] = list(cw) if cw else None
        if witness is None:
            view = AlgebraView(frozenset(op.base), (op,))
            report["maximal_scc"] = sorted(maximal_scc(view))
            comps = strongly_connected_components(op.base, induced_digraph(op))
            report["sccs"] = [sorted(c) for c in comps]
    if args.structure:
        structure = parse_structure(_read(args.structure))
        direct = is_polymorphism(structure, op)
        dual = is_polymorphism_via_power(structure, op)
        if direct != dual:
            raise ToolkitError("polymorphism check paths disagree; report this")
        report["polymorphism"] = direct
    _emit(report)
    _say("check-op done")
    return 0


def _cmd_fixtures(args):
    if args.action == "list":
        _emit(
            {
                "structures": list(fixtures.structure_names()),
                "operations": list(fixtures.operation_names()),
            }
        )
        return 0
    if args.action == "dump":
        built = fixtures.build(args.name)
        if isinstance(built, FiniteOperation):
            _emit(operation_to_dict(built))
        else:
            _emit(structure_to_dict(built))
        return 0
    # random
    if args.name in fixtures.structure_names():
        template = fixtures.build(args.name)
    else:
        template = parse_structure(_read(args.name))
    inst, planted = fixtures.random_instance(
        template, args.elements, args.tuples, args.seed, planted=args.planted
    )
    doc = instance_to_dict(inst)
    if planted is not None:
        doc["planted"] = {element_label(a): element_label(b) for a, b in planted.items()}
    _emit(doc)
    _say(f"instance with {args.elements} elements over seed {args.seed}")
    return 0


def _cmd_oracle(args):
    inst = parse_instance(_read(args.instance))
    lhs, rhs, pins = inst.lhs, inst.rhs, inst.pins
    if args.enumerate:
        homs = enumerate_homs(lhs, rhs, pins, budget=args.budget)
        _emit(
            {
                "exists": bool(homs),
                "count": len(homs),
                "homs": [
                    {element_label(a): element_label(b) for a, b in h.items()}
                    for h in homs
                ],
            }
        )
        exists = bool(homs)
    else:
        hom = find_hom(lhs, rhs, pins)
        _emit(
            {
                "exists": hom is not None,
                "witness": None
                if hom is None
                else {element_label(a): element_label(b) for a, b in hom.items()},
            }
        )
        exists = hom is not None
    _say("homomorphism found" if exists else "no homomorphism")
    return 0 if exists else 1


def _parser():
    parser = argparse.ArgumentParser(
        prog="relhom",
        description="consistency algorithms and solvability deciders for finite CSPs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a consistency method on an instance file")
    p_run.add_argument("--method", choices=_METHODS, required=True)
    p_run.add_argument("--trace", action="store_true")
    p_run.add_argument("--parallel", action="store_true")
    p_run.add_argument("instance")
    p_run.set_defaults(fn=_cmd_run)

    p_dec = sub.add_parser("decide", help="decide solvability of a template file")
    p_dec.add_argument("--method", choices=_METHODS, required=True)
    p_dec.add_argument("--nmax", type=int, default=2)
    p_dec.add_argument("template")
    p_dec.set_defaults(fn=_cmd_decide)

    p_op = sub.add_parser("check-op", help="report properties of an operation table")
    p_op.add_argument("--structure", help="structure file for a polymorphism check")
    p_op.add_argument("operation")
    p_op.set_defaults(fn=_cmd_check_op)

    p_fix = sub.add_parser("fixtures", help="list, dump or randomize fixtures")
    fix_sub = p_fix.add_subparsers(dest="action", required=True)
    fix_sub.add_parser("list")
    p_dump = fix_sub.add_parser("dump")
    p_dump.add_argument("name")
    p_rand = fix_sub.add_parser("random")
    p_rand.add_argument("name", help="catalog structure name or template file")
    p_rand.add_argument("--elements", type=int, required=True)
    p_rand.add_argument("--tuples", type=int, required=True)
    p_rand.add_argument("--seed", type=int, default=0)
    p_rand.add_argument("--planted", action="store_true")
    p_fix.set_defaults(fn=_cmd_fixtures)

    p_or = sub.add_parser("oracle", help="search or enumerate homomorphisms")
    p_or.add_argument("--enumerate", action="store_true")
    p_or.add_argument("--budget", type=int, default=10_000_000)
    p_or.add_argument("instance")
    p_or.set_defaults(fn=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except BudgetError as exc:
        _say(f"budget exceeded: {exc}")
        return 2
    except ToolkitError as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
