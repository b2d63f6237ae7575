"""Command-line front end.

Exit codes: 0 = SAT / true / found, 1 = UNSAT / false / not found,
2 = UNKNOWN, 64 = usage error, 65 = parse or input error, 70 = internal.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import sys

from . import blocktree, checker, model, oracle, solver, translate
from .formula import FragmentError, ParseError, fragment_of, parse, print_formula
from .satellites import FOParseError, fo_to_text, parse_fo, pdl_to_text

EX_USAGE = 64
EX_DATA = 65
EX_INTERNAL = 70


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser():
    top = _Parser(prog="hylo", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo canonical form and fragment label")
    p.add_argument("--formula", required=True)

    p = sub.add_parser("check", help="evaluate a formula on a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--assign", action="append", default=[], metavar="$x=STATE")

    p = sub.add_parser("sat", help="satisfiability over transitive or complete frames")
    p.add_argument("--frame", choices=["trans", "complete"], required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--max-clique", type=int, default=4)
    p.add_argument("--max-nodes", type=int, default=8)
    p.add_argument("--max-c", type=int, default=4)
    p.add_argument(
        "--exhaustive",
        action="store_true",
        help="raise budgets to the conservative completeness bounds",
    )
    p.add_argument("--witness", default="witness.json")

    p = sub.add_parser("oracle", help="brute-force model search")
    p.add_argument(
        "--frame",
        choices=["any", "trans", "transitive", "complete", "transitive-tree", "linear"],
        required=True,
    )
    p.add_argument("--max-states", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula")
    group.add_argument("--fo")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("translate", help="apply a translation rule")
    p.add_argument("--rule", required=True, choices=sorted(_RULES))
    p.add_argument("--formula")
    p.add_argument("--fo")
    p.add_argument("--sigma", help="comma-separated alphabet for the string rule")
    p.add_argument("--lfp", action="store_true", help="print closure atoms in fixed-point form")

    p = sub.add_parser("realize", help="expand a representation file")
    p.add_argument("--rep", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out")

    return top


def _parse_assignments(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"bad assignment {item!r}, expected $x=STATE")
        var, state = item.split("=", 1)
        out[var.lstrip("$")] = state
    return out


def _cmd_parse(args):
    f = parse(args.formula)
    print(print_formula(f))
    print(f"fragment: {fragment_of(f)}")
    return 0


def _cmd_check(args):
    m = model.load_model(args.model)
    f = parse(args.formula)
    g = _parse_assignments(args.assign)
    value = checker.eval_formula(m, g, args.state, f)
    print("true" if value else "false")
    return 0 if value else 1


def _cmd_sat(args):
    phi = parse(args.formula)
    if args.exhaustive:
        nodes, clique, c = solver.bounds_for(phi)
        budget = solver.Budget(
            max(args.max_clique, clique), max(args.max_nodes, nodes), max(args.max_c, c)
        )
    else:
        budget = solver.Budget(args.max_clique, args.max_nodes, args.max_c)
    run = solver.sat_transitive if args.frame == "trans" else solver.sat_complete
    result = run(phi, budget)
    if result.nominal_warning:
        print(
            "WARN: nominals handled as propositional atoms; SAT answers may "
            "identify states the representation keeps apart",
            file=sys.stderr,
        )
    if result.status == "sat":
        blocktree.save_rep(result.witness_rep, args.witness)
        guess = {
            c: sorted(print_formula(chi) for chi in t)
            for c, t in result.witness_guess.items()
        }
        print(f"SAT (witness written to {args.witness})")
        print(json.dumps({"guess": guess}))
        return 0
    print(result.status.upper())
    if result.note:
        print(result.note)
    return 1 if result.status == "unsat" else 2


def _oracle_frame(name):
    return "transitive" if name == "trans" else name


def _oracle_worker(payload):
    text, frame, k = payload
    phi = parse(text, allow_reserved=True)
    hit = _lane_search_exact(phi, frame, k)
    return None if hit is None else (model.model_to_dict(hit[0]), hit[1])


def _lane_search_exact(phi, frame, k):
    from itertools import product

    import numpy as np

    from .formula import noms_of, props_of
    from .oracle import _closure_batch, _decode_hit, _frame_batches, _LaneEngine, _needs_closure

    props, noms = props_of(phi), noms_of(phi)
    engine = _LaneEngine([phi], props, noms, k)
    placements = list(product(range(k), repeat=len(noms)))
    needs_plus = _needs_closure(phi)
    for batch in _frame_batches(frame, k):
        plus = _closure_batch(batch) if needs_plus else None
        engine.set_batch(batch, plus)
        words = []
        hit = np.zeros(batch.shape[0], dtype=bool)
        for placement in placements:
            engine.set_placement(dict(zip(noms, placement)))
            w = engine.ev(phi)
            words.append((placement, w))
            nz = w.any(axis=(1, 2)) if w.shape[0] > 1 else np.repeat(w.any(), batch.shape[0])
            hit |= nz
        if hit.any():
            b = int(np.argmax(hit))
            return _decode_hit(engine, words, b, batch[b], props, noms, k)
    return None


def _cmd_oracle(args):
    frame = _oracle_frame(args.frame)
    if args.fo is not None:
        alpha = parse_fo(args.fo)
        found = oracle.brute_fo_sat(alpha, frame, args.max_states)
        if found is None:
            print(f"not found within bound {args.max_states}")
            return 1
        doc = {
            "domain": list(found.structure.domain),
            "rel": sorted([a, b] for a, b in found.structure.binrel),
            "unary": {p: sorted(v) for p, v in sorted(found.structure.unary.items())},
            "constants": dict(sorted(found.structure.constants.items())),
        }
        print(json.dumps(doc))
        return 0
    phi = parse(args.formula)
    if args.jobs > 1:
        found = _parallel_oracle(phi, frame, args.max_states, args.jobs)
    else:
        found = oracle.brute_sat(phi, frame, args.max_states)
        found = None if found is None else (model.model_to_dict(found.model), found.state)
    if found is None:
        print(f"not found within bound {args.max_states}")
        return 1
    doc, state = found
    print(json.dumps({"model": doc, "state": state}))
    return 0


def _parallel_oracle(phi, frame, max_states, jobs):
    """Size slices fan out to workers; the smallest-size hit wins, so the
    answer matches the serial canonical order regardless of job count."""
    text = print_formula(phi)
    payloads = [(text, frame, k) for k in range(1, max_states + 1)]
    with multiprocessing.Pool(processes=jobs) as pool:
        results = pool.map(_oracle_worker, payloads)
    for res in results:
        if res is not None:
            return res
    return None


_RULES = {
    "until-down",
    "until-down-tense",
    "ml-until",
    "globsat",
    "u-upp",
    "upp-u",
    "st",
    "ht",
    "complete",
    "zigzag",
    "spy-at",
    "spy-fp",
    "tt-nat-tense",
    "tt-nat-at",
    "at-elim-linear",
    "string",
    "e-at",
    "pdl",
    "pdl-flat",
}

_FORMULA_RULES = {
    "until-down",
    "until-down-tense",
    "ml-until",
    "globsat",
    "u-upp",
    "upp-u",
    "st",
    "tt-nat-tense",
    "tt-nat-at",
    "at-elim-linear",
    "e-at",
    "pdl",
    "pdl-flat",
}


def _cmd_translate(args):
    rule = args.rule
    if rule in _FORMULA_RULES:
        if args.formula is None:
            raise ValueError(f"rule {rule} needs --formula")
        phi = parse(args.formula)
    else:
        if args.fo is None:
            raise ValueError(f"rule {rule} needs --fo")
        alpha = parse_fo(args.fo)
    if rule in ("until-down", "until-down-tense"):
        from .formula import Until

        if not isinstance(phi, Until):
            raise ValueError(f"rule {rule} expects a formula of the form U(f, g)")
        fn = translate.until_via_down if rule == "until-down" else translate.until_via_down_tense
        print(print_formula(fn(phi.left, phi.right)))
    elif rule == "ml-until":
        print(print_formula(translate.ml_to_until(phi)))
    elif rule == "globsat":
        print(print_formula(translate.globsat_reduction(phi)))
    elif rule == "u-upp":
        print(print_formula(translate.u_to_upp(phi)))
    elif rule == "upp-u":
        print(print_formula(translate.upp_to_u(phi)))
    elif rule == "st":
        print(fo_to_text(translate.standard_translation(phi), rplus_as_lfp=args.lfp))
    elif rule == "ht":
        print(print_formula(translate.ht(alpha)))
    elif rule == "complete":
        print(print_formula(translate.complete_reduction(alpha)))
    elif rule == "zigzag":
        print(fo_to_text(translate.zigzag(alpha)))
    elif rule == "spy-at":
        print(print_formula(translate.spy_at(alpha)))
    elif rule == "spy-fp":
        print(print_formula(translate.spy_fp(alpha)))
    elif rule == "tt-nat-tense":
        print(print_formula(translate.tt_to_nat_tense(phi)))
    elif rule == "tt-nat-at":
        print(print_formula(translate.tt_to_nat_at(phi)))
    elif rule == "at-elim-linear":
        print(print_formula(translate.at_elim_linear(phi)))
    elif rule == "string":
        if not args.sigma:
            raise ValueError("rule string needs --sigma")
        sigma = [s.strip() for s in args.sigma.split(",") if s.strip()]
        print(print_formula(translate.string_reduction(alpha, sigma)))
    elif rule == "e-at":
        print(print_formula(translate.exists_to_at(phi)))
    elif rule in ("pdl", "pdl-flat"):
        fn = translate.pdl_reduction if rule == "pdl" else translate.pdl_reduction_flat
        print(pdl_to_text(fn(phi)))
    return 0


def _cmd_realize(args):
    rep = blocktree.load_rep(args.rep)
    m = blocktree.realize(rep, args.depth)
    doc = model.model_to_dict(m)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        print(f"model written to {args.out}")
    else:
        print(json.dumps(doc))
    return 0


_COMMANDS = {
    "parse": _cmd_parse,
    "check": _cmd_check,
    "sat": _cmd_sat,
    "oracle": _cmd_oracle,
    "translate": _cmd_translate,
    "realize": _cmd_realize,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, FOParseError, FragmentError) as exc:
        print(f"hylo: {exc}", file=sys.stderr)
        return EX_DATA
    except (ValueError, OSError) as exc:
        print(f"hylo: {exc}", file=sys.stderr)
        return EX_DATA


if __name__ == "__main__":
    sys.exit(main())
