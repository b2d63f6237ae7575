"""Cross-module invariant sweeps pinned by the module contracts."""

from hylo.checker import phi_type
from hylo.formula import parse, prop
from hylo.model import HybridModel, cliques, is_transitive, transitive_closure
from hylo.oracle import brute_sat, find_eval_difference, frames
from hylo.satellites import parse_fo
from hylo.solver import Budget, bounds_for, sat_complete, sat_transitive
from hylo.translate import complete_reduction, ht


def test_derived_operator_coherence():
    pairs = [
        ("[]p", "~<>~p"),
        ("G p", "~F ~p"),
        ("H p", "~P ~p"),
        ("A p", "~E ~p"),
        ("p -> q", "~p | q"),
        ("p | q", "~(~p & ~q)"),
        ("p <-> q", "(p -> q) & (q -> p)"),
    ]
    for left, right in pairs:
        assert find_eval_difference(parse(left), parse(right), "any", 4) is None, left


def test_until_expresses_future():
    assert find_eval_difference(parse("F p"), parse("U(p, true)"), "any", 4) is None
    assert find_eval_difference(parse("<>p"), parse("U(p, true)"), "any", 4) is None


def test_at_via_somewhere():
    assert (
        find_eval_difference(parse("@'i p"), parse("E('i & p)"), "any", 3) is None
    )


def test_until_variants_collapse_on_transitive():
    for variant in ["U+(p, q)", "U++(p, q)"]:
        assert (
            find_eval_difference(parse("U(p, q)"), parse(variant), "transitive", 4)
            is None
        ), variant
    for variant in ["S+(p, q)", "S++(p, q)"]:
        assert (
            find_eval_difference(parse("S(p, q)"), parse(variant), "transitive", 4)
            is None
        ), variant


def test_clique_type_invariance_transitive_models():
    phi = parse("<>p & <><>p")
    for k in range(1, 5):
        names = tuple(f"s{i}" for i in range(k))
        # one deterministic valuation per frame keeps the sweep affordable
        val = {"p": frozenset(n for i, n in enumerate(names) if i % 2 == 0)}
        for rel in frames("transitive", k):
            m = HybridModel(names, rel, val)
            parts, _ = cliques(m)
            for part in parts:
                types = {phi_type(m, phi, s) for s in part}
                assert len(types) == 1, (sorted(rel), part)


def test_transitive_closure_minimality():
    # the closure is contained in every transitive relation extending rel
    for k in (2, 3):
        names = tuple(f"s{i}" for i in range(k))
        transitive_supersets = list(frames("transitive", k))
        for rel in frames("any", k):
            closed = transitive_closure(HybridModel(names, rel)).rel
            assert is_transitive(HybridModel(names, closed))
            for sup in transitive_supersets:
                if rel <= sup:
                    assert closed <= sup, (sorted(rel), sorted(sup))


MC_CORPUS = [
    "E x. p(x)",
    "A x. (p(x) -> q(x))",
    "E x. E y. ~x=y",
    "(E x. p(x)) & (A x. ~p(x))",
    "E x. (p(x) & A y. (p(y) -> x=y))",
]


def test_complete_frame_paths_agree():
    # verdict agreement only; the budget covers the witnesses of the
    # satisfiable members (single complete clique), and bounded failure on
    # the others lands on the not-sat side of both paths
    budget = Budget(max_clique=3, max_nodes=1, max_c=0)
    for text in MC_CORPUS:
        alpha = parse_fo(text)
        via_complete = sat_complete(ht(alpha), budget).is_sat
        via_transitive = sat_transitive(complete_reduction(alpha), budget).is_sat
        assert via_complete == via_transitive, text


def test_brute_sat_decides_complete_fragment():
    corpus = ["down $x . <> $x", "p & ~p", "(down $x . ~<> $x) & <>true", "p & []p"]
    for text in corpus:
        phi = parse(text)
        _, clique_bound, _ = bounds_for(phi)
        direct = brute_sat(phi, "complete", max(clique_bound, 1)) is not None
        via_solver = sat_complete(phi, Budget(max_clique=max(clique_bound, 1))).is_sat
        assert direct == via_solver, text


def test_solver_bounds_are_exhaustive_for_complete(capsys):
    result = sat_complete(parse("(down $x . ~<> $x) & <>true"), Budget(max_clique=4))
    assert result.status == "unsat" and result.exhaustive
