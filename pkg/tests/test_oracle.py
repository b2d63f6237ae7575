from itertools import product

import pytest

from hylo.checker import eval_formula, global_eval
from hylo.formula import nom, parse, prop
from hylo.model import (
    is_complete,
    is_linear,
    is_transitive,
    is_transitive_tree,
)
from hylo.oracle import (
    brute_fo_sat,
    brute_global_sat,
    brute_sat,
    enumerate_models,
    find_eval_difference,
    frames,
)
from hylo.satellites import FOStructure, fo_eval, parse_fo

CHAIN = parse("p & <>p & []<>p & [] down $x . ~<> $x")

# number of transitive relations on k labeled states
TRANSITIVE_COUNTS = {1: 2, 2: 13, 3: 171, 4: 3994}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_transitive_frame_counts(k):
    assert sum(1 for _ in frames("transitive", k)) == TRANSITIVE_COUNTS[k]


def test_transitive_frames_match_filtered_any():
    for k in (1, 2, 3):
        via_decomposition = set(frames("transitive", k))
        names = [f"s{i}" for i in range(k)]
        via_filter = set()
        for rel in frames("any", k):
            pairs = set(rel)
            if all(
                (a, d) in pairs for a, b in pairs for c, d in pairs if b == c
            ):
                via_filter.add(rel)
        assert via_decomposition == via_filter


def test_frame_class_predicates_hold():
    from hylo.model import HybridModel

    for frame, pred in [
        ("transitive", is_transitive),
        ("complete", is_complete),
        ("linear", is_linear),
        ("transitive-tree", is_transitive_tree),
    ]:
        for k in (1, 2, 3):
            for rel in frames(frame, k):
                m = HybridModel(tuple(f"s{i}" for i in range(k)), rel)
                assert pred(m), (frame, k, sorted(rel))


def test_linear_frame_counts():
    assert sum(1 for _ in frames("linear", 1)) == 1
    assert sum(1 for _ in frames("linear", 2)) == 2
    assert sum(1 for _ in frames("linear", 3)) == 6


def test_enumerate_models_spec_examples():
    # linear, n=2, no atoms: the 1-chain and the two labelings of the 2-chain
    models = list(enumerate_models("linear", 2))
    assert len(models) == 3
    shapes = {len(m.states) for m in models}
    assert shapes == {1, 2}
    # complete, n=1: single reflexive state
    models = list(enumerate_models("complete", 1))
    assert len(models) == 1
    assert models[0].rel == {("s0", "s0")}
    # transitive-tree, n=2: root alone; root with one child (two labelings)
    models = list(enumerate_models("transitive-tree", 2))
    assert len(models) == 3


def test_enumerate_models_valuations_and_nominals():
    models = list(enumerate_models("complete", 1, atoms=[prop("p"), nom("i")]))
    assert len(models) == 2  # two p-valuations, one nominal placement
    assert models[0].nomval == {"i": "s0"}
    two = list(enumerate_models("complete", 2, atoms=[nom("i")]))
    placements = [m.nomval["i"] for m in two if len(m.states) == 2]
    assert placements == ["s0", "s1"]


def test_brute_sat_spec_examples():
    found = brute_sat(parse("down $x . <> $x"), "transitive", 1)
    assert found is not None
    assert found.model.rel == {("s0", "s0")}
    assert brute_sat(parse("p & ~p"), "any", 3) is None
    assert brute_sat(CHAIN, "transitive", 4) is None


def test_brute_sat_monotone_in_n():
    for text in ["<>p", "p & <>~p", "U(p, q)"]:
        phi = parse(text)
        hit2 = brute_sat(phi, "any", 2)
        hit3 = brute_sat(phi, "any", 3)
        assert (hit2 is None) or (hit3 is not None)


def test_brute_sat_rejects_open_formulas():
    with pytest.raises(ValueError):
        brute_sat(parse("<> $x"), "any", 2)


def _naive_brute_sat(phi, frame, n, atoms):
    for m in enumerate_models(frame, n, atoms=atoms):
        for s in m.states:
            if eval_formula(m, {}, s, phi):
                return m, s
    return None


LANE_BATTERY = [
    "p",
    "~p & q",
    "p | ~q",
    "p -> q",
    "p <-> <>q",
    "<>p",
    "[]p",
    "F p & G q",
    "P p",
    "H ~p",
    "E p & A (p | q)",
    "@'i p",
    "'i & <>'i",
    "down $x . <> $x",
    "down $x . []<> $x",
    "down $x . <>(q & <> $x)",
    "U(p, q)",
    "S(p, q)",
    "U+(p, q)",
    "S+(p, q)",
    "U++(p, q)",
    "S++(p, q)",
    "U(p, q) & S(q, p)",
    "down $x . @$x <>p",
    "true & ~false",
]


@pytest.mark.parametrize("frame", ["any", "transitive", "linear", "transitive-tree", "complete"])
def test_lane_engine_agrees_with_checker(frame):
    n = 2 if frame == "any" else 3
    for text in LANE_BATTERY:
        phi = parse(text)
        atoms = [prop(p) for p in ["p", "q"] if p in text] + (
            [nom("i")] if "'i" in text else []
        )
        fast = brute_sat(phi, frame, n)
        slow = _naive_brute_sat(phi, frame, n, atoms)
        if slow is None:
            assert fast is None, text
        else:
            assert fast is not None, text
            assert (fast.model, fast.state) == slow, text


def test_lane_engine_exhaustive_pointwise_agreement():
    # every model with <= 2 states over {p, q}: lane words equal the checker
    # at every state, checked through find_eval_difference against a
    # deliberately different second formula and a tautology pair
    for text in LANE_BATTERY:
        phi = parse(text)
        diff = find_eval_difference(phi, phi, "any", 2)
        assert diff is None, text


def test_find_eval_difference_reports_first():
    # <>p and p differ; first difference in enumeration order has 1 state
    got = find_eval_difference(parse("<>p"), parse("p"), "any", 2)
    assert got is not None
    model, state = got
    assert len(model.states) == 1
    # box-diamond duality never differs
    assert find_eval_difference(parse("[]p"), parse("~<>~p"), "any", 2) is None


def test_brute_global_sat_matches_naive():
    for text in ["p", "<>p -> p", "~<>p", "p & []p"]:
        phi = parse(text)
        fast = brute_global_sat(phi, "any", 2)
        slow = None
        for m in enumerate_models("any", 2, atoms=[prop("p")]):
            if global_eval(m, phi):
                slow = m
                break
        assert fast == slow, text


def test_brute_fo_sat_spec_examples():
    assert brute_fo_sat(parse_fo("E x. E y. R(x,y)"), "any", 2) is not None
    assert brute_fo_sat(parse_fo("(A x. ~R(x,x)) & (E x. R(x,x))"), "any", 3) is None
    two_elems = parse_fo("E x. E y. ~x=y")
    assert brute_fo_sat(two_elems, "any", 1) is None
    found = brute_fo_sat(two_elems, "any", 2)
    assert found is not None
    assert len(found.structure.domain) == 2


def _naive_fo_sat(alpha, frame, n, preds):
    from hylo.model import HybridModel

    for k in range(1, n + 1):
        for rel in frames(frame, k):
            rel_pairs = {(int(a[1:]), int(b[1:])) for a, b in rel}
            domain = tuple(range(k))
            for bits in range(1 << (len(preds) * k)):
                unary = {
                    p: frozenset(
                        e for e in domain if (bits >> (i * k + e)) & 1
                    )
                    for i, p in enumerate(preds)
                }
                s = FOStructure(domain, rel_pairs, unary)
                if fo_eval(s, {}, alpha):
                    return True
    return False


FO_BATTERY = [
    "E x. R(x,x)",
    "A x. ~R(x,x)",
    "E x. E y. (R(x,y) & ~R(y,x))",
    "(A x. E y. R(x,y)) & (A x. ~R(x,x))",
    "E x. (p(x) & A y. (R(x,y) -> ~p(y)))",
    "(E x. p(x)) & (A x. ~p(x))",
    "A x. A y. (R(x,y) -> E z. (R(x,z) & R(z,y)))",
    "E x. E y. (~x=y)",
    "E x. (p(x) & ~q(x))",
]


@pytest.mark.parametrize("frame", ["any", "transitive"])
def test_brute_fo_sat_agrees_with_naive(frame):
    for text in FO_BATTERY:
        alpha = parse_fo(text)
        preds = sorted({g.name for g in _fo_preds(alpha)})
        fast = brute_fo_sat(alpha, frame, 2) is not None
        slow = _naive_fo_sat(alpha, frame, 2, preds)
        assert fast == slow, (frame, text)


def _fo_preds(alpha):
    from hylo.satellites import Pred, fo_subformulas

    return [g for g in fo_subformulas(alpha) if isinstance(g, Pred)]


def test_brute_fo_sat_respects_frames():
    serial_irrefl = parse_fo("(A x. E y. R(x,y)) & (A x. ~R(x,x))")
    assert brute_fo_sat(serial_irrefl, "any", 2) is not None
    # over transitive frames an irreflexive serial relation needs an infinite
    # descending structure, so no small model exists
    assert brute_fo_sat(serial_irrefl, "transitive", 4) is None


def test_brute_fo_sat_with_constants():
    alpha = parse_fo("p(c) & E x. ~x=c")
    found = brute_fo_sat(alpha, "any", 3)
    assert found is not None
    s = found.structure
    assert s.constants["c"] in s.unary["p"]
    assert len(s.domain) == 2
