import json

import pytest

from hylo.model import (
    HybridModel,
    cliques,
    generated_submodel,
    is_complete,
    is_linear,
    is_transitive,
    is_transitive_tree,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    transitive_closure,
)


def M(states, rel, val=None, nom=None):
    return HybridModel(tuple(states), frozenset(rel), val or {}, nom or {})


def test_single_state_predicates():
    m = M(["a"], [])
    assert is_transitive(m)
    assert not is_complete(m)
    assert is_linear(m)
    assert is_transitive_tree(m)


def test_complete_two_clique():
    m = M(["a", "b"], [("a", "b"), ("b", "a"), ("a", "a"), ("b", "b")])
    assert is_complete(m)
    assert is_transitive(m)
    assert not is_linear(m)
    assert not is_transitive_tree(m)


def test_chain_missing_edge_not_transitive():
    m = M(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert not is_transitive(m)
    closed = transitive_closure(m)
    assert ("a", "c") in closed.rel
    assert is_transitive(closed)
    assert transitive_closure(closed) == closed


def test_two_cycle_closure_adds_loops():
    m = M(["a", "b"], [("a", "b"), ("b", "a")])
    closed = transitive_closure(m)
    assert ("a", "a") in closed.rel and ("b", "b") in closed.rel


def test_invariant_validation():
    with pytest.raises(ValueError):
        M(["a"], [("a", "b")])
    with pytest.raises(ValueError):
        M(["a"], [], val={"p": {"zz"}})
    with pytest.raises(ValueError):
        M(["a"], [], nom={"i": "zz"})
    with pytest.raises(ValueError):
        M(["a", "a"], [])


def test_transitive_tree_examples():
    root_child = M(["r", "c"], [("r", "c")])
    assert is_transitive_tree(root_child)
    chain = M(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert is_transitive_tree(chain)
    assert is_linear(chain)
    forest = M(["a", "b"], [])
    assert not is_transitive_tree(forest)  # not connected
    dag = M(["a", "b", "c"], [("a", "c"), ("b", "c")])
    assert not is_transitive_tree(dag)  # two predecessors


def test_generated_submodel():
    m = M(
        ["a", "b", "c"],
        [("a", "b"), ("b", "c"), ("a", "c")],
        val={"p": {"a", "c"}},
        nom={"i": "a", "j": "c"},
    )
    g = generated_submodel(m, "b")
    assert g.states == ("b", "c")
    assert g.val["p"] == {"c"}
    assert g.nomval == {"j": "c"}
    iso = M(["a", "b"], [])
    assert generated_submodel(iso, "a").states == ("a",)
    comp = M(["a", "b"], [("a", "b"), ("b", "a"), ("a", "a"), ("b", "b")])
    assert generated_submodel(comp, "a") == comp
    with pytest.raises(ValueError):
        generated_submodel(m, "zz")


def test_generated_submodel_satisfies_invariants():
    m = M(["a", "b", "c"], [("a", "b")])
    g = generated_submodel(m, "a")
    assert g.states == ("a", "b")


def test_cliques():
    m = M(
        ["a", "b", "c"],
        [("a", "b"), ("b", "a"), ("a", "a"), ("b", "b"), ("a", "c"), ("b", "c")],
    )
    parts, edges = cliques(m)
    assert parts == [["a", "b"], ["c"]]
    assert edges == {(0, 1)}

    chain = M(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    parts, edges = cliques(chain)
    assert parts == [["a"], ["b"], ["c"]]
    assert edges == {(0, 1), (1, 2), (0, 2)}

    full = M(
        ["a", "b", "c"],
        [(s, t) for s in "abc" for t in "abc"],
    )
    parts, edges = cliques(full)
    assert parts == [["a", "b", "c"]]
    assert edges == frozenset()

    with pytest.raises(ValueError):
        cliques(M(["a", "b", "c"], [("a", "b"), ("b", "c")]))


def test_clique_condensation_acyclic():
    m = M(
        ["a", "b", "c", "d"],
        [
            ("a", "b"), ("b", "a"), ("a", "a"), ("b", "b"),
            ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d"), ("c", "d"),
        ],
    )
    parts, edges = cliques(m)
    assert (0, 1) in edges and (1, 0) not in edges
    for i, j in edges:
        assert (j, i) not in edges


def test_reflexive_singleton_is_clique():
    m = M(["a", "b"], [("a", "a"), ("a", "b")])
    parts, edges = cliques(m)
    assert parts == [["a"], ["b"]]
    assert edges == {(0, 1)}


def test_file_format_roundtrip(tmp_path):
    m = M(
        ["a", "b"],
        [("a", "b")],
        val={"p": {"a"}},
        nom={"i": "b"},
    )
    path = tmp_path / "m.json"
    save_model(m, path)
    assert load_model(path) == m


def test_file_format_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"states": ["a"], "bogus": 1}))
    with pytest.raises(ValueError, match="unknown keys"):
        load_model(path)
    with pytest.raises(ValueError, match="states"):
        model_from_dict({"rel": []})


def test_model_to_dict_is_sorted_and_loadable():
    m = M(["b", "a"], [("b", "a")], val={"p": {"b"}})
    doc = model_to_dict(m)
    assert doc["states"] == ["b", "a"]
    assert model_from_dict(doc) == m
