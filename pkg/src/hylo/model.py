"""Finite hybrid Kripke models, frame predicates, and structural decompositions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class HybridModel:
    """Finite Kripke model with propositions and nominals.

    States keep their declared order so that every enumeration over a model
    is deterministic.  Instances are immutable after construction.
    """

    states: tuple[str, ...]
    rel: frozenset[tuple[str, str]]
    val: dict[str, frozenset[str]] = field(default_factory=dict)
    nomval: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "rel", frozenset(tuple(e) for e in self.rel))
        object.__setattr__(
            self, "val", {p: frozenset(ss) for p, ss in self.val.items()}
        )
        object.__setattr__(self, "nomval", dict(self.nomval))
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate state ids")
        for a, b in self.rel:
            if a not in known or b not in known:
                raise ValueError(f"relation mentions unknown state ({a}, {b})")
        for p, ss in self.val.items():
            unknown = ss - known
            if unknown:
                raise ValueError(f"valuation of {p!r} mentions unknown states {sorted(unknown)}")
        for i, s in self.nomval.items():
            if s not in known:
                raise ValueError(f"nominal {i!r} names unknown state {s!r}")

    def successors(self, s: str) -> list[str]:
        return [t for t in self.states if (s, t) in self.rel]

    def predecessors(self, s: str) -> list[str]:
        return [t for t in self.states if (t, s) in self.rel]


def is_transitive(m: HybridModel) -> bool:
    rel = m.rel
    return all((a, d) in rel for a, b in rel for c, d in rel if b == c)


def is_complete(m: HybridModel) -> bool:
    return all((a, b) in m.rel for a in m.states for b in m.states)


def is_linear(m: HybridModel) -> bool:
    """Irreflexive, transitive, and trichotomous."""
    if any((s, s) in m.rel for s in m.states):
        return False
    if not is_transitive(m):
        return False
    return all(
        a == b or (a, b) in m.rel or (b, a) in m.rel
        for a in m.states
        for b in m.states
    )


def _closure(states, rel):
    out = set(rel)
    changed = True
    while changed:
        changed = False
        new = {(a, d) for a, b in out for c, d in out if b == c and (a, d) not in out}
        if new:
            out |= new
            changed = True
    return frozenset(out)


def transitive_closure(m: HybridModel) -> HybridModel:
    return HybridModel(m.states, _closure(m.states, m.rel), m.val, m.nomval)


def is_transitive_tree(m: HybridModel) -> bool:
    """True iff rel is the transitive closure of a tree relation.

    A tree is acyclic and connected with at most one predecessor per point;
    for a finite strict order the candidate tree is the unique transitive
    reduction.
    """
    rel = m.rel
    if any((s, s) in rel for s in m.states):
        return False
    if not is_transitive(m):
        return False
    reduction = {
        (a, b)
        for a, b in rel
        if not any((a, c) in rel and (c, b) in rel for c in m.states)
    }
    if _closure(m.states, reduction) != rel:
        return False
    preds = {s: [a for a, b in reduction if b == s] for s in m.states}
    if any(len(ps) > 1 for ps in preds.values()):
        return False
    # connected: undirected reachability from the first state covers all
    if not m.states:
        return False
    adj = {s: set() for s in m.states}
    for a, b in reduction:
        adj[a].add(b)
        adj[b].add(a)
    seen = {m.states[0]}
    frontier = [m.states[0]]
    while frontier:
        s = frontier.pop()
        for t in adj[s]:
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return len(seen) == len(m.states)


def generated_submodel(m: HybridModel, s: str) -> HybridModel:
    """Restriction to s and everything reachable from s through R-plus."""
    if s not in m.states:
        raise ValueError(f"unknown state {s!r}")
    plus = _closure(m.states, m.rel)
    keep = {s} | {t for (a, t) in plus if a == s}
    states = tuple(t for t in m.states if t in keep)
    rel = frozenset((a, b) for a, b in m.rel if a in keep and b in keep)
    val = {p: ss & keep for p, ss in m.val.items()}
    nomval = {i: t for i, t in m.nomval.items() if t in keep}
    return HybridModel(states, rel, val, nomval)


def cliques(m: HybridModel) -> tuple[list[list[str]], frozenset[tuple[int, int]]]:
    """Partition a transitive model into maximal complete subframes.

    Returns the cliques as ordered lists (declared state order, first-seen
    order across cliques) plus the strict node-level reachability order as
    index pairs.
    """
    if not is_transitive(m):
        raise ValueError("cliques requires a transitive model")
    index = {}
    parts: list[list[str]] = []
    for s in m.states:
        placed = False
        for k, part in enumerate(parts):
            r = part[0]
            if (s, r) in m.rel and (r, s) in m.rel:
                part.append(s)
                index[s] = k
                placed = True
                break
        if not placed:
            index[s] = len(parts)
            parts.append([s])
    edges = set()
    for a, b in m.rel:
        if index[a] != index[b]:
            edges.add((index[a], index[b]))
    return parts, frozenset(edges)


# ---------------------------------------------------------------------------
# File format: one JSON document per file with keys
#   states (list), rel (list of 2-lists), val (prop -> list), nom (nominal -> state)

_MODEL_KEYS = {"states", "rel", "val", "nom"}


def model_from_dict(doc: dict) -> HybridModel:
    if not isinstance(doc, dict):
        raise ValueError("model document must be a mapping")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ValueError(f"unknown keys in model document: {sorted(unknown)}")
    if "states" not in doc:
        raise ValueError("model document lacks 'states'")
    return HybridModel(
        tuple(doc["states"]),
        frozenset((a, b) for a, b in doc.get("rel", [])),
        {p: frozenset(ss) for p, ss in doc.get("val", {}).items()},
        dict(doc.get("nom", {})),
    )


def model_to_dict(m: HybridModel) -> dict:
    return {
        "states": list(m.states),
        "rel": sorted([a, b] for a, b in m.rel),
        "val": {p: sorted(ss) for p, ss in sorted(m.val.items())},
        "nom": dict(sorted(m.nomval.items())),
    }


def load_model(path) -> HybridModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(m: HybridModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=2)
        fh.write("\n")
