"""Finite block-tree representations of (possibly infinite) transitive models.

A representation is a transitive structure whose states split into an
explicit part M and reference leaves C.  A C-state stands for the subtree
rooted at the M-state it references; a reference pointing at or above its
own position denotes infinite repetition.  Nominals are handled as
propositional atoms here (solver-level recoding), so the valuation is a
single proposition map.

The evaluator below follows links through C-states by consulting guessed
types: a diamond crossing into a reference holds exactly when the stripped
body belongs to the reference's guessed type, which is sound because free
variables at that point are always bound at or above the crossing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .formula import (
    NOM,
    PROP,
    And,
    Atom,
    Bot,
    Box,
    Diamond,
    Down,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    check_hld,
    diamond_closure,
    free_vars,
    strip_free,
)
from .model import HybridModel, _closure, cliques

PhiType = frozenset


@dataclass(frozen=True)
class FiniteRep:
    """Block-tree prefix (M) with reference leaves (C) and ref map C -> M."""

    m_states: tuple[str, ...]
    c_states: tuple[str, ...]
    rel: frozenset[tuple[str, str]]
    val: dict[str, frozenset[str]] = field(default_factory=dict)
    ref: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "m_states", tuple(self.m_states))
        object.__setattr__(self, "c_states", tuple(self.c_states))
        object.__setattr__(self, "rel", frozenset(tuple(e) for e in self.rel))
        object.__setattr__(self, "val", {p: frozenset(ss) for p, ss in self.val.items()})
        object.__setattr__(self, "ref", dict(self.ref))
        self._validate()

    def _validate(self):
        m_set, c_set = set(self.m_states), set(self.c_states)
        if not self.m_states:
            raise ValueError("representation needs at least one explicit state")
        if len(m_set) != len(self.m_states) or len(c_set) != len(self.c_states):
            raise ValueError("duplicate state ids")
        if m_set & c_set:
            raise ValueError("m and c states overlap")
        known = m_set | c_set
        for a, b in self.rel:
            if a not in known or b not in known:
                raise ValueError(f"relation mentions unknown state ({a}, {b})")
            if a in c_set:
                raise ValueError(f"c-state {a!r} has an outgoing edge")
        for p, ss in self.val.items():
            if ss - known:
                raise ValueError(f"valuation of {p!r} outside states")
        if set(self.ref) != c_set:
            raise ValueError("ref must be total on c_states")
        for c, target in self.ref.items():
            if target not in m_set:
                raise ValueError(f"ref({c!r}) = {target!r} is not an m-state")
        m_rel = frozenset((a, b) for a, b in self.rel if a in m_set and b in m_set)
        m_model = HybridModel(self.m_states, m_rel)
        parts, edges = cliques(m_model)  # raises if not transitive
        node_of = {}
        for idx, part in enumerate(parts):
            for s in part:
                node_of[s] = idx
        self._check_condensation_tree(parts, edges)
        for c in self.c_states:
            preds = {a for a, b in self.rel if b == c}
            if not preds:
                raise ValueError(f"c-state {c!r} is attached to no node")
            candidates = {node_of[s] for s in preds}
            # the deepest node among the predecessors must account for the set
            ok = False
            for u in candidates:
                expected = set(parts[u])
                for w, v in edges:
                    if v == u:
                        expected |= set(parts[w])
                if preds == expected:
                    ok = True
                    break
            if not ok:
                raise ValueError(
                    f"predecessors of c-state {c!r} are not a node plus its ancestors"
                )
        object.__setattr__(self, "_parts", parts)
        object.__setattr__(self, "_node_edges", edges)
        object.__setattr__(self, "_node_of", node_of)

    @staticmethod
    def _check_condensation_tree(parts, edges):
        n = len(parts)
        preds = {v: {u for u, w in edges if w == v} for v in range(n)}
        # immediate predecessor: u with no node strictly between u and v
        for v in range(n):
            immediate = [
                u
                for u in preds[v]
                if not any((u, w) in edges and (w, v) in edges for w in range(n))
            ]
            if len(immediate) > 1:
                raise ValueError("condensation of the m-part is not a tree")
            if preds[v] and not immediate:
                raise ValueError("condensation of the m-part is not a tree")
        roots = [v for v in range(n) if not preds[v]]
        if len(roots) != 1:
            raise ValueError("condensation of the m-part must have a single root")

    def m_successors(self, s):
        return [t for t in self.m_states if (s, t) in self.rel]

    def c_successors(self, s):
        return [c for c in self.c_states if (s, c) in self.rel]


class _RepEvaluator:
    """HL-down evaluation on the m-part, following references via guesses."""

    def __init__(self, rep: FiniteRep, c_guess: dict):
        self.rep = rep
        self.guess = c_guess
        self.memo = {}
        self.fv = {}
        self.stripped = {}

    def free(self, f):
        key = id(f)
        if key not in self.fv:
            self.fv[key] = free_vars(f)
        return self.fv[key]

    def strip(self, f):
        key = id(f)
        if key not in self.stripped:
            self.stripped[key] = strip_free(f)
        return self.stripped[key]

    def run(self, f, g, s):
        key = (id(f), s, tuple(sorted((v, g[v]) for v in self.free(f) & g.keys())))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(f, g, s)
        self.memo[key] = out
        return out

    def _eval(self, f, g, s):
        rep = self.rep
        if isinstance(f, Atom):
            if f.kind in (PROP, NOM):
                return s in rep.val.get(f.name, frozenset())
            return g[f.name] == s
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Not):
            return not self.run(f.body, g, s)
        if isinstance(f, And):
            return self.run(f.left, g, s) and self.run(f.right, g, s)
        if isinstance(f, Or):
            return self.run(f.left, g, s) or self.run(f.right, g, s)
        if isinstance(f, Implies):
            return not self.run(f.left, g, s) or self.run(f.right, g, s)
        if isinstance(f, Iff):
            return self.run(f.left, g, s) == self.run(f.right, g, s)
        if isinstance(f, Diamond):
            if any(self.run(f.body, g, t) for t in rep.m_successors(s)):
                return True
            chi = self.strip(f.body)
            return any(chi in self.guess[c] for c in rep.c_successors(s))
        if isinstance(f, Box):
            if not all(self.run(f.body, g, t) for t in rep.m_successors(s)):
                return False
            chi = self.strip(Not(f.body))
            return all(chi not in self.guess[c] for c in rep.c_successors(s))
        if isinstance(f, Down):
            return self.run(f.body, {**g, f.var.name: s}, s)
        raise TypeError(f"outside the down-fragment: {f!r}")


def compute_types(rep: FiniteRep, phi: Formula, c_guess: dict) -> dict:
    """Type of every state: closure sentences true at it or at an explicit
    state below it.

    Truth itself follows references (the diamond clause consults guesses),
    but the type collects witnesses from explicit states only; a guess is
    never its own justification.  In a correct representation every
    sentence of a type has an explicit witness, because references only
    replace subtrees whose types repeat.
    """
    check_hld(phi)
    closure = diamond_closure(phi)
    guess = _normalize_guess(rep, c_guess, closure)
    ev = _RepEvaluator(rep, guess)
    types = {}
    truths = {
        s: frozenset(chi for chi in closure if ev.run(chi, {}, s)) for s in rep.m_states
    }
    for s in rep.m_states:
        here = set(truths[s])
        for t in rep.m_successors(s):
            here |= truths[t]
        types[s] = frozenset(here)
    for c in rep.c_states:
        types[c] = guess[c]
    return types


def _normalize_guess(rep, c_guess, closure):
    guess = {c: frozenset(c_guess.get(c, frozenset())) for c in rep.c_states}
    missing = [c for c in rep.c_states if c not in c_guess]
    if missing:
        raise ValueError(f"c_guess missing states: {missing}")
    for c, t in guess.items():
        extra = t - closure
        if extra:
            raise ValueError(
                f"guessed type of {c!r} contains non-closure sentences: "
                f"{[str(x) for x in extra]}"
            )
    return guess


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: str | None
    types: dict

    def __bool__(self):
        return self.accepted


def verify(rep: FiniteRep, phi: Formula, c_guess: dict) -> VerifyResult:
    """Accept iff every guess matches the referenced state's computed type
    and phi holds at some explicit state."""
    types = compute_types(rep, phi, c_guess)
    for c in rep.c_states:
        target = rep.ref[c]
        if types[target] != types[c]:
            return VerifyResult(
                False,
                f"type mismatch: guess for {c!r} differs from type of {target!r}",
                types,
            )
    closure = diamond_closure(phi)
    guess = _normalize_guess(rep, c_guess, closure)
    ev = _RepEvaluator(rep, guess)
    if not any(ev.run(phi, {}, s) for s in rep.m_states):
        return VerifyResult(False, "formula holds at no explicit state", types)
    return VerifyResult(True, None, types)


def realize(rep: FiniteRep, depth: int) -> HybridModel:
    """Expand references depth times, then truncate the rest to bare leaves.

    Each expansion replaces a reference leaf with a fresh copy of the
    subtree rooted at the referenced state's clique; the final relation is
    transitively closed.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    states = list(rep.m_states) + list(rep.c_states)
    edges = {tuple(e) for e in rep.rel}
    val = {p: set(ss) for p, ss in rep.val.items()}
    pending = [(c, rep.ref[c]) for c in rep.c_states]
    counter = 0

    clique_of = {}
    for part in rep._parts:
        for s in part:
            clique_of[s] = tuple(part)

    for _ in range(depth):
        new_pending = []
        for leaf, target in pending:
            root_clique = clique_of[target]
            subtree = set(root_clique)
            for s in root_clique:
                subtree.update(t for (a, t) in rep.rel if a == s)
            ordered = [s for s in list(rep.m_states) + list(rep.c_states) if s in subtree]
            copy = {}
            for s in ordered:
                counter += 1
                copy[s] = f"{s}~{counter}"
            preds = [a for (a, b) in edges if b == leaf]
            states.remove(leaf)
            edges = {(a, b) for (a, b) in edges if a != leaf and b != leaf}
            for p in val.values():
                p.discard(leaf)
            for s in ordered:
                states.append(copy[s])
                for p, ss in rep.val.items():
                    if s in ss:
                        val[p].add(copy[s])
            for a, b in rep.rel:
                if a in subtree and b in subtree:
                    edges.add((copy[a], copy[b]))
            for a in preds:
                for r in root_clique:
                    edges.add((a, copy[r]))
            for s in ordered:
                if s in rep.ref:
                    new_pending.append((copy[s], rep.ref[s]))
        pending = new_pending

    for leaf, _ in pending:
        for p in val.values():
            p.discard(leaf)

    closed = _closure(states, frozenset(edges))
    return HybridModel(
        tuple(states), closed, {p: frozenset(ss) for p, ss in val.items()}, {}
    )


# -- file format: model keys plus c_states and ref ----------------------------

_REP_KEYS = {"states", "c_states", "rel", "val", "ref"}


def rep_from_dict(doc: dict) -> FiniteRep:
    if not isinstance(doc, dict):
        raise ValueError("representation document must be a mapping")
    unknown = set(doc) - _REP_KEYS
    if unknown:
        raise ValueError(f"unknown keys in representation document: {sorted(unknown)}")
    if "states" not in doc:
        raise ValueError("representation document lacks 'states'")
    return FiniteRep(
        tuple(doc["states"]),
        tuple(doc.get("c_states", [])),
        frozenset((a, b) for a, b in doc.get("rel", [])),
        {p: frozenset(ss) for p, ss in doc.get("val", {}).items()},
        dict(doc.get("ref", {})),
    )


def rep_to_dict(rep: FiniteRep) -> dict:
    return {
        "states": list(rep.m_states),
        "c_states": list(rep.c_states),
        "rel": sorted([a, b] for a, b in rep.rel),
        "val": {p: sorted(ss) for p, ss in sorted(rep.val.items())},
        "ref": dict(sorted(rep.ref.items())),
    }


def load_rep(path) -> FiniteRep:
    with open(path, "r", encoding="utf-8") as fh:
        return rep_from_dict(json.load(fh))


def save_rep(rep: FiniteRep, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rep_to_dict(rep), fh, indent=2)
        fh.write("\n")
