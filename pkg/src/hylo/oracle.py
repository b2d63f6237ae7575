"""Brute-force finite-model enumeration per frame class.

This is the ground truth the rest of the toolkit is checked against.  Two
layers share the same frame generators and the same enumeration order:

* ``enumerate_models`` materializes every model explicitly (no isomorphism
  reduction, deterministic order);
* ``brute_sat`` / ``brute_global_sat`` / ``find_eval_difference`` evaluate
  formulas over all valuations of a frame at once, one bit lane per
  valuation, with frames processed in numpy batches.  Within-frame lane
  order equals the explicit enumeration order, so both layers report the
  same first hit.  The lane evaluator is cross-checked against the plain
  checker exhaustively at small sizes in the test suite.

``brute_fo_sat`` searches relational structures for a first-order sentence
by backtracking over atom truth values with frame-constraint propagation;
naive enumeration cannot refute at the domain sizes the translations need.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .formula import (
    NOM,
    PROP,
    SVAR,
    And,
    At,
    Atom,
    Bot,
    Box,
    Diamond,
    Down,
    Everywhere,
    Formula,
    Future,
    Globally,
    Historically,
    Iff,
    Implies,
    Not,
    Or,
    Past,
    Since,
    SincePlus,
    SincePlusPlus,
    Somewhere,
    Top,
    Until,
    UntilPlus,
    UntilPlusPlus,
    free_vars,
    noms_of,
    props_of,
    subformulas,
)
from .model import HybridModel
from . import satellites as sat

FRAME_CLASSES = ("any", "transitive", "complete", "transitive-tree", "linear")

_CHUNK = 16384


# ---------------------------------------------------------------------------
# Frame generation


def _partitions(k):
    """Set partitions of range(k) in restricted-growth-string order."""

    def rec(i, rgs, maxv):
        if i == k:
            classes: list[list[int]] = [[] for _ in range(maxv + 1)]
            for idx, c in enumerate(rgs):
                classes[c].append(idx)
            yield classes
            return
        for c in range(maxv + 2):
            yield from rec(i + 1, rgs + [c], max(maxv, c))

    if k == 0:
        return
    yield from rec(1, [0], 0)


_POSET_CACHE: dict[int, np.ndarray] = {}


def _posets(m):
    """All strict partial orders on m labeled points, DFS order, cached."""
    if m in _POSET_CACHE:
        return _POSET_CACHE[m]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    rel = [[False] * m for _ in range(m)]
    decided_none = set()
    out = []

    def closure_add(a, b):
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            if x == y or rel[y][x]:
                return False
            if rel[x][y]:
                continue
            if (min(x, y), max(x, y)) in decided_none:
                return False
            rel[x][y] = True
            for z in range(m):
                if rel[y][z] and not rel[x][z]:
                    queue.append((x, z))
                if rel[z][x] and not rel[z][y]:
                    queue.append((z, y))
        return True

    def dfs(idx):
        if idx == len(pairs):
            out.append([row[:] for row in rel])
            return
        i, j = pairs[idx]
        if rel[i][j] or rel[j][i]:
            dfs(idx + 1)
            return
        decided_none.add((i, j))
        dfs(idx + 1)
        decided_none.discard((i, j))
        for a, b in ((i, j), (j, i)):
            snapshot = [row[:] for row in rel]
            if closure_add(a, b):
                dfs(idx + 1)
            for r in range(m):
                rel[r][:] = snapshot[r]

    dfs(0)
    arr = np.array(out, dtype=bool).reshape(len(out), m, m)
    _POSET_CACHE[m] = arr
    return arr


_TT_CACHE: dict[int, np.ndarray] = {}


def _transitive_tree_frames(k):
    """Closures of all labeled rooted trees on k nodes, parent-vector order."""
    if k in _TT_CACHE:
        return _TT_CACHE[k]
    out = []
    choices = [[-1] + [p for p in range(k) if p != i] for i in range(k)]
    for vec in product(*choices):
        if sum(1 for p in vec if p == -1) != 1:
            continue
        ok = True
        for i in range(k):
            seen = set()
            j = i
            while vec[j] != -1:
                if j in seen:
                    ok = False
                    break
                seen.add(j)
                j = vec[j]
            if not ok:
                break
        if not ok:
            continue
        anc = [[False] * k for _ in range(k)]
        for i in range(k):
            j = vec[i]
            while j != -1:
                anc[j][i] = True
                j = vec[j]
        out.append(anc)
    arr = np.array(out, dtype=bool).reshape(len(out), k, k)
    _TT_CACHE[k] = arr
    return arr


def _frame_batches(frame, k, chunk=_CHUNK):
    """Yield (B, k, k) boolean relation batches in canonical order."""
    if frame == "any":
        total = 1 << (k * k)
        positions = np.arange(k * k, dtype=np.uint64)
        for start in range(0, total, chunk):
            stop = min(start + chunk, total)
            codes = np.arange(start, stop, dtype=np.uint64)
            bits = (codes[:, None] >> positions[None, :]) & np.uint64(1)
            yield bits.astype(bool).reshape(stop - start, k, k)
    elif frame == "complete":
        yield np.ones((1, k, k), dtype=bool)
    elif frame == "linear":
        frames = []
        for perm in permutations(range(k)):
            rel = np.zeros((k, k), dtype=bool)
            for i in range(k):
                for j in range(i + 1, k):
                    rel[perm[i]][perm[j]] = True
            frames.append(rel)
        arr = np.array(frames, dtype=bool).reshape(len(frames), k, k)
        for start in range(0, len(frames), chunk):
            yield arr[start : start + chunk]
    elif frame == "transitive-tree":
        arr = _transitive_tree_frames(k)
        for start in range(0, len(arr), chunk):
            yield arr[start : start + chunk]
    elif frame == "transitive":
        for classes in _partitions(k):
            singles = [c[0] for c in classes if len(c) == 1]
            classof = np.empty(k, dtype=np.intp)
            for ci, members in enumerate(classes):
                for s in members:
                    classof[s] = ci
            posets = _posets(len(classes))
            for flagcode in range(1 << len(singles)):
                base = np.zeros((k, k), dtype=bool)
                for ci, members in enumerate(classes):
                    if len(members) >= 2:
                        base[np.ix_(members, members)] = True
                for bit, s in enumerate(singles):
                    if (flagcode >> bit) & 1:
                        base[s, s] = True
                for start in range(0, len(posets), chunk):
                    lifted = posets[start : start + chunk][
                        :, classof[:, None], classof[None, :]
                    ]
                    yield lifted | base
    else:
        raise ValueError(f"unknown frame class {frame!r}")


def frames(frame, k):
    """Relations of the given frame class on k states, as frozensets of pairs."""
    names = [f"s{i}" for i in range(k)]
    for batch in _frame_batches(frame, k):
        for row in batch:
            yield frozenset(
                (names[s], names[t]) for s in range(k) for t in range(k) if row[s, t]
            )


# ---------------------------------------------------------------------------
# Explicit model enumeration


def _split_atoms(atoms):
    props, noms = [], []
    for a in atoms:
        if not isinstance(a, Atom):
            raise TypeError(f"expected Atom, got {a!r}")
        if a.kind == PROP:
            props.append(a.name)
        elif a.kind == NOM:
            noms.append(a.name)
        else:
            raise ValueError("state variables are not enumerated in valuations")
    return tuple(sorted(set(props))), tuple(sorted(set(noms)))


def _decode_valuation(code, props, names):
    k = len(names)
    return {
        p: frozenset(names[s] for s in range(k) if (code >> (i * k + s)) & 1)
        for i, p in enumerate(props)
    }


def enumerate_models(frame, max_states, atoms=()):
    """Every model with <= max_states states over the given atoms.

    No isomorphism reduction.  Order: state count ascending, then frame in
    generator order, then proposition valuations by code, then nominal
    placements lexicographically.
    """
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    props, noms = _split_atoms(atoms)
    for k in range(1, max_states + 1):
        names = tuple(f"s{i}" for i in range(k))
        for rel in frames(frame, k):
            for code in range(1 << (len(props) * k)):
                val = _decode_valuation(code, props, names)
                for placement in product(range(k), repeat=len(noms)):
                    nomval = {i: names[s] for i, s in zip(noms, placement)}
                    yield HybridModel(names, rel, val, nomval)


# ---------------------------------------------------------------------------
# Lane evaluation: one bit lane per proposition valuation


def _needs_closure(f):
    return any(
        isinstance(g, (UntilPlus, SincePlus, UntilPlusPlus, SincePlusPlus))
        for g in subformulas(f)
    )


def _bigint_to_words(value, m):
    mask = (1 << 64) - 1
    return np.array([(value >> (64 * j)) & mask for j in range(m)], dtype=np.uint64)


class _LaneEngine:
    """Evaluates formulas over a frame batch, all valuations at once.

    Words have shape (B, k, m): frame, state, lane plane.  Lane l encodes
    the valuation where proposition i holds at state s iff bit i*k+s of l
    is set; that matches the valuation-code order of enumerate_models.
    """

    def __init__(self, formulas, props, noms, k):
        self.k = k
        self.props = props
        self.noms = noms
        self.lanes = 1 << (len(props) * k)
        self.m = (self.lanes + 63) // 64
        full_int = (1 << self.lanes) - 1
        self.full = _bigint_to_words(full_int, self.m)
        self.zero = np.uint64(0)
        self.patterns = {}
        for i, p in enumerate(props):
            rows = []
            for s in range(k):
                pos = i * k + s
                period = 1 << pos
                pattern = (full_int // ((1 << (2 * period)) - 1)) * ((1 << period) - 1) << period
                rows.append(_bigint_to_words(pattern, self.m))
            self.patterns[p] = np.array(rows, dtype=np.uint64).reshape(1, k, self.m)
        self.state_mask = []
        for t in range(k):
            rows = np.zeros((1, k, self.m), dtype=np.uint64)
            rows[0, t, :] = self.full
            self.state_mask.append(rows)
        self.top = np.broadcast_to(self.full, (1, k, self.m))
        self.bot = np.zeros((1, k, self.m), dtype=np.uint64)
        self.fv = {}
        for f in formulas:
            for g in subformulas(f):
                if id(g) not in self.fv:
                    self.fv[id(g)] = free_vars(g)

    def set_batch(self, rel, plus):
        self.rel = rel
        self.relT = np.transpose(rel, (0, 2, 1))
        self.plus = plus
        self.plusT = None if plus is None else np.transpose(plus, (0, 2, 1))
        self.B = rel.shape[0]
        self.memo = {}
        self.placement = {}

    def set_placement(self, placement):
        self.placement = placement
        self.memo = {}

    def _exists_step(self, rel_slice, w):
        # out[:, s] = OR_t rel[:, s, t] ? w[:, t]
        out = np.zeros((self.B, self.k, self.m), dtype=np.uint64)
        for t in range(self.k):
            out |= np.where(rel_slice[:, :, t, None], w[:, t, None, :], self.zero)
        return out

    def _forall_step(self, rel_slice, w):
        out = np.broadcast_to(self.full, (self.B, self.k, self.m)).copy()
        for t in range(self.k):
            out &= np.where(rel_slice[:, :, t, None], w[:, t, None, :], self.full)
        return out

    def _until_like(self, f, env, outer, guard):
        wl = self.ev(f.left, env)
        wr = self.ev(f.right, env)
        out = np.zeros((self.B, self.k, self.m), dtype=np.uint64)
        for t in range(self.k):
            betw = np.broadcast_to(self.full, (self.B, self.k, self.m)).copy()
            for u in range(self.k):
                cond = guard[:, :, u] & guard[:, u, t][:, None]
                betw &= np.where(cond[:, :, None], wr[:, u, None, :], self.full)
            out |= np.where(outer[:, :, t, None], wl[:, t, None, :] & betw, self.zero)
        return out

    def ev(self, f, env=None):
        if env is None:
            env = {}
        key = (id(f), tuple(sorted((v, env[v]) for v in self.fv[id(f)] if v in env)))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._ev(f, env)
        self.memo[key] = out
        return out

    def _ev(self, f, env):
        if isinstance(f, Atom):
            if f.kind == PROP:
                return self.patterns.get(f.name, self.bot)
            if f.kind == NOM:
                return self.state_mask[self.placement[f.name]]
            return self.state_mask[env[f.name]]
        if isinstance(f, Top):
            return self.top
        if isinstance(f, Bot):
            return self.bot
        if isinstance(f, Not):
            return self.ev(f.body, env) ^ self.full
        if isinstance(f, And):
            return self.ev(f.left, env) & self.ev(f.right, env)
        if isinstance(f, Or):
            return self.ev(f.left, env) | self.ev(f.right, env)
        if isinstance(f, Implies):
            return (self.ev(f.left, env) ^ self.full) | self.ev(f.right, env)
        if isinstance(f, Iff):
            return (self.ev(f.left, env) ^ self.ev(f.right, env)) ^ self.full
        if isinstance(f, (Diamond, Future)):
            return self._exists_step(self.rel, self.ev(f.body, env))
        if isinstance(f, (Box, Globally)):
            return self._forall_step(self.rel, self.ev(f.body, env))
        if isinstance(f, Past):
            return self._exists_step(self.relT, self.ev(f.body, env))
        if isinstance(f, Historically):
            return self._forall_step(self.relT, self.ev(f.body, env))
        if isinstance(f, Somewhere):
            w = self.ev(f.body, env)
            red = w[:, 0, :]
            for s in range(1, self.k):
                red = red | w[:, s, :]
            return np.broadcast_to(red[:, None, :], (red.shape[0], self.k, self.m))
        if isinstance(f, Everywhere):
            w = self.ev(f.body, env)
            red = w[:, 0, :]
            for s in range(1, self.k):
                red = red & w[:, s, :]
            return np.broadcast_to(red[:, None, :], (red.shape[0], self.k, self.m))
        if isinstance(f, At):
            t = f.term
            den = self.placement[t.name] if t.kind == NOM else env[t.name]
            w = self.ev(f.body, env)
            col = w[:, den, None, :]
            return np.broadcast_to(col, (w.shape[0], self.k, self.m))
        if isinstance(f, Down):
            rows = []
            for s in range(self.k):
                w = self.ev(f.body, {**env, f.var.name: s})
                rows.append(np.broadcast_to(w[:, s, :], (self.B, self.m)))
            return np.stack(rows, axis=1)
        if isinstance(f, Until):
            return self._until_like(f, env, self.rel, self.rel)
        if isinstance(f, Since):
            return self._since_like(f, env, plain=True)
        if isinstance(f, UntilPlus):
            return self._until_like(f, env, self.rel, self.plus)
        if isinstance(f, SincePlus):
            return self._since_like(f, env, plain=False, outer_plain=True)
        if isinstance(f, UntilPlusPlus):
            return self._until_like(f, env, self.plus, self.plus)
        if isinstance(f, SincePlusPlus):
            return self._since_like(f, env, plain=False)
        raise TypeError(f"not a formula node: {f!r}")

    def _since_like(self, f, env, plain, outer_plain=False):
        # S(phi, psi) at s: exists t with t R s, phi at t, and psi at every u
        # with t R u and u R s (closure variants use R-plus in the guard).
        wl = self.ev(f.left, env)
        wr = self.ev(f.right, env)
        guard = self.rel if plain else self.plus
        outer = self.relT if (plain or outer_plain) else self.plusT
        out = np.zeros((self.B, self.k, self.m), dtype=np.uint64)
        for t in range(self.k):
            betw = np.broadcast_to(self.full, (self.B, self.k, self.m)).copy()
            for u in range(self.k):
                cond = guard[:, t, u][:, None] & guard[:, u, :]
                betw &= np.where(cond[:, :, None], wr[:, u, None, :], self.full)
            out |= np.where(outer[:, :, t, None], wl[:, t, None, :] & betw, self.zero)
        return out


def _closure_batch(rel):
    plus = rel.copy()
    k = rel.shape[1]
    for t in range(k):
        plus |= plus[:, :, t, None] & plus[:, t, None, :]
    return plus


def _word_lowest_lane(words):
    for j, w in enumerate(words):
        value = int(w)
        if value:
            return 64 * j + (value & -value).bit_length() - 1
    return None


@dataclass(frozen=True)
class Found:
    model: HybridModel
    state: str
    assignment: dict


def _sentence_guard(phi):
    fv = free_vars(phi)
    if fv:
        raise ValueError(f"not a sentence, free: {sorted(fv)}")


def _decode_hit(engine, words_per_placement, b, rel_row, props, noms, k):
    names = tuple(f"s{i}" for i in range(k))
    best = None
    for pl_idx, (placement, words) in enumerate(words_per_placement):
        row = words[b] if words.shape[0] > 1 else words[0]
        union = row[0].copy()
        for s in range(1, k):
            union |= row[s]
        lane = _word_lowest_lane(union)
        if lane is None:
            continue
        plane, bit = divmod(lane, 64)
        state = next(s for s in range(k) if (int(row[s][plane]) >> bit) & 1)
        cand = (lane, pl_idx, state, placement)
        if best is None or cand[:3] < best[:3]:
            best = cand
    lane, pl_idx, state, placement = best
    rel = frozenset(
        (names[s], names[t]) for s in range(k) for t in range(k) if rel_row[s, t]
    )
    val = _decode_valuation(lane, props, names)
    nomval = {i: names[s] for i, s in zip(noms, placement)}
    return HybridModel(names, rel, val, nomval), names[state]


def _lane_search(formulas, frame, max_states, mode, atoms=()):
    """Shared search across brute_sat / global sat / equivalence sweeps.

    mode 'sat': first (model, state) where formulas[0] holds.
    mode 'global': first model where formulas[0] holds at every state.
    mode 'diff': first (model, state) where formulas[0] and formulas[1] differ.
    """
    extra_props, extra_noms = _split_atoms(atoms)
    props = tuple(sorted({p for f in formulas for p in props_of(f)} | set(extra_props)))
    noms = tuple(sorted({i for f in formulas for i in noms_of(f)} | set(extra_noms)))
    needs_plus = any(_needs_closure(f) for f in formulas)
    for k in range(1, max_states + 1):
        engine = _LaneEngine(formulas, props, noms, k)
        placements = list(product(range(k), repeat=len(noms)))
        for batch in _frame_batches(frame, k):
            plus = _closure_batch(batch) if needs_plus else None
            engine.set_batch(batch, plus)
            words_per_placement = []
            hit = np.zeros(batch.shape[0], dtype=bool)
            for placement_tuple in placements:
                engine.set_placement(dict(zip(noms, placement_tuple)))
                if mode == "diff":
                    w = engine.ev(formulas[0]) ^ engine.ev(formulas[1])
                else:
                    w = engine.ev(formulas[0])
                if mode == "global":
                    red = w[:, 0, :]
                    for s in range(1, k):
                        red = red & w[:, s, :]
                    w = np.broadcast_to(red[:, None, :], (red.shape[0], k, engine.m))
                words_per_placement.append((placement_tuple, w))
                nz = w.any(axis=(1, 2)) if w.shape[0] > 1 else np.repeat(w.any(), batch.shape[0])
                hit |= nz
            if hit.any():
                b = int(np.argmax(hit))
                model, state = _decode_hit(
                    engine, words_per_placement, b, batch[b], props, noms, k
                )
                return model, state
    return None


def brute_sat(phi: Formula, frame: str, max_states: int):
    """First model and state satisfying the sentence phi, or None."""
    _sentence_guard(phi)
    out = _lane_search([phi], frame, max_states, "sat")
    if out is None:
        return None
    model, state = out
    return Found(model, state, {})


def brute_global_sat(phi: Formula, frame: str, max_states: int):
    """First model globally satisfying phi, or None."""
    _sentence_guard(phi)
    out = _lane_search([phi], frame, max_states, "global")
    return None if out is None else out[0]


def find_eval_difference(f1: Formula, f2: Formula, frame: str, max_states: int, atoms=()):
    """First (model, state) where the two sentences disagree, or None."""
    _sentence_guard(f1)
    _sentence_guard(f2)
    return _lane_search([f1, f2], frame, max_states, "diff", atoms=atoms)


# ---------------------------------------------------------------------------
# First-order model search


@dataclass(frozen=True)
class FOFound:
    structure: sat.FOStructure


_T, _F, _U = 1, 0, -1


class _FOSearch:
    """Requirement-propagation search for a satisfying structure.

    A requirement is a (subformula, environment, truth value) triple.
    Conjunctive requirements decompose immediately down to atom
    assignments; disjunctive ones are deferred to a pending list and
    branched in creation order.  Every composite requirement is recorded,
    so opposite commitments on the same instance conflict without being
    expanded.  Status checks use Kleene evaluation with an early-unknown
    exit on quantifiers.
    """

    def __init__(self, alpha, k, frame, rel_fixed=None):
        self.alpha = alpha
        self.k = k
        self.frame = frame
        self.preds = sorted(sat.fo_preds(alpha))
        if rel_fixed is not None:
            self.rel = [[_T if rel_fixed[a][b] else _F for b in range(k)] for a in range(k)]
        elif frame == "complete":
            self.rel = [[_T] * k for _ in range(k)]
        else:
            self.rel = [[_U] * k for _ in range(k)]
        self.unary = {p: [_U] * k for p in self.preds}
        self.trail = []
        self.consts = {}
        self.store = {}
        self.pending = []
        self.fv = {}

    # -- assignments with transitivity propagation --------------------------

    def _set_rel(self, a, b, value):
        if self.rel[a][b] != _U:
            return self.rel[a][b] == value
        self.rel[a][b] = value
        self.trail.append(("rel", a, b))
        if self.frame != "transitive":
            return True
        if value == _T:
            for x in range(self.k):
                if self.rel[x][a] == _T and not self._set_rel(x, b, _T):
                    return False
                if self.rel[b][x] == _T and not self._set_rel(a, x, _T):
                    return False
        else:
            for x in range(self.k):
                if self.rel[a][x] == _T and self.rel[x][b] == _T:
                    return False
        return True

    def _set_unary(self, name, e, value):
        if self.unary[name][e] != _U:
            return self.unary[name][e] == value
        self.unary[name][e] = value
        self.trail.append(("unary", name, e))
        return True

    def _mark(self):
        return len(self.trail)

    def _undo(self, mark):
        while len(self.trail) > mark:
            entry = self.trail.pop()
            kind = entry[0]
            if kind == "rel":
                self.rel[entry[1]][entry[2]] = _U
            elif kind == "unary":
                self.unary[entry[1]][entry[2]] = _U
            elif kind == "store":
                del self.store[entry[1]]
            elif kind == "pend":
                popped = self.pending.pop()
                assert popped is not None
            else:  # done flag
                self.pending[entry[1]][3] = False

    # -- requirements --------------------------------------------------------

    def _canon(self, g):
        """Alpha-invariant code plus the free variables in slot order.

        Duplicated subformulas that differ only in bound-variable names get
        the same code, so commitments on one copy conflict with opposite
        commitments on another.
        """
        key = id(g)
        hit = self.fv.get(key)
        if hit is not None:
            return hit
        slots: list[str] = []

        def term(t, bound):
            if isinstance(t, sat.FOConst):
                return ("c", t.name)
            if t.name in bound:
                return ("b", bound[t.name])
            if t.name not in slots:
                slots.append(t.name)
            return ("f", slots.index(t.name))

        def rec(h, bound):
            if isinstance(h, sat.FOTrue):
                return ("true",)
            if isinstance(h, sat.FOFalse):
                return ("false",)
            if isinstance(h, sat.Rel):
                return ("rel", term(h.left, bound), term(h.right, bound))
            if isinstance(h, sat.RelPlus):
                return ("relp", term(h.left, bound), term(h.right, bound))
            if isinstance(h, sat.Eq):
                return ("eq", term(h.left, bound), term(h.right, bound))
            if isinstance(h, sat.Pred):
                return ("pred", h.name, term(h.term, bound))
            if isinstance(h, sat.FONot):
                return ("not", rec(h.body, bound))
            if isinstance(h, (sat.FOAnd, sat.FOOr, sat.FOImplies)):
                tag = {sat.FOAnd: "and", sat.FOOr: "or", sat.FOImplies: "implies"}[type(h)]
                return (tag, rec(h.left, bound), rec(h.right, bound))
            if isinstance(h, (sat.Exists, sat.Forall)):
                tag = "ex" if isinstance(h, sat.Exists) else "all"
                inner = {**bound, h.var: len(bound)}
                return (tag, rec(h.body, inner))
            raise TypeError(f"not an FO node: {h!r}")

        code = rec(g, {})
        out = (code, tuple(slots))
        self.fv[key] = out
        return out

    def _term(self, t, env):
        if isinstance(t, sat.FOVar):
            return env[t.name]
        return self.consts[t.name]

    def _require(self, g, env, value):
        """Impose g == value; returns False on conflict."""
        if isinstance(g, sat.FOTrue):
            return value
        if isinstance(g, sat.FOFalse):
            return not value
        if isinstance(g, sat.Eq):
            return (self._term(g.left, env) == self._term(g.right, env)) == value
        if isinstance(g, sat.Pred):
            return self._set_unary(g.name, self._term(g.term, env), _T if value else _F)
        if isinstance(g, sat.Rel):
            return self._set_rel(
                self._term(g.left, env), self._term(g.right, env), _T if value else _F
            )
        if isinstance(g, sat.RelPlus):
            raise ValueError("closure atoms are not searchable")
        if isinstance(g, sat.FONot):
            return self._require(g.body, env, not value)
        code, slots = self._canon(g)
        key = (code, tuple(env[v] for v in slots))
        if key in self.store:
            return self.store[key] == value
        self.store[key] = value
        self.trail.append(("store", key))
        if isinstance(g, sat.FOAnd) and value:
            return self._require(g.left, env, True) and self._require(g.right, env, True)
        if isinstance(g, sat.FOOr) and not value:
            return self._require(g.left, env, False) and self._require(g.right, env, False)
        if isinstance(g, sat.FOImplies) and not value:
            return self._require(g.left, env, True) and self._require(g.right, env, False)
        if (isinstance(g, sat.Forall) and value) or (isinstance(g, sat.Exists) and not value):
            # conjunctive quantifier requirement: watch it instead of
            # instantiating; instances are forced only when nothing else
            # remains, so probes stay cheap
            self.pending.append([g, dict(env), value, False, True])
            self.trail.append(("pend",))
            return True
        self.pending.append([g, dict(env), value, False, False])
        self.trail.append(("pend",))
        return True

    def _options(self, g, env, value):
        if isinstance(g, sat.Exists) and value:
            return [(g.body, {**env, g.var: d}, True) for d in range(self.k)]
        if isinstance(g, sat.Forall) and not value:
            return [(g.body, {**env, g.var: d}, False) for d in range(self.k)]
        if isinstance(g, sat.FOAnd):
            return [(g.left, env, False), (g.right, env, False)]
        if isinstance(g, sat.FOOr):
            return [(g.left, env, True), (g.right, env, True)]
        if isinstance(g, sat.FOImplies):
            return [(g.left, env, False), (g.right, env, True)]
        raise TypeError(f"unexpected pending requirement on {g!r}")

    # -- Kleene status, early-unknown on quantifiers -------------------------

    def _status(self, g, env):
        if isinstance(g, sat.FOTrue):
            return _T
        if isinstance(g, sat.FOFalse):
            return _F
        if isinstance(g, sat.Eq):
            return _T if self._term(g.left, env) == self._term(g.right, env) else _F
        if isinstance(g, sat.Pred):
            return self.unary[g.name][self._term(g.term, env)]
        if isinstance(g, sat.Rel):
            return self.rel[self._term(g.left, env)][self._term(g.right, env)]
        if isinstance(g, sat.RelPlus):
            raise ValueError("closure atoms are not searchable")
        if isinstance(g, sat.FONot):
            v = self._status(g.body, env)
            return _U if v == _U else 1 - v
        # binary connectives stop at the first unknown child: a definite
        # answer may be delayed, which only postpones a conflict the option
        # probes catch anyway
        if isinstance(g, sat.FOAnd):
            v1 = self._status(g.left, env)
            if v1 != _T:
                return v1
            return self._status(g.right, env)
        if isinstance(g, sat.FOOr):
            v1 = self._status(g.left, env)
            if v1 == _T:
                return _T
            if v1 == _U:
                return _U
            return self._status(g.right, env)
        if isinstance(g, sat.FOImplies):
            v1 = self._status(g.left, env)
            if v1 == _F:
                return _T
            if v1 == _U:
                return _U
            return self._status(g.right, env)
        if isinstance(g, (sat.Exists, sat.Forall)):
            want = _T if isinstance(g, sat.Exists) else _F
            for d in range(self.k):
                v = self._status(g.body, {**env, g.var: d})
                if v == want:
                    return want
                if v == _U:
                    return _U
            return 1 - want
        raise TypeError(f"not an FO node: {g!r}")

    # -- search ---------------------------------------------------------------

    def search(self):
        if not self._require(self.alpha, {}, True):
            return None
        return self._dfs()

    def _probe(self, option):
        mark = self._mark()
        ok = self._require(*option)
        self._undo(mark)
        return ok

    def _mark_done(self, i):
        self.pending[i][3] = True
        self.trail.append(("done", i))

    def _propagate(self):
        """Propagate to fixpoint: mark satisfied pendings, fail violated
        ones, decompose conjunctive constraints, commit forced options of
        disjunctive pendings.  Returns False on conflict."""
        changed = True
        while changed:
            changed = False
            for i in range(len(self.pending)):
                entry = self.pending[i]
                if entry[3]:
                    continue
                g, env, value, _, is_constraint = entry
                st = self._status(g, env)
                want = _T if value else _F
                if st == want:
                    self._mark_done(i)
                    continue
                if st == 1 - want:
                    return False
                if is_constraint:
                    self._mark_done(i)
                    instance_value = isinstance(g, sat.Forall)
                    for d in range(self.k):
                        if not self._require(g.body, {**env, g.var: d}, instance_value):
                            return False
                    changed = True
                    break
                if not isinstance(g, (sat.Exists, sat.Forall)):
                    options = self._options(g, env, value)
                    viable = [opt for opt in options if self._probe(opt)]
                    if not viable:
                        return False
                    if len(viable) == 1:
                        self._mark_done(i)
                        if not self._require(*viable[0]):
                            return False
                        changed = True
                        break
        return True

    def _dfs(self):
        if not self._propagate():
            return None
        best = None
        for i, entry in enumerate(self.pending):
            if entry[3]:
                continue
            g, env, value, _, _ = entry
            if isinstance(g, (sat.Exists, sat.Forall)):
                best = (0, i)
                break
            if best is None:
                best = (1, i)
        if best is None:
            return self._extract()
        i = best[1]
        g, env, value, _, _ = self.pending[i]
        self._mark_done(i)
        for option in self._options(g, env, value):
            mark = self._mark()
            if self._require(*option):
                out = self._dfs()
                if out is not None:
                    return out
            self._undo(mark)
        return None

    def _extract(self):
        domain = tuple(range(self.k))
        binrel = frozenset(
            (a, b) for a in domain for b in domain if self.rel[a][b] == _T
        )
        unary = {p: frozenset(e for e in domain if vs[e] == _T) for p, vs in self.unary.items()}
        return sat.FOStructure(domain, binrel, unary, dict(self.consts))


def brute_fo_sat(alpha: sat.FOFormula, frame: str, max_elems: int):
    """First structure (smallest domain) satisfying the FO sentence, or None.

    Backtracks over undecided atoms with frame propagation; sound and
    complete within the bound.
    """
    fv = sat.fo_free_vars(alpha)
    if fv:
        raise ValueError(f"not a sentence, free: {sorted(fv)}")
    consts = sorted(sat.fo_constants(alpha))
    for k in range(1, max_elems + 1):
        if frame in ("any", "transitive", "complete"):
            presets = [None]
        elif frame == "linear":
            presets = []
            for perm in permutations(range(k)):
                rel = [[False] * k for _ in range(k)]
                for i in range(k):
                    for j in range(i + 1, k):
                        rel[perm[i]][perm[j]] = True
                presets.append(rel)
        elif frame == "transitive-tree":
            presets = [arr.tolist() for arr in _transitive_tree_frames(k)]
        else:
            raise ValueError(f"unknown frame class {frame!r}")
        for preset in presets:
            for assignment in product(range(k), repeat=len(consts)):
                searcher = _FOSearch(alpha, k, frame, rel_fixed=preset)
                searcher.consts = dict(zip(consts, assignment))
                out = searcher.search()
                if out is not None:
                    return FOFound(out)
    return None
