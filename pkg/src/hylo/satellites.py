"""First-order fragment and PDL over sibling-ordered trees.

These are the targets and sources of the logic-to-logic translations: a
small FO AST with a Tarskian evaluator over finite structures, and a PDL
AST with the relational program semantics over finite ordered trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product


# ---------------------------------------------------------------------------
# First-order formulas over one binary relation, unary predicates, equality


@dataclass(frozen=True)
class FOTerm:
    pass


@dataclass(frozen=True)
class FOVar(FOTerm):
    name: str


@dataclass(frozen=True)
class FOConst(FOTerm):
    name: str


@dataclass(frozen=True)
class FOFormula:
    def __str__(self):
        return fo_to_text(self)


@dataclass(frozen=True)
class FOTrue(FOFormula):
    pass


@dataclass(frozen=True)
class FOFalse(FOFormula):
    pass


@dataclass(frozen=True)
class Rel(FOFormula):
    left: FOTerm
    right: FOTerm


@dataclass(frozen=True)
class RelPlus(FOFormula):
    """Transitive-closure atom; evaluated against the closure of the relation."""

    left: FOTerm
    right: FOTerm


@dataclass(frozen=True)
class Eq(FOFormula):
    left: FOTerm
    right: FOTerm


@dataclass(frozen=True)
class Pred(FOFormula):
    name: str
    term: FOTerm


@dataclass(frozen=True)
class FONot(FOFormula):
    body: FOFormula


@dataclass(frozen=True)
class FOAnd(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOOr(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOImplies(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    body: FOFormula


def fo_children(f: FOFormula) -> tuple[FOFormula, ...]:
    if isinstance(f, (FOTrue, FOFalse, Rel, RelPlus, Eq, Pred)):
        return ()
    if isinstance(f, FONot):
        return (f.body,)
    if isinstance(f, (FOAnd, FOOr, FOImplies)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    raise TypeError(f"not an FO node: {f!r}")


def fo_subformulas(f: FOFormula):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(fo_children(g)))


def fo_free_vars(f: FOFormula) -> frozenset[str]:
    def term_vars(t):
        return {t.name} if isinstance(t, FOVar) else set()

    def rec(g, bound):
        if isinstance(g, (Rel, RelPlus, Eq)):
            return (term_vars(g.left) | term_vars(g.right)) - bound
        if isinstance(g, Pred):
            return term_vars(g.term) - bound
        if isinstance(g, (FOTrue, FOFalse)):
            return set()
        if isinstance(g, (Exists, Forall)):
            return rec(g.body, bound | {g.var})
        out = set()
        for c in fo_children(g):
            out |= rec(c, bound)
        return out

    return frozenset(rec(f, frozenset()))


def fo_constants(f: FOFormula) -> frozenset[str]:
    out = set()
    for g in fo_subformulas(f):
        terms = ()
        if isinstance(g, (Rel, RelPlus, Eq)):
            terms = (g.left, g.right)
        elif isinstance(g, Pred):
            terms = (g.term,)
        out.update(t.name for t in terms if isinstance(t, FOConst))
    return frozenset(out)


def fo_preds(f: FOFormula) -> frozenset[str]:
    return frozenset(g.name for g in fo_subformulas(f) if isinstance(g, Pred))


def is_all_u1(f: FOFormula, max_unary: int | None = None) -> bool:
    """Membership in [all,(u,1)]: one binary relation, unary preds, no equality."""
    for g in fo_subformulas(f):
        if isinstance(g, (Eq, RelPlus)):
            return False
    if max_unary is not None and len(fo_preds(f)) > max_unary:
        return False
    return True


def is_mc_eq(f: FOFormula) -> bool:
    """Membership in the monadic class with equality: no binary relation."""
    return not any(isinstance(g, (Rel, RelPlus)) for g in fo_subformulas(f))


@dataclass(frozen=True)
class FOStructure:
    domain: tuple
    binrel: frozenset
    unary: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "binrel", frozenset(tuple(e) for e in self.binrel))
        object.__setattr__(self, "unary", {k: frozenset(v) for k, v in self.unary.items()})
        object.__setattr__(self, "constants", dict(self.constants))
        known = set(self.domain)
        for a, b in self.binrel:
            if a not in known or b not in known:
                raise ValueError(f"relation pair ({a}, {b}) outside domain")
        for name, elems in self.unary.items():
            if elems - known:
                raise ValueError(f"predicate {name!r} outside domain")
        for name, e in self.constants.items():
            if e not in known:
                raise ValueError(f"constant {name!r} outside domain")


class FOEvalError(ValueError):
    pass


def fo_eval(s: FOStructure, env: dict, alpha: FOFormula) -> bool:
    """Classical truth over a finite structure."""

    def closure():
        out = set(s.binrel)
        changed = True
        while changed:
            changed = False
            new = {(a, d) for a, b in out for c, d in out if b == c and (a, d) not in out}
            if new:
                out |= new
                changed = True
        return out

    plus = None

    def term(t, env):
        if isinstance(t, FOVar):
            if t.name not in env:
                raise FOEvalError(f"unbound variable {t.name!r}")
            return env[t.name]
        if t.name not in s.constants:
            raise FOEvalError(f"unbound constant {t.name!r}")
        return s.constants[t.name]

    def rec(g, env):
        nonlocal plus
        if isinstance(g, FOTrue):
            return True
        if isinstance(g, FOFalse):
            return False
        if isinstance(g, Rel):
            return (term(g.left, env), term(g.right, env)) in s.binrel
        if isinstance(g, RelPlus):
            if plus is None:
                plus = closure()
            return (term(g.left, env), term(g.right, env)) in plus
        if isinstance(g, Eq):
            return term(g.left, env) == term(g.right, env)
        if isinstance(g, Pred):
            return term(g.term, env) in s.unary.get(g.name, frozenset())
        if isinstance(g, FONot):
            return not rec(g.body, env)
        if isinstance(g, FOAnd):
            return rec(g.left, env) and rec(g.right, env)
        if isinstance(g, FOOr):
            return rec(g.left, env) or rec(g.right, env)
        if isinstance(g, FOImplies):
            return not rec(g.left, env) or rec(g.right, env)
        if isinstance(g, Exists):
            return any(rec(g.body, {**env, g.var: d}) for d in s.domain)
        if isinstance(g, Forall):
            return all(rec(g.body, {**env, g.var: d}) for d in s.domain)
        raise TypeError(f"not an FO node: {g!r}")

    return rec(alpha, dict(env))


def string_structure(word) -> FOStructure:
    """A word as the structure ({1..n}, <, letter predicates)."""
    word = list(word)
    if not word:
        raise ValueError("empty word")
    n = len(word)
    domain = tuple(range(1, n + 1))
    binrel = frozenset((i, j) for i in domain for j in domain if i < j)
    unary: dict[str, set] = {}
    for pos, letter in enumerate(word, start=1):
        unary.setdefault(letter, set()).add(pos)
    return FOStructure(domain, binrel, {k: frozenset(v) for k, v in unary.items()})


# -- FO concrete syntax -----------------------------------------------------
# quantifiers "E x." / "A x."; atoms R(x,y), R+(x,y), P(x), x=y, x<y;
# connectives ~ & | ->; free names parse as constants.

_FO_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<implies>->)
  | (?P<plus>R\+\s*\()
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)
  | (?P<punct>[()~&|=<,.])
    """,
    re.VERBOSE,
)


class FOParseError(ValueError):
    pass


class _FOParser:
    def __init__(self, text):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _FO_TOKEN_RE.match(text, pos)
            if not m:
                raise FOParseError(f"unexpected character {text[pos]!r} at {pos}")
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group().strip()))
            pos = m.end()
        self.toks.append(("eof", ""))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, got = self.next()
        if got != value:
            raise FOParseError(f"expected {value!r}, found {got!r}")

    def formula(self):
        left = self.or_level()
        if self.peek()[1] == "->":
            self.next()
            return FOImplies(left, self.formula())
        return left

    def or_level(self):
        left = self.and_level()
        while self.peek()[1] == "|":
            self.next()
            left = FOOr(left, self.and_level())
        return left

    def and_level(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = FOAnd(left, self.unary())
        return left

    def term_name(self):
        kind, value = self.next()
        if kind != "ident":
            raise FOParseError(f"expected a term, found {value!r}")
        return value

    def unary(self):
        kind, value = self.peek()
        if value == "~":
            self.next()
            return FONot(self.unary())
        if value == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "plus":
            self.next()
            a = self.term_name()
            self.expect(",")
            b = self.term_name()
            self.expect(")")
            return RelPlus(FOVar(a), FOVar(b))
        if kind == "ident":
            if value in ("E", "A") and self.toks[self.i + 1][0] == "ident":
                self.next()
                var = self.term_name()
                self.expect(".")
                cls = Exists if value == "E" else Forall
                return cls(var, self.formula())
            if value == "true":
                self.next()
                return FOTrue()
            if value == "false":
                self.next()
                return FOFalse()
            name = self.term_name()
            kind2, value2 = self.peek()
            if value2 == "(":
                self.next()
                a = self.term_name()
                if self.peek()[1] == ",":
                    self.next()
                    b = self.term_name()
                    self.expect(")")
                    if name != "R":
                        raise FOParseError(f"unknown binary relation {name!r}")
                    return Rel(FOVar(a), FOVar(b))
                self.expect(")")
                return Pred(name, FOVar(a))
            if value2 == "=":
                self.next()
                other = self.term_name()
                return Eq(FOVar(name), FOVar(other))
            if value2 == "<":
                self.next()
                other = self.term_name()
                return Rel(FOVar(name), FOVar(other))
            raise FOParseError(f"dangling term {name!r}")
        raise FOParseError(f"expected an FO formula, found {value!r}")


def _bind_constants(f: FOFormula, bound: frozenset) -> FOFormula:
    """Free occurrences are constants; bound ones stay variables."""

    def fix_term(t, bound):
        if isinstance(t, FOVar) and t.name not in bound:
            return FOConst(t.name)
        return t

    def rec(g, bound):
        if isinstance(g, Rel):
            return Rel(fix_term(g.left, bound), fix_term(g.right, bound))
        if isinstance(g, RelPlus):
            return RelPlus(fix_term(g.left, bound), fix_term(g.right, bound))
        if isinstance(g, Eq):
            return Eq(fix_term(g.left, bound), fix_term(g.right, bound))
        if isinstance(g, Pred):
            return Pred(g.name, fix_term(g.term, bound))
        if isinstance(g, (FOTrue, FOFalse)):
            return g
        if isinstance(g, FONot):
            return FONot(rec(g.body, bound))
        if isinstance(g, (FOAnd, FOOr, FOImplies)):
            return type(g)(rec(g.left, bound), rec(g.right, bound))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, rec(g.body, bound | {g.var}))
        raise TypeError(f"not an FO node: {g!r}")

    return rec(f, bound)


def parse_fo(text: str) -> FOFormula:
    parser = _FOParser(text)
    f = parser.formula()
    if parser.peek()[0] != "eof":
        raise FOParseError(f"trailing input {parser.peek()[1]!r}")
    return _bind_constants(f, frozenset())


def fo_to_text(f: FOFormula, rplus_as_lfp: bool = False) -> str:
    """Concrete FO syntax; with rplus_as_lfp closure atoms print as their
    least-fixed-point form instead of the primitive R+ symbol."""

    def term(t):
        return t.name

    def rec(g, floor):
        if isinstance(g, FOTrue):
            return "true"
        if isinstance(g, FOFalse):
            return "false"
        if isinstance(g, Rel):
            return f"R({term(g.left)},{term(g.right)})"
        if isinstance(g, RelPlus):
            a, b = term(g.left), term(g.right)
            if rplus_as_lfp:
                return f"[LFP W({a},{b}). (R({a},{b}) | E z. (R(z,{b}) & W({a},z)))]({a},{b})"
            return f"R+({a},{b})"
        if isinstance(g, Eq):
            return f"{term(g.left)}={term(g.right)}"
        if isinstance(g, Pred):
            return f"{g.name}({term(g.term)})"
        if isinstance(g, FONot):
            return "~" + rec(g.body, 4)
        if isinstance(g, FOAnd):
            text = rec(g.left, 3) + " & " + rec(g.right, 4)
            return f"({text})" if floor > 3 else text
        if isinstance(g, FOOr):
            text = rec(g.left, 2) + " | " + rec(g.right, 3)
            return f"({text})" if floor > 2 else text
        if isinstance(g, FOImplies):
            text = rec(g.left, 2) + " -> " + rec(g.right, 1)
            return f"({text})" if floor > 1 else text
        if isinstance(g, (Exists, Forall)):
            q = "E" if isinstance(g, Exists) else "A"
            text = f"{q} {g.var}. " + rec(g.body, 0)
            return f"({text})" if floor > 0 else text
        raise TypeError(f"not an FO node: {g!r}")

    return rec(f, 0)


# ---------------------------------------------------------------------------
# PDL over finite sibling-ordered trees


@dataclass(frozen=True)
class PdlProgram:
    def __str__(self):
        return pdl_prog_to_text(self)


@dataclass(frozen=True)
class Left(PdlProgram):
    pass


@dataclass(frozen=True)
class Right(PdlProgram):
    pass


@dataclass(frozen=True)
class Up(PdlProgram):
    pass


@dataclass(frozen=True)
class DownP(PdlProgram):
    pass


@dataclass(frozen=True)
class Seq(PdlProgram):
    first: PdlProgram
    second: PdlProgram


@dataclass(frozen=True)
class Choice(PdlProgram):
    left: PdlProgram
    right: PdlProgram


@dataclass(frozen=True)
class Star(PdlProgram):
    body: PdlProgram


@dataclass(frozen=True)
class Test(PdlProgram):
    __test__ = False  # not a pytest case

    formula: "PdlFormula"


@dataclass(frozen=True)
class PdlFormula:
    def __str__(self):
        return pdl_to_text(self)


@dataclass(frozen=True)
class PdlAtom(PdlFormula):
    name: str


@dataclass(frozen=True)
class PdlNot(PdlFormula):
    body: PdlFormula


@dataclass(frozen=True)
class PdlAnd(PdlFormula):
    left: PdlFormula
    right: PdlFormula


@dataclass(frozen=True)
class PdlDiamond(PdlFormula):
    program: PdlProgram
    body: PdlFormula


def pdl_box(program: PdlProgram, body: PdlFormula) -> PdlFormula:
    """Derived [pi]phi := ~<pi>~phi."""
    return PdlNot(PdlDiamond(program, PdlNot(body)))


def plus_prog(a: PdlProgram) -> PdlProgram:
    """Derived a+ := a;a*."""
    return Seq(a, Star(a))


def pdl_false() -> PdlFormula:
    return PdlAnd(PdlAtom("_t"), PdlNot(PdlAtom("_t")))


def pdl_true() -> PdlFormula:
    return PdlNot(pdl_false())


@dataclass(frozen=True)
class SiblingTree:
    """Finite tree with ordered children and atom labels."""

    nodes: tuple
    parent: dict
    children: dict
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "children", {n: tuple(cs) for n, cs in self.children.items()})
        object.__setattr__(self, "labels", {a: frozenset(ns) for a, ns in self.labels.items()})
        roots = [n for n in self.nodes if self.parent.get(n) is None]
        if len(roots) != 1:
            raise ValueError("tree must have exactly one root")
        known = set(self.nodes)
        for n, cs in self.children.items():
            for c in cs:
                if self.parent.get(c) != n:
                    raise ValueError("children/parent mismatch")
                if c not in known:
                    raise ValueError(f"unknown child {c!r}")
        for a, ns in self.labels.items():
            if ns - known:
                raise ValueError(f"label {a!r} outside tree")

    @property
    def root(self):
        return next(n for n in self.nodes if self.parent.get(n) is None)


class _PdlEvaluator:
    def __init__(self, tree: SiblingTree):
        self.t = tree
        down = set()
        right = set()
        for n in tree.nodes:
            cs = tree.children.get(n, ())
            for c in cs:
                down.add((n, c))
            for a, b in zip(cs, cs[1:]):
                right.add((a, b))
        self.base = {
            DownP(): frozenset(down),
            Up(): frozenset((b, a) for a, b in down),
            Right(): frozenset(right),
            Left(): frozenset((b, a) for a, b in right),
        }
        self.prog_cache = {}
        self.sat_cache = {}

    def rel(self, prog):
        if prog in self.prog_cache:
            return self.prog_cache[prog]
        if isinstance(prog, (DownP, Up, Right, Left)):
            out = self.base[prog]
        elif isinstance(prog, Seq):
            r1, r2 = self.rel(prog.first), self.rel(prog.second)
            out = frozenset((a, d) for a, b in r1 for c, d in r2 if b == c)
        elif isinstance(prog, Choice):
            out = self.rel(prog.left) | self.rel(prog.right)
        elif isinstance(prog, Star):
            r = self.rel(prog.body)
            out = {(n, n) for n in self.t.nodes}
            changed = True
            while changed:
                changed = False
                new = {(a, d) for a, b in out for c, d in r if b == c and (a, d) not in out}
                if new:
                    out |= new
                    changed = True
            out = frozenset(out)
        elif isinstance(prog, Test):
            out = frozenset((n, n) for n in self.t.nodes if self.holds(n, prog.formula))
        else:
            raise TypeError(f"not a PDL program: {prog!r}")
        self.prog_cache[prog] = out
        return out

    def holds(self, node, f):
        key = (node, f)
        hit = self.sat_cache.get(key)
        if hit is not None:
            return hit
        if isinstance(f, PdlAtom):
            out = node in self.t.labels.get(f.name, frozenset())
        elif isinstance(f, PdlNot):
            out = not self.holds(node, f.body)
        elif isinstance(f, PdlAnd):
            out = self.holds(node, f.left) and self.holds(node, f.right)
        elif isinstance(f, PdlDiamond):
            out = any(self.holds(b, f.body) for a, b in self.rel(f.program) if a == node)
        else:
            raise TypeError(f"not a PDL formula: {f!r}")
        self.sat_cache[key] = out
        return out


def pdl_eval(tree: SiblingTree, node, f: PdlFormula) -> bool:
    if node not in set(tree.nodes):
        raise ValueError(f"unknown node {node!r}")
    return _PdlEvaluator(tree).holds(node, f)


def pdl_program_relation(tree: SiblingTree, prog: PdlProgram) -> frozenset:
    return _PdlEvaluator(tree).rel(prog)


def _ordered_shapes(n):
    """Ordered (plane) tree shapes with exactly n nodes, as nested tuples."""
    if n == 1:
        return [()]
    out = []
    for split in _compositions(n - 1):
        for combo in product(*[_ordered_shapes(k) for k in split]):
            out.append(tuple(combo))
    return out


def _compositions(n):
    if n == 0:
        return [()]
    out = []
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            out.append((first,) + rest)
    return out


def _shape_to_tree(shape, labels, atoms):
    nodes = []
    parent = {}
    children = {}

    def build(sub, parent_id):
        my = f"n{len(nodes)}"
        nodes.append(my)
        parent[my] = parent_id
        children[my] = ()
        kids = []
        for s in sub:
            kids.append(build(s, my))
        children[my] = tuple(kids)
        return my

    build(shape, None)
    lab = {a: frozenset(n for k, n in enumerate(nodes) if labels[i * len(nodes) + k]) for i, a in enumerate(atoms)}
    return SiblingTree(tuple(nodes), parent, children, lab)


def enumerate_trees(n: int, atoms=()):
    """All ordered trees with up to n nodes and all labelings over atoms."""
    atoms = tuple(atoms)
    for k in range(1, n + 1):
        for shape in _ordered_shapes(k):
            for bits in range(2 ** (k * len(atoms))):
                labels = [(bits >> j) & 1 for j in range(k * len(atoms))]
                yield _shape_to_tree(shape, labels, atoms)


# -- PDL concrete syntax ----------------------------------------------------
# formulas: atoms, ~f, f & g, <prog>f, parentheses
# programs: left right up down, p;q, p|q, p*, p+, ?(f)


def pdl_to_text(f: PdlFormula) -> str:
    if isinstance(f, PdlAtom):
        return f.name
    if isinstance(f, PdlNot):
        return "~" + _pdl_unary_text(f.body)
    if isinstance(f, PdlAnd):
        return f"{_pdl_unary_text(f.left)} & {_pdl_unary_text(f.right)}"
    if isinstance(f, PdlDiamond):
        return f"<{pdl_prog_to_text(f.program)}>{_pdl_unary_text(f.body)}"
    raise TypeError(f"not a PDL formula: {f!r}")


def _pdl_unary_text(f):
    text = pdl_to_text(f)
    return f"({text})" if isinstance(f, PdlAnd) else text


def pdl_prog_to_text(p: PdlProgram) -> str:
    if isinstance(p, Left):
        return "left"
    if isinstance(p, Right):
        return "right"
    if isinstance(p, Up):
        return "up"
    if isinstance(p, DownP):
        return "down"
    if isinstance(p, Seq):
        return f"{_seq_part(p.first)};{_seq_part(p.second)}"
    if isinstance(p, Choice):
        return f"{pdl_prog_to_text(p.left)} | {pdl_prog_to_text(p.right)}"
    if isinstance(p, Star):
        return _star_part(p.body) + "*"
    if isinstance(p, Test):
        return f"?({pdl_to_text(p.formula)})"
    raise TypeError(f"not a PDL program: {p!r}")


def _seq_part(p):
    text = pdl_prog_to_text(p)
    return f"({text})" if isinstance(p, Choice) else text


def _star_part(p):
    text = pdl_prog_to_text(p)
    return f"({text})" if isinstance(p, (Seq, Choice)) else text


class PdlParseError(ValueError):
    pass


_PDL_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<punct>[()<>~&;|*+?])"
)


class _PdlParser:
    def __init__(self, text):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _PDL_TOKEN_RE.match(text, pos)
            if not m:
                raise PdlParseError(f"unexpected character {text[pos]!r} at {pos}")
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group()))
            pos = m.end()
        self.toks.append(("eof", ""))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, got = self.next()
        if got != value:
            raise PdlParseError(f"expected {value!r}, found {got!r}")

    def formula(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = PdlAnd(left, self.unary())
        return left

    def unary(self):
        kind, value = self.peek()
        if value == "~":
            self.next()
            return PdlNot(self.unary())
        if value == "<":
            self.next()
            prog = self.program()
            self.expect(">")
            return PdlDiamond(prog, self.unary())
        if value == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "ident":
            self.next()
            return PdlAtom(value)
        raise PdlParseError(f"expected a PDL formula, found {value!r}")

    def program(self):
        left = self.seq()
        while self.peek()[1] == "|":
            self.next()
            left = Choice(left, self.seq())
        return left

    def seq(self):
        left = self.postfix()
        while self.peek()[1] == ";":
            self.next()
            left = Seq(left, self.postfix())
        return left

    def postfix(self):
        base = self.prog_base()
        while self.peek()[1] in ("*", "+"):
            op = self.next()[1]
            base = Star(base) if op == "*" else plus_prog(base)
        return base

    def prog_base(self):
        kind, value = self.peek()
        if value == "(":
            self.next()
            p = self.program()
            self.expect(")")
            return p
        if value == "?":
            self.next()
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return Test(f)
        if kind == "ident" and value in ("left", "right", "up", "down"):
            self.next()
            return {"left": Left(), "right": Right(), "up": Up(), "down": DownP()}[value]
        raise PdlParseError(f"expected a program, found {value!r}")


def parse_pdl(text: str) -> PdlFormula:
    parser = _PdlParser(text)
    f = parser.formula()
    if parser.peek()[0] != "eof":
        raise PdlParseError(f"trailing input {parser.peek()[1]!r}")
    return f


# -- tree / structure file formats (mirror the model format) ----------------

_TREE_KEYS = {"nodes", "parent", "children", "labels"}


def tree_from_dict(doc: dict) -> SiblingTree:
    unknown = set(doc) - _TREE_KEYS
    if unknown:
        raise ValueError(f"unknown keys in tree document: {sorted(unknown)}")
    return SiblingTree(
        tuple(doc["nodes"]),
        {n: doc.get("parent", {}).get(n) for n in doc["nodes"]},
        {n: tuple(cs) for n, cs in doc.get("children", {}).items()},
        {a: frozenset(ns) for a, ns in doc.get("labels", {}).items()},
    )


def tree_to_dict(t: SiblingTree) -> dict:
    return {
        "nodes": list(t.nodes),
        "parent": {n: p for n, p in t.parent.items() if p is not None},
        "children": {n: list(cs) for n, cs in t.children.items()},
        "labels": {a: sorted(ns) for a, ns in sorted(t.labels.items())},
    }
