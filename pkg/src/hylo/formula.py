"""AST, concrete syntax, and structural operations for the hybrid language.

Atoms come in three kinds, told apart by their sigil in concrete syntax:
bare identifiers are propositions, a leading apostrophe marks a nominal
(``'i``), a leading dollar marks a state variable (``$x``).  Identifiers
starting with an underscore are reserved for internally generated names and
are rejected by the parser unless ``allow_reserved`` is set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

PROP = "prop"
NOM = "nom"
SVAR = "var"

RESERVED_WORDS = frozenset(
    ["true", "false", "down", "U", "S", "F", "G", "P", "H", "E", "A"]
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ParseError(ValueError):
    """Syntax error, carrying 1-based line/column of the offending token."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class FragmentError(ValueError):
    """Raised when a formula lies outside the fragment an operation expects."""


@dataclass(frozen=True)
class Formula:
    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in (PROP, NOM, SVAR):
            raise ValueError(f"bad atom kind: {self.kind!r}")
        if not _IDENT_RE.fullmatch(self.name):
            raise ValueError(f"bad atom name: {self.name!r}")


def prop(name: str) -> Atom:
    return Atom(PROP, name)


def nom(name: str) -> Atom:
    return Atom(NOM, name)


def svar(name: str) -> Atom:
    return Atom(SVAR, name)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class Future(Formula):
    """Forward modality F; evaluates exactly like Diamond, prints as F."""

    body: Formula


@dataclass(frozen=True)
class Globally(Formula):
    body: Formula


@dataclass(frozen=True)
class Past(Formula):
    body: Formula


@dataclass(frozen=True)
class Historically(Formula):
    body: Formula


@dataclass(frozen=True)
class Somewhere(Formula):
    """The global existential modality E."""

    body: Formula


@dataclass(frozen=True)
class Everywhere(Formula):
    body: Formula


@dataclass(frozen=True)
class At(Formula):
    term: Atom
    body: Formula

    def __post_init__(self):
        if self.term.kind == PROP:
            raise ValueError("at-term must be a nominal or state variable")


@dataclass(frozen=True)
class Down(Formula):
    var: Atom
    body: Formula

    def __post_init__(self):
        if self.var.kind != SVAR:
            raise ValueError("down binds a state variable")


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Since(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class UntilPlus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class SincePlus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class UntilPlusPlus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class SincePlusPlus(Formula):
    left: Formula
    right: Formula


_UNARY = (Not, Diamond, Box, Future, Globally, Past, Historically, Somewhere, Everywhere)
_BINARY = (And, Or, Implies, Iff, Until, Since, UntilPlus, SincePlus, UntilPlusPlus, SincePlusPlus)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Top, Bot)):
        return ()
    if isinstance(f, _UNARY):
        return (f.body,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, At):
        return (f.body,)
    if isinstance(f, Down):
        return (f.body,)
    raise TypeError(f"not a formula node: {f!r}")


def subformulas(f: Formula):
    """Yield f and every subformula, preorder."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def atoms_of(f: Formula) -> frozenset[Atom]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.add(g)
        elif isinstance(g, At):
            out.add(g.term)
        elif isinstance(g, Down):
            out.add(g.var)
    return frozenset(out)


def props_of(f: Formula) -> tuple[str, ...]:
    return tuple(sorted(a.name for a in atoms_of(f) if a.kind == PROP))


def noms_of(f: Formula) -> tuple[str, ...]:
    return tuple(sorted(a.name for a in atoms_of(f) if a.kind == NOM))


def svars_of(f: Formula) -> tuple[str, ...]:
    return tuple(sorted(a.name for a in atoms_of(f) if a.kind == SVAR))


def free_vars(f: Formula) -> frozenset[str]:
    """State variables with an occurrence not under a matching down binder."""

    def rec(g, bound):
        if isinstance(g, Atom):
            return {g.name} - bound if g.kind == SVAR else set()
        if isinstance(g, At):
            out = rec(g.body, bound)
            if g.term.kind == SVAR and g.term.name not in bound:
                out = out | {g.term.name}
            return out
        if isinstance(g, Down):
            return rec(g.body, bound | {g.var.name})
        out = set()
        for c in children(g):
            out |= rec(c, bound)
        return out

    return frozenset(rec(f, frozenset()))


def strip_free(f: Formula) -> Formula:
    """Replace every free state-variable occurrence by false.

    An at-formula whose term is a free variable collapses to false as a
    whole, which is the substitution's image under @_t phi == E(t & phi).
    """

    def rec(g, bound):
        if isinstance(g, Atom):
            if g.kind == SVAR and g.name not in bound:
                return Bot()
            return g
        if isinstance(g, (Top, Bot)):
            return g
        if isinstance(g, At):
            if g.term.kind == SVAR and g.term.name not in bound:
                return Bot()
            return At(g.term, rec(g.body, bound))
        if isinstance(g, Down):
            return Down(g.var, rec(g.body, bound | {g.var.name}))
        if isinstance(g, _UNARY):
            return type(g)(rec(g.body, bound))
        return type(g)(rec(g.left, bound), rec(g.right, bound))

    return rec(f, frozenset())


_HLD_NODES = (Atom, Top, Bot, Not, And, Or, Implies, Iff, Diamond, Box, Down)


def check_hld(f: Formula) -> None:
    """Reject formulas outside HL-down (atoms, Booleans, diamond/box, down)."""
    for g in subformulas(f):
        if not isinstance(g, _HLD_NODES):
            raise FragmentError(
                f"operator {type(g).__name__} is outside the down-fragment"
            )


def diamond_closure(phi: Formula) -> frozenset[Formula]:
    """Closure sentences of phi: strip_free(body) for each diamond subformula.

    Box contributes through its not-diamond-not reading, i.e. box(psi)
    contributes strip_free(not(psi)).
    """
    check_hld(phi)
    out = set()
    for g in subformulas(phi):
        if isinstance(g, Diamond):
            out.add(strip_free(g.body))
        elif isinstance(g, Box):
            out.add(strip_free(Not(g.body)))
    return frozenset(out)


def modal_depth_count(f: Formula) -> int:
    """Number of diamond/box occurrences (bounds the closure cardinality)."""
    return sum(1 for g in subformulas(f) if isinstance(g, (Diamond, Box)))


def fragment_of(f: Formula) -> str:
    """Smallest language label containing all operators of f.

    Labels mirror the usual naming scheme: ML, ML_U, HL, "HL^E_{U,S}" and
    so on; the down arrow is spelled with its unicode glyph.
    """
    has_nom = has_svar = has_at = has_e = False
    tense = False
    us = ups = upps = False
    u_only = True
    for g in subformulas(f):
        if isinstance(g, Atom):
            has_nom |= g.kind == NOM
            has_svar |= g.kind == SVAR
        elif isinstance(g, At):
            has_at = True
            has_nom |= g.term.kind == NOM
            has_svar |= g.term.kind == SVAR
        elif isinstance(g, Down):
            has_svar = True
        elif isinstance(g, (Somewhere, Everywhere)):
            has_e = True
        elif isinstance(g, (Future, Globally, Past, Historically)):
            tense = True
        elif isinstance(g, (Until, Since)):
            us = True
            u_only &= isinstance(g, Until)
        elif isinstance(g, (UntilPlus, SincePlus)):
            ups = True
        elif isinstance(g, (UntilPlusPlus, SincePlusPlus)):
            upps = True
    hybrid = has_nom or has_svar or has_at or has_e
    base = "HL" if hybrid else "ML"
    sup = ""
    if has_svar:
        sup += "↓"
    if has_at:
        sup += ("," if sup else "^") + "@"
    if has_e:
        sup += ("," if sup else "^") + "E"
    subs = []
    if tense:
        subs += ["F", "P"]
    if us:
        if not hybrid and u_only and not ups and not upps:
            subs += ["U"]
        else:
            subs += ["U", "S"]
    if ups:
        subs += ["U+", "S+"]
    if upps:
        subs += ["U++", "S++"]
    if not subs:
        return base + sup
    if len(subs) == 1:
        return f"{base}{sup}_{subs[0]}"
    return f"{base}{sup}_{{{','.join(subs)}}}"


def recode_nominals(f: Formula, prefix: str = "_n_") -> Formula:
    """Rewrite every nominal atom into a reserved-namespace proposition."""

    def rec(g):
        if isinstance(g, Atom):
            if g.kind == NOM:
                return Atom(PROP, prefix + g.name)
            return g
        if isinstance(g, (Top, Bot)):
            return g
        if isinstance(g, At):
            return At(g.term, rec(g.body))
        if isinstance(g, Down):
            return Down(g.var, rec(g.body))
        if isinstance(g, _UNARY):
            return type(g)(rec(g.body))
        return type(g)(rec(g.left), rec(g.right))

    return rec(f)


def fresh_svars(count: int, *formulas: Formula) -> list[Atom]:
    """Reserved-namespace state variables not occurring in the given formulas."""
    used = set()
    for f in formulas:
        used.update(a.name for a in atoms_of(f))
    out = []
    i = 0
    while len(out) < count:
        name = f"_g{i}"
        if name not in used:
            out.append(Atom(SVAR, name))
        i += 1
    return out


# ---------------------------------------------------------------------------
# Lexer / parser


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<implies>->)
  | (?P<diamond><>)
  | (?P<box>\[\])
  | (?P<nomtok>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<svartok>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()&|~@+,.])
    """,
    re.VERBOSE,
)


def _tokenize(text, allow_reserved):
    line, col = 1, 1
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind in ("nomtok", "svartok", "ident"):
                bare = value.lstrip("'$")
                if bare.startswith("_") and not allow_reserved:
                    raise ParseError(
                        f"identifier {value!r} uses the reserved namespace", line, col
                    )
            toks.append((kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message):
        kind, value, line, col = self.peek()
        shown = value if kind != "eof" else "end of input"
        raise ParseError(f"{message} (found {shown!r})", line, col)

    def expect(self, value):
        kind, got, line, col = self.next()
        if got != value:
            raise ParseError(f"expected {value!r}, found {got!r}", line, col)

    def formula(self):
        left = self.implies_level()
        while self.peek()[1] == "<->":
            self.next()
            left = Iff(left, self.implies_level())
        return left

    def implies_level(self):
        left = self.or_level()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implies_level())
        return left

    def or_level(self):
        left = self.and_level()
        while self.peek()[1] == "|":
            self.next()
            left = Or(left, self.and_level())
        return left

    def and_level(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, value, line, col = self.peek()
        if value == "~":
            self.next()
            return Not(self.unary())
        if value == "<>":
            self.next()
            return Diamond(self.unary())
        if value == "[]":
            self.next()
            return Box(self.unary())
        if value == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if value == "@":
            self.next()
            tkind, tval, tline, tcol = self.next()
            if tkind == "nomtok":
                term = Atom(NOM, tval[1:])
            elif tkind == "svartok":
                term = Atom(SVAR, tval[1:])
            else:
                raise ParseError(
                    "at-term must be a nominal or state variable", tline, tcol
                )
            return At(term, self.unary())
        if kind == "nomtok":
            self.next()
            return Atom(NOM, value[1:])
        if kind == "svartok":
            self.next()
            return Atom(SVAR, value[1:])
        if kind == "ident":
            if value == "true":
                self.next()
                return Top()
            if value == "false":
                self.next()
                return Bot()
            if value == "down":
                self.next()
                vkind, vval, vline, vcol = self.next()
                if vkind != "svartok":
                    raise ParseError("down binds a state variable", vline, vcol)
                self.expect(".")
                return Down(Atom(SVAR, vval[1:]), self.formula())
            if value in ("U", "S"):
                self.next()
                plus = 0
                while plus < 2 and self.peek()[1] == "+":
                    self.next()
                    plus += 1
                cls = {
                    ("U", 0): Until,
                    ("U", 1): UntilPlus,
                    ("U", 2): UntilPlusPlus,
                    ("S", 0): Since,
                    ("S", 1): SincePlus,
                    ("S", 2): SincePlusPlus,
                }[(value, plus)]
                self.expect("(")
                left = self.formula()
                self.expect(",")
                right = self.formula()
                self.expect(")")
                return cls(left, right)
            if value in ("F", "G", "P", "H", "E", "A"):
                self.next()
                cls = {
                    "F": Future,
                    "G": Globally,
                    "P": Past,
                    "H": Historically,
                    "E": Somewhere,
                    "A": Everywhere,
                }[value]
                return cls(self.unary())
            self.next()
            return Atom(PROP, value)
        self.error("expected a formula")


def parse(text: str, allow_reserved: bool = False) -> Formula:
    """Parse concrete syntax into a Formula; raises ParseError with position."""
    parser = _Parser(_tokenize(text, allow_reserved))
    f = parser.formula()
    if parser.peek()[0] != "eof":
        parser.error("trailing input")
    return f


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}

_UNARY_TOKENS = {
    Not: "~",
    Diamond: "<>",
    Box: "[]",
    Future: "F ",
    Globally: "G ",
    Past: "P ",
    Historically: "H ",
    Somewhere: "E ",
    Everywhere: "A ",
}

_APP_TOKENS = {
    Until: "U",
    Since: "S",
    UntilPlus: "U+",
    SincePlus: "S+",
    UntilPlusPlus: "U++",
    SincePlusPlus: "S++",
}


def _atom_text(a: Atom) -> str:
    sigil = {PROP: "", NOM: "'", SVAR: "$"}[a.kind]
    return sigil + a.name


def print_formula(f: Formula) -> str:
    """Canonical concrete syntax; parse(print_formula(f)) == f structurally."""
    return _render(f, 0, False)


def _render(f, floor, trailing):
    # `trailing` marks positions that more tokens will follow at binary level;
    # a down binder there must be parenthesized since its body extends
    # maximally to the right.
    if isinstance(f, Atom):
        return _atom_text(f)
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if type(f) in _UNARY_TOKENS:
        return _UNARY_TOKENS[type(f)] + _render(f.body, 5, trailing)
    if type(f) in _APP_TOKENS:
        return f"{_APP_TOKENS[type(f)]}({_render(f.left, 0, False)}, {_render(f.right, 0, False)})"
    if isinstance(f, At):
        return f"@{_atom_text(f.term)} " + _render(f.body, 5, trailing)
    if isinstance(f, Down):
        body = f"down {_atom_text(f.var)} . " + _render(f.body, 0, False)
        return f"({body})" if trailing else body
    prec = _PREC[type(f)]
    wrapped = floor > prec
    inner_trailing = False if wrapped else trailing
    if isinstance(f, And):
        text = _render(f.left, 4, True) + " & " + _render(f.right, 5, inner_trailing)
    elif isinstance(f, Or):
        text = _render(f.left, 3, True) + " | " + _render(f.right, 4, inner_trailing)
    elif isinstance(f, Implies):
        text = _render(f.left, 3, True) + " -> " + _render(f.right, 2, inner_trailing)
    else:
        text = _render(f.left, 1, True) + " <-> " + _render(f.right, 2, inner_trailing)
    return f"({text})" if wrapped else text
