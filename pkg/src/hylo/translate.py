"""Logic-to-logic translations and reductions, as total functions on ASTs.

Fresh binders prefer the customary short names (x, y, i, v, s) and fall
back to the reserved underscore namespace whenever a name already occurs
in the input, so no translation captures a variable free in its input.
"""

from __future__ import annotations

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
    FragmentError,
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
    atoms_of,
    check_hld,
    subformulas,
    svar,
)
from . import satellites as sat

_UNARY_MAP = (Not, Diamond, Box, Future, Globally, Past, Historically, Somewhere, Everywhere)
_BINARY_MAP = (And, Or, Implies, Iff, Until, Since, UntilPlus, SincePlus, UntilPlusPlus, SincePlusPlus)


def map_formula(f: Formula, rewrite) -> Formula:
    """Bottom-up rewrite: children first, then the node itself."""
    if isinstance(f, (Atom, Top, Bot)):
        return rewrite(f)
    if isinstance(f, _UNARY_MAP):
        return rewrite(type(f)(map_formula(f.body, rewrite)))
    if isinstance(f, _BINARY_MAP):
        return rewrite(type(f)(map_formula(f.left, rewrite), map_formula(f.right, rewrite)))
    if isinstance(f, At):
        return rewrite(At(f.term, map_formula(f.body, rewrite)))
    if isinstance(f, Down):
        return rewrite(Down(f.var, map_formula(f.body, rewrite)))
    raise TypeError(f"not a formula node: {f!r}")


class _Names:
    """Fresh-name source seeded with every atom name of the inputs."""

    def __init__(self, *formulas):
        self.used = set()
        for f in formulas:
            self.used.update(a.name for a in atoms_of(f))
        self.counter = 0

    def svar(self, pretty):
        return Atom(SVAR, self._pick(pretty))

    def nom(self, pretty):
        return Atom(NOM, self._pick(pretty))

    def _pick(self, pretty):
        if pretty not in self.used:
            self.used.add(pretty)
            return pretty
        while True:
            name = f"_g{self.counter}"
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                return name


def _conj(parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _disj(parts):
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def _restrict(phi, allowed, label):
    for g in subformulas(phi):
        if not isinstance(g, allowed):
            raise FragmentError(
                f"operator {type(g).__name__} is outside {label}"
            )


# ---------------------------------------------------------------------------
# Until and Since through the binder


def until_via_down(phi: Formula, psi: Formula) -> Formula:
    """U(phi, psi) as down x. dia down y. (phi & @x [](dia y -> psi))."""
    names = _Names(phi, psi)
    x, y = names.svar("x"), names.svar("y")
    return Down(x, Diamond(Down(y, And(phi, At(x, Box(Implies(Diamond(y), psi)))))))


def until_via_down_tense(phi: Formula, psi: Formula) -> Formula:
    """U(phi, psi) as down x. F(phi & H(P x -> psi))."""
    names = _Names(phi, psi)
    x = names.svar("x")
    return Down(x, Future(And(phi, Historically(Implies(Past(x), psi)))))


def since_via_down_tense(phi: Formula, psi: Formula) -> Formula:
    """S(phi, psi) as down x. P(phi & G(F x -> psi))."""
    names = _Names(phi, psi)
    x = names.svar("x")
    return Down(x, Past(And(phi, Globally(Implies(Future(x), psi)))))


# ---------------------------------------------------------------------------
# Modal logic into the Until language, global satisfiability reduction


_ML_NODES = (Top, Bot, Not, And, Or, Implies, Iff, Diamond, Box)


def ml_to_until(phi: Formula) -> Formula:
    """Homomorphic image with dia phi mapped to U(phi, false)."""
    for g in subformulas(phi):
        if isinstance(g, Atom):
            if g.kind != PROP:
                raise FragmentError("pure modal input only")
        elif not isinstance(g, _ML_NODES):
            raise FragmentError(f"operator {type(g).__name__} is not modal")

    def rewrite(g):
        if isinstance(g, Diamond):
            return Until(g.body, Bot())
        if isinstance(g, Box):
            return Not(Until(Not(g.body), Bot()))
        return g

    return map_formula(phi, rewrite)


def globsat_reduction(phi: Formula) -> Formula:
    """f(phi) = phi^t & [] phi^t for the global satisfiability reduction."""
    t = ml_to_until(phi)
    return And(t, Box(t))


# ---------------------------------------------------------------------------
# U / U++ exchange


def u_to_upp(phi: Formula) -> Formula:
    def rewrite(g):
        if isinstance(g, Until):
            return UntilPlusPlus(g.left, g.right)
        if isinstance(g, Since):
            return SincePlusPlus(g.left, g.right)
        return g

    return map_formula(phi, rewrite)


def upp_to_u(phi: Formula) -> Formula:
    def rewrite(g):
        if isinstance(g, UntilPlusPlus):
            return Until(g.left, g.right)
        if isinstance(g, SincePlusPlus):
            return Since(g.left, g.right)
        return g

    return map_formula(phi, rewrite)


# ---------------------------------------------------------------------------
# Standard Translation into first-order logic


class _STContext:
    def __init__(self, phi, anchor):
        self.used = {a.name for a in atoms_of(phi)} | {anchor}
        self.counter = 0

    def fresh(self):
        while True:
            name = f"y{self.counter}"
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                return name


def _st_term(term):
    if term.kind == NOM:
        return sat.FOConst(term.name)
    return sat.FOVar(term.name)


def standard_translation(phi: Formula, anchor: str = "x", complete_frames: bool = False) -> sat.FOFormula:
    """ST over one binary relation; closure operators emit R-plus atoms.

    With complete_frames the diamond rule drops its relation guard, which
    is the monadic-class image used over complete frames.
    """
    if complete_frames:
        check_hld(phi)
    ctx = _STContext(phi, anchor)

    def rec(f, x):
        if isinstance(f, Atom):
            if f.kind == PROP:
                return sat.Pred(f.name, sat.FOVar(x))
            return sat.Eq(_st_term(f), sat.FOVar(x))
        if isinstance(f, Top):
            return sat.FOTrue()
        if isinstance(f, Bot):
            return sat.FOFalse()
        if isinstance(f, Not):
            return sat.FONot(rec(f.body, x))
        if isinstance(f, And):
            return sat.FOAnd(rec(f.left, x), rec(f.right, x))
        if isinstance(f, Or):
            return sat.FOOr(rec(f.left, x), rec(f.right, x))
        if isinstance(f, Implies):
            return sat.FOImplies(rec(f.left, x), rec(f.right, x))
        if isinstance(f, Iff):
            a, b = rec(f.left, x), rec(f.right, x)
            return sat.FOAnd(sat.FOImplies(a, b), sat.FOImplies(b, a))
        if isinstance(f, (Diamond, Future)):
            y = ctx.fresh()
            body = rec(f.body, y)
            if complete_frames:
                return sat.Exists(y, body)
            return sat.Exists(y, sat.FOAnd(sat.Rel(sat.FOVar(x), sat.FOVar(y)), body))
        if isinstance(f, (Box, Globally)):
            y = ctx.fresh()
            body = rec(f.body, y)
            if complete_frames:
                return sat.Forall(y, body)
            return sat.Forall(y, sat.FOImplies(sat.Rel(sat.FOVar(x), sat.FOVar(y)), body))
        if isinstance(f, Past):
            y = ctx.fresh()
            return sat.Exists(y, sat.FOAnd(sat.Rel(sat.FOVar(y), sat.FOVar(x)), rec(f.body, y)))
        if isinstance(f, Historically):
            y = ctx.fresh()
            return sat.Forall(y, sat.FOImplies(sat.Rel(sat.FOVar(y), sat.FOVar(x)), rec(f.body, y)))
        if isinstance(f, Somewhere):
            y = ctx.fresh()
            return sat.Exists(y, rec(f.body, y))
        if isinstance(f, Everywhere):
            y = ctx.fresh()
            return sat.Forall(y, rec(f.body, y))
        if isinstance(f, At):
            y = ctx.fresh()
            return sat.Exists(y, sat.FOAnd(sat.Eq(sat.FOVar(y), _st_term(f.term)), rec(f.body, y)))
        if isinstance(f, Down):
            v = f.var.name
            return sat.Exists(v, sat.FOAnd(sat.Eq(sat.FOVar(x), sat.FOVar(v)), rec(f.body, x)))
        if isinstance(f, (Until, UntilPlus, UntilPlusPlus)):
            y, z = ctx.fresh(), ctx.fresh()
            step = sat.RelPlus if isinstance(f, UntilPlusPlus) else sat.Rel
            guard = sat.Rel if isinstance(f, Until) else sat.RelPlus
            return sat.Exists(
                y,
                sat.FOAnd(
                    sat.FOAnd(step(sat.FOVar(x), sat.FOVar(y)), rec(f.left, y)),
                    sat.Forall(
                        z,
                        sat.FOImplies(
                            sat.FOAnd(guard(sat.FOVar(x), sat.FOVar(z)), guard(sat.FOVar(z), sat.FOVar(y))),
                            rec(f.right, z),
                        ),
                    ),
                ),
            )
        if isinstance(f, (Since, SincePlus, SincePlusPlus)):
            y, z = ctx.fresh(), ctx.fresh()
            step = sat.RelPlus if isinstance(f, SincePlusPlus) else sat.Rel
            guard = sat.Rel if isinstance(f, Since) else sat.RelPlus
            return sat.Exists(
                y,
                sat.FOAnd(
                    sat.FOAnd(step(sat.FOVar(y), sat.FOVar(x)), rec(f.left, y)),
                    sat.Forall(
                        z,
                        sat.FOImplies(
                            sat.FOAnd(guard(sat.FOVar(y), sat.FOVar(z)), guard(sat.FOVar(z), sat.FOVar(x))),
                            rec(f.right, z),
                        ),
                    ),
                ),
            )
        raise TypeError(f"not a formula node: {f!r}")

    return rec(phi, anchor)


def st_complete(phi: Formula, anchor: str = "x") -> sat.FOFormula:
    """The monadic-class image over complete frames: the diamond rule loses
    its relation guard because every pair is related."""
    return standard_translation(phi, anchor, complete_frames=True)


# ---------------------------------------------------------------------------
# The monadic class with equality and complete frames


def _pred_to_prop(name):
    if name[0].isalpha():
        return name.lower()
    return "q" + name


def ht(alpha: sat.FOFormula) -> Formula:
    """Monadic-class sentences into the down-fragment over complete frames."""
    if not sat.is_mc_eq(alpha):
        raise FragmentError("ht expects a formula of the monadic class with equality")

    def term(t):
        if isinstance(t, sat.FOConst):
            return Atom(NOM, t.name)
        return Atom(SVAR, t.name)

    def rec(g):
        if isinstance(g, sat.FOTrue):
            return Top()
        if isinstance(g, sat.FOFalse):
            return Bot()
        if isinstance(g, sat.Pred):
            return Diamond(And(term(g.term), Atom(PROP, _pred_to_prop(g.name))))
        if isinstance(g, sat.Eq):
            return Diamond(And(term(g.left), term(g.right)))
        if isinstance(g, sat.FONot):
            return Not(rec(g.body))
        if isinstance(g, sat.FOAnd):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOOr):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOImplies):
            return Implies(rec(g.left), rec(g.right))
        if isinstance(g, sat.Exists):
            return Diamond(Down(Atom(SVAR, g.var), rec(g.body)))
        if isinstance(g, sat.Forall):
            return Not(Diamond(Down(Atom(SVAR, g.var), Not(rec(g.body)))))
        raise TypeError(f"not an FO node: {g!r}")

    return rec(alpha)


def complete_reduction(alpha: sat.FOFormula) -> Formula:
    """(down x. [] dia x) & HT(alpha): forces the generated subframe complete."""
    x = svar("x")
    return And(Down(x, Box(Diamond(x))), ht(alpha))


# ---------------------------------------------------------------------------
# Zig-zag: one binary relation into a transitive one


def _rename_apart(alpha):
    """Each quantifier binds a distinct fresh-where-needed variable."""
    used = set()
    for g in sat.fo_subformulas(alpha):
        if isinstance(g, (sat.Exists, sat.Forall)):
            used.add(g.var)
        elif isinstance(g, (sat.Rel, sat.RelPlus, sat.Eq)):
            used.update(t.name for t in (g.left, g.right) if isinstance(t, sat.FOVar))
        elif isinstance(g, sat.Pred) and isinstance(g.term, sat.FOVar):
            used.add(g.term.name)
    counter = [0]

    def fresh(base):
        while True:
            name = f"{base}{counter[0]}"
            counter[0] += 1
            if name not in used:
                used.add(name)
                return name

    def fix_term(t, sub):
        if isinstance(t, sat.FOVar) and t.name in sub:
            return sat.FOVar(sub[t.name])
        return t

    def rec(g, sub, bound_names):
        if isinstance(g, (sat.FOTrue, sat.FOFalse)):
            return g
        if isinstance(g, sat.Rel):
            return sat.Rel(fix_term(g.left, sub), fix_term(g.right, sub))
        if isinstance(g, sat.RelPlus):
            return sat.RelPlus(fix_term(g.left, sub), fix_term(g.right, sub))
        if isinstance(g, sat.Eq):
            return sat.Eq(fix_term(g.left, sub), fix_term(g.right, sub))
        if isinstance(g, sat.Pred):
            return sat.Pred(g.name, fix_term(g.term, sub))
        if isinstance(g, sat.FONot):
            return sat.FONot(rec(g.body, sub, bound_names))
        if isinstance(g, (sat.FOAnd, sat.FOOr, sat.FOImplies)):
            return type(g)(rec(g.left, sub, bound_names), rec(g.right, sub, bound_names))
        if isinstance(g, (sat.Exists, sat.Forall)):
            if g.var in bound_names:
                new = fresh(g.var)
                return type(g)(new, rec(g.body, {**sub, g.var: new}, bound_names | {new}))
            return type(g)(g.var, rec(g.body, sub, bound_names | {g.var}))
        raise TypeError(f"not an FO node: {g!r}")

    return rec(alpha, {}, set())


def zigzag(alpha: sat.FOFormula) -> sat.FOFormula:
    """Relation atoms become zig-zag gadgets over four level predicates."""
    if not sat.is_all_u1(alpha) or sat.fo_preds(alpha):
        raise FragmentError("zigzag expects a sentence over one binary relation only")
    alpha = _rename_apart(alpha)
    used = set()
    for g in sat.fo_subformulas(alpha):
        if isinstance(g, (sat.Exists, sat.Forall)):
            used.add(g.var)
    counters = {}

    def fresh(base):
        while True:
            n = counters.get(base, 0)
            counters[base] = n + 1
            name = f"{base}{n}"
            if name not in used:
                used.add(name)
                return name

    def rec(g):
        if isinstance(g, (sat.FOTrue, sat.FOFalse)):
            return g
        if isinstance(g, sat.Rel):
            x, y = g.left, g.right
            a, b, c = (sat.FOVar(fresh(n)) for n in ("a", "b", "c"))
            body = _fo_conj(
                [
                    sat.Rel(x, a),
                    sat.Rel(b, a),
                    sat.Rel(b, c),
                    sat.Rel(y, c),
                    sat.Pred("0", x),
                    sat.Pred("1", a),
                    sat.Pred("2", b),
                    sat.Pred("3", c),
                    sat.Pred("0", y),
                ]
            )
            return sat.Exists(a.name, sat.Exists(b.name, sat.Exists(c.name, body)))
        if isinstance(g, sat.FONot):
            return sat.FONot(rec(g.body))
        if isinstance(g, (sat.FOAnd, sat.FOOr, sat.FOImplies)):
            return type(g)(rec(g.left), rec(g.right))
        if isinstance(g, sat.Exists):
            return sat.Exists(g.var, sat.FOAnd(sat.Pred("0", sat.FOVar(g.var)), rec(g.body)))
        if isinstance(g, sat.Forall):
            return sat.Forall(g.var, sat.FOImplies(sat.Pred("0", sat.FOVar(g.var)), rec(g.body)))
        raise TypeError(f"unsupported node in [all,(0,1)]: {g!r}")

    return rec(alpha)


def _fo_conj(parts):
    out = parts[0]
    for p in parts[1:]:
        out = sat.FOAnd(out, p)
    return out


# ---------------------------------------------------------------------------
# Spy-point reductions from [all,(u,1)]


def _spy_translate(alpha, spy, mode):
    """mode 'at': @-based rules; mode 'tense': P/F-based rules."""

    def term(t):
        if isinstance(t, sat.FOConst):
            return Atom(NOM, t.name)
        return Atom(SVAR, t.name)

    def rec(g):
        if isinstance(g, (sat.FOTrue, sat.FOFalse)):
            return Top() if isinstance(g, sat.FOTrue) else Bot()
        if isinstance(g, sat.Rel):
            x, y = term(g.left), term(g.right)
            if mode == "at":
                return At(x, Diamond(y))
            return Past(And(spy, Future(And(x, Future(y)))))
        if isinstance(g, sat.Pred):
            x = term(g.term)
            p = Atom(PROP, _pred_to_prop(g.name))
            if mode == "at":
                return At(x, p)
            return Past(And(spy, Future(And(x, p))))
        if isinstance(g, sat.FONot):
            return Not(rec(g.body))
        if isinstance(g, sat.FOAnd):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOOr):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOImplies):
            return Implies(rec(g.left), rec(g.right))
        if isinstance(g, sat.Exists):
            x = Atom(SVAR, g.var)
            if mode == "at":
                return At(spy, Diamond(Down(x, rec(g.body))))
            return Past(And(spy, Future(Down(x, rec(g.body)))))
        if isinstance(g, sat.Forall):
            x = Atom(SVAR, g.var)
            if mode == "at":
                return Not(At(spy, Diamond(Down(x, Not(rec(g.body))))))
            return Not(Past(And(spy, Future(Down(x, Not(rec(g.body)))))))
        raise TypeError(f"unsupported node in [all,(u,1)]: {g!r}")

    return rec(alpha)


def _spy_reduce(alpha, mode):
    if not sat.is_all_u1(alpha):
        raise FragmentError("spy reductions expect a sentence of [all,(u,1)]")
    if sat.fo_free_vars(alpha):
        raise FragmentError("spy reductions expect a sentence")
    alpha = _rename_apart(alpha)
    bound = {g.var for g in sat.fo_subformulas(alpha) if isinstance(g, (sat.Exists, sat.Forall))}
    spy_name = "i" if "i" not in bound else "_spy"
    spy = Atom(SVAR, spy_name)
    body = _spy_translate(alpha, spy, mode)
    if mode == "at":
        return Down(spy, And(Not(Diamond(spy)), Diamond(body)))
    return Down(spy, And(Not(Future(spy)), Future(body)))


def spy_at(alpha: sat.FOFormula) -> Formula:
    """f(alpha) = down i. (~dia i & dia alpha^t), @-based spy point."""
    return _spy_reduce(alpha, "at")


def spy_fp(alpha: sat.FOFormula) -> Formula:
    """The F,P variant of the spy-point reduction."""
    return _spy_reduce(alpha, "tense")


# ---------------------------------------------------------------------------
# Transitive trees over the natural numbers


_HLD_FP_NODES = (
    Atom, Top, Bot, Not, And, Or, Implies, Iff,
    Diamond, Box, Future, Globally, Past, Historically, Down,
)


def _check_hld_fp(phi):
    _restrict(phi, _HLD_FP_NODES, "the down-F,P fragment")


def _f1(psi, sim):
    # direct-successor F: F1 psi == U(psi, false), then the down-simulation
    return sim(psi, Bot())


def _g1(psi, sim):
    return Not(sim(Not(psi), Bot()))


def tt_to_nat_tense(phi: Formula) -> Formula:
    """f(phi) = phi & lambda & H lambda & H G lambda & P H false.

    lambda names a direct successor and forces all direct successors equal,
    written through Until/Since and then their binder simulations, so the
    result stays inside the down-F,P fragment.
    """
    _check_hld_fp(phi)
    names = _Names(phi)
    y = names.svar("y")
    inner = Down(y, since_via_down_tense(_g1(y, until_via_down_tense), Bot()))
    lam = Implies(Future(Top()), until_via_down_tense(inner, Bot()))
    return And(
        And(And(And(phi, lam), Historically(lam)), Historically(Globally(lam))),
        Past(Historically(Bot())),
    )


def tt_to_nat_at(phi: Formula) -> Formula:
    """The @-variant: simulate P through the spy point, then force
    unique direct successors with the binder simulation of Until."""
    _check_hld_fp(phi)
    names = _Names(phi)
    spy = names.svar("i")

    def rec(g):
        if isinstance(g, (Atom, Top, Bot)):
            return g
        if isinstance(g, (Diamond, Future)):
            return Diamond(rec(g.body))
        if isinstance(g, (Box, Globally)):
            return Not(Diamond(Not(rec(g.body))))
        if isinstance(g, Past):
            v = names.svar("v")
            return Down(v, At(spy, Diamond(And(rec(g.body), Diamond(v)))))
        if isinstance(g, Historically):
            v = names.svar("v")
            return Not(Down(v, At(spy, Diamond(And(Not(rec(g.body)), Diamond(v))))))
        if isinstance(g, Not):
            return Not(rec(g.body))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Or):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, Implies):
            return Implies(rec(g.left), rec(g.right))
        if isinstance(g, Iff):
            return Iff(rec(g.left), rec(g.right))
        if isinstance(g, Down):
            return Down(g.var, rec(g.body))
        raise TypeError(f"not a formula node: {g!r}")

    image = rec(phi)
    noms = sorted({a.name for a in atoms_of(phi) if a.kind == NOM})
    mu = _conj([At(spy, Diamond(Atom(NOM, j))) for j in noms]) if noms else Top()
    x, y = names.svar("x"), names.svar("y")
    lam = Implies(
        Diamond(Top()),
        Down(x, _f1(Down(y, At(x, _g1(y, until_via_down))), until_via_down)),
    )
    return Down(spy, And(And(And(Diamond(image), mu), lam), Box(lam)))


# ---------------------------------------------------------------------------
# Linear frames


_HLDAT_FP_NODES = _HLD_FP_NODES + (At,)


def at_elim_linear(phi: Formula) -> Formula:
    """Rewrite @t psi as P(t & psi) | (t & psi) | F(t & psi), bottom-up."""
    _restrict(phi, _HLDAT_FP_NODES, "the down-@-F,P fragment")

    def rewrite(g):
        if isinstance(g, At):
            core = And(g.term, g.body)
            return Or(Or(Past(core), core), Future(core))
        return g

    return map_formula(phi, rewrite)


def string_reduction(alpha: sat.FOFormula, sigma) -> Formula:
    """FO over strings into the down-@ language over linear frames.

    The spy point s precedes every string position; the companion sentence
    forces the generated subframe to look like a finite nonempty discrete
    word over sigma.
    """
    sigma = list(sigma)
    if not sigma:
        raise ValueError("alphabet must be nonempty")
    bad = sat.fo_preds(alpha) - set(sigma)
    if bad:
        raise FragmentError(f"letter predicates outside the alphabet: {sorted(bad)}")
    if any(isinstance(g, sat.RelPlus) for g in sat.fo_subformulas(alpha)):
        raise FragmentError("closure atoms are not part of the string signature")
    if sat.fo_free_vars(alpha):
        raise FragmentError("string reduction expects a sentence")
    alpha = _rename_apart(alpha)
    bound = {g.var for g in sat.fo_subformulas(alpha) if isinstance(g, (sat.Exists, sat.Forall))}
    s_name = "s" if "s" not in bound else "_spy"
    s = Atom(SVAR, s_name)

    def term(t):
        if isinstance(t, sat.FOConst):
            return Atom(NOM, t.name)
        return Atom(SVAR, t.name)

    def rec(g):
        if isinstance(g, (sat.FOTrue, sat.FOFalse)):
            return Top() if isinstance(g, sat.FOTrue) else Bot()
        if isinstance(g, sat.Pred):
            return At(s, Diamond(And(term(g.term), Atom(PROP, g.name))))
        if isinstance(g, sat.Eq):
            return At(s, Diamond(And(term(g.left), term(g.right))))
        if isinstance(g, sat.Rel):
            return At(s, Diamond(And(term(g.left), Diamond(term(g.right)))))
        if isinstance(g, sat.FONot):
            return Not(rec(g.body))
        if isinstance(g, sat.FOAnd):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOOr):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, sat.FOImplies):
            return Implies(rec(g.left), rec(g.right))
        if isinstance(g, sat.Exists):
            return At(s, Diamond(Down(Atom(SVAR, g.var), rec(g.body))))
        if isinstance(g, sat.Forall):
            return Not(At(s, Diamond(Down(Atom(SVAR, g.var), Not(rec(g.body))))))
        raise TypeError(f"not an FO node: {g!r}")

    names = _Names()
    names.used = set(bound) | {s_name} | set(sigma)
    x, y = names.svar("x"), names.svar("y")
    fl = And(
        Diamond(Down(x, At(s, Box(Not(Diamond(x)))))),
        Diamond(Box(Bot())),
    )
    discrete = Box(
        Implies(
            Diamond(Top()),
            Down(x, Diamond(Down(y, At(x, Box(Box(Not(y))))))),
        )
    )
    unique = Box(
        _disj(
            [
                _conj(
                    [Atom(PROP, a)]
                    + [Not(Atom(PROP, b)) for b in sigma if b != a]
                )
                for a in sigma
            ]
        )
    )
    psi = And(And(fl, discrete), unique)
    return Down(s, And(rec(alpha), psi))


# ---------------------------------------------------------------------------
# E-operator elimination over transitive frames


_HLE_US_NODES = (
    Atom, Top, Bot, Not, And, Or, Implies, Iff,
    Diamond, Box, Future, Globally, Somewhere, Everywhere, Until, Since,
)


def exists_to_at(phi: Formula) -> Formula:
    """f(phi) = i & ~dia i & dia phi^t with E psi mapped to @i dia psi."""
    for g in subformulas(phi):
        if isinstance(g, Atom):
            if g.kind == SVAR:
                raise FragmentError("the E-U,S language has no state variables")
        elif not isinstance(g, _HLE_US_NODES):
            raise FragmentError(f"operator {type(g).__name__} is outside the E-U,S language")
    noms = {a.name for a in atoms_of(phi) if a.kind == NOM}
    spy = Atom(NOM, "i" if "i" not in noms else "_spy")

    def rewrite(g):
        if isinstance(g, Somewhere):
            return At(spy, Diamond(g.body))
        if isinstance(g, Everywhere):
            return Not(At(spy, Diamond(Not(g.body))))
        return g

    image = map_formula(phi, rewrite)
    return And(And(spy, Not(Diamond(spy))), Diamond(image))


# ---------------------------------------------------------------------------
# PDL over sibling-ordered trees


def _seq(*progs):
    out = progs[0]
    for p in progs[1:]:
        out = sat.Seq(out, p)
    return out


def _pdl_conj(parts):
    out = parts[0]
    for p in parts[1:]:
        out = sat.PdlAnd(out, p)
    return out


def _normalize_for_pdl(phi):
    """Rewrite the E-U,S language so only atoms, not, and, E, U, S remain."""
    for g in subformulas(phi):
        if isinstance(g, Atom):
            if g.kind == SVAR:
                raise FragmentError("the E-U,S language has no state variables")
        elif not isinstance(g, _HLE_US_NODES):
            raise FragmentError(f"operator {type(g).__name__} is outside the E-U,S language")

    def rewrite(g):
        if isinstance(g, Top):
            return Not(And(Atom(PROP, "_t"), Not(Atom(PROP, "_t"))))
        if isinstance(g, Bot):
            return And(Atom(PROP, "_t"), Not(Atom(PROP, "_t")))
        if isinstance(g, Or):
            return Not(And(Not(g.left), Not(g.right)))
        if isinstance(g, Implies):
            return Not(And(g.left, Not(g.right)))
        if isinstance(g, Iff):
            l, r = g.left, g.right
            return And(Not(And(l, Not(r))), Not(And(r, Not(l))))
        if isinstance(g, (Diamond, Future)):
            return Until(g.body, Not(And(Atom(PROP, "_t"), Not(Atom(PROP, "_t")))))
        if isinstance(g, (Box, Globally)):
            return Not(Until(Not(g.body), Not(And(Atom(PROP, "_t"), Not(Atom(PROP, "_t"))))))
        return g

    return map_formula(phi, rewrite)


def pdl_translate(phi: Formula, flat: bool = False) -> sat.PdlFormula:
    """The composition map into tree PDL; nominals become atoms."""
    norm = _normalize_for_pdl(phi)
    if flat:
        flatp = sat.PdlAtom("_flat")
        dn = sat.Choice(
            sat.Seq(sat.DownP(), sat.Test(sat.PdlNot(flatp))),
            sat.Seq(sat.Test(flatp), sat.Up()),
        )
        up = sat.Choice(
            sat.Seq(sat.Test(sat.PdlNot(flatp)), sat.Up()),
            _seq(sat.Test(flatp), sat.DownP(), sat.Test(flatp)),
        )
    else:
        dn, up = sat.DownP(), sat.Up()

    def rec(g):
        if isinstance(g, Atom):
            return sat.PdlAtom(g.name)
        if isinstance(g, Not):
            return sat.PdlNot(rec(g.body))
        if isinstance(g, And):
            return sat.PdlAnd(rec(g.left), rec(g.right))
        if isinstance(g, Somewhere):
            return sat.PdlDiamond(_seq(sat.Star(sat.Up()), sat.Star(sat.DownP())), rec(g.body))
        if isinstance(g, Everywhere):
            return sat.PdlNot(
                sat.PdlDiamond(_seq(sat.Star(sat.Up()), sat.Star(sat.DownP())), sat.PdlNot(rec(g.body)))
            )
        if isinstance(g, Until):
            return sat.PdlDiamond(
                _seq(sat.Star(sat.Seq(dn, sat.Test(rec(g.right)))), dn), rec(g.left)
            )
        if isinstance(g, Since):
            return sat.PdlDiamond(
                _seq(sat.Star(sat.Seq(up, sat.Test(rec(g.right)))), up), rec(g.left)
            )
        raise TypeError(f"unexpected node after normalization: {g!r}")

    return rec(norm)


def nominal_uniqueness(i: str) -> sat.PdlFormula:
    """nu(i): the atom for nominal i is true at exactly one tree node."""
    atom = sat.PdlAtom(i)
    down, upp = sat.DownP(), sat.Up()
    body = _pdl_conj(
        [
            sat.pdl_box(sat.plus_prog(down), sat.PdlNot(atom)),
            sat.pdl_box(sat.plus_prog(upp), sat.PdlNot(atom)),
            sat.pdl_box(_seq(sat.Star(upp), sat.plus_prog(sat.Left()), sat.Star(down)), sat.PdlNot(atom)),
            sat.pdl_box(_seq(sat.Star(upp), sat.plus_prog(sat.Right()), sat.Star(down)), sat.PdlNot(atom)),
        ]
    )
    return sat.PdlAnd(
        sat.PdlDiamond(sat.Star(down), atom),
        sat.pdl_box(sat.Star(down), sat.PdlNot(sat.PdlAnd(atom, sat.PdlNot(body)))),
    )


def pdl_reduction(phi: Formula) -> sat.PdlFormula:
    """f(phi) = <down*> phi^t & the uniqueness constraints for nominals."""
    image = pdl_translate(phi)
    out = sat.PdlDiamond(sat.Star(sat.DownP()), image)
    for i in sorted({a.name for a in atoms_of(phi) if a.kind == NOM}):
        out = sat.PdlAnd(out, nominal_uniqueness(i))
    return out


def flat_path_marker() -> sat.PdlFormula:
    """beta: the flat marker labels the root and exactly one downward path."""
    flatp = sat.PdlAtom("_flat")
    down = sat.DownP()
    follows = _pdl_conj(
        [
            sat.pdl_box(sat.plus_prog(sat.Left()), sat.PdlNot(flatp)),
            sat.pdl_box(sat.plus_prog(sat.Right()), sat.PdlNot(flatp)),
            sat.PdlDiamond(down, flatp),
        ]
    )
    return _pdl_conj(
        [
            flatp,
            sat.pdl_box(sat.Star(down), sat.PdlNot(sat.PdlAnd(flatp, sat.PdlNot(follows)))),
            sat.pdl_box(
                sat.Star(down),
                sat.PdlNot(sat.PdlAnd(sat.PdlNot(flatp), sat.PdlNot(sat.pdl_box(down, sat.PdlNot(flatp))))),
            ),
        ]
    )


def pdl_reduction_flat(phi: Formula) -> sat.PdlFormula:
    """f-flat: the rootless variant, predecessors turned into marked successors."""
    image = pdl_translate(phi, flat=True)
    out = sat.PdlAnd(image, flat_path_marker())
    for i in sorted({a.name for a in atoms_of(phi) if a.kind == NOM}):
        out = sat.PdlAnd(out, nominal_uniqueness(i))
    return out
