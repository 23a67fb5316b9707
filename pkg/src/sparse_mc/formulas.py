"""First-order formulas over colored graphs and the brute-force evaluator.

The AST covers atoms E(x,y), x = y, Color(x), bounded-distance atoms
dist(x; y1,...,yk) <= d, boolean connectives with n-ary And/Or, and plain
as well as guarded quantifiers (exists x in U).  Formulas are immutable
and hashable; `normalize` produces a canonical form used for
deduplication.  `evaluate` is the straightforward recursive algorithm
with full Tarski semantics and acts as the correctness oracle for every
other evaluation path in this package.

Distance atoms are native AST nodes rather than quantifier expansions so
that localization keeps the quantifier rank unchanged; their rank charge
is ceil(log2 d) for d >= 2 and 0 for d <= 1 (at d <= 1 the atom is a
plain disjunction of adjacency and equality).
"""

import math


class ParseError(ValueError):
    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class Formula:
    __slots__ = ("_hash",)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return to_string(self)


class Edge(Formula):
    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def _key(self):
        return (self.x, self.y)


class Eq(Formula):
    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def _key(self):
        return (self.x, self.y)


class Color(Formula):
    __slots__ = ("name", "x")

    def __init__(self, name, x):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "x", x)

    def _key(self):
        return (self.name, self.x)


class DistLE(Formula):
    """dist(x; y1,...,yk) <= d, i.e. x lies in the d-neighborhood of ys."""

    __slots__ = ("x", "ys", "d")

    def __init__(self, x, ys, d):
        if not ys:
            raise ValueError("DistLE needs a nonempty parameter tuple")
        if d < 0:
            raise ValueError("DistLE needs d >= 0")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "ys", tuple(ys))
        object.__setattr__(self, "d", d)

    def _key(self):
        return (self.x, self.ys, self.d)


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", bool(value))

    def _key(self):
        return (self.value,)


TOP = Const(True)
BOTTOM = Const(False)


class Not(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub):
        object.__setattr__(self, "sub", sub)

    def _key(self):
        return (self.sub,)


class And(Formula):
    __slots__ = ("children",)

    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def _key(self):
        return self.children


class Or(Formula):
    __slots__ = ("children",)

    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def _key(self):
        return self.children


class Exists(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _key(self):
        return (self.var, self.body)


class Forall(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _key(self):
        return (self.var, self.body)


class ExistsIn(Formula):
    __slots__ = ("var", "guard", "body")

    def __init__(self, var, guard, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "guard", guard)
        object.__setattr__(self, "body", body)

    def _key(self):
        return (self.var, self.guard, self.body)


class ForallIn(Formula):
    __slots__ = ("var", "guard", "body")

    def __init__(self, var, guard, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "guard", guard)
        object.__setattr__(self, "body", body)

    def _key(self):
        return (self.var, self.guard, self.body)


QUANTIFIERS = (Exists, Forall, ExistsIn, ForallIn)
GUARDED = (ExistsIn, ForallIn)


# -- plumbing accessors -------------------------------------------------------

def subformulas(phi):
    """All subformulas in pre-order, including phi itself."""
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.sub)
    elif isinstance(phi, (And, Or)):
        for c in phi.children:
            yield from subformulas(c)
    elif isinstance(phi, QUANTIFIERS):
        yield from subformulas(phi.body)


def free_vars(phi):
    if isinstance(phi, Edge) or isinstance(phi, Eq):
        return frozenset((phi.x, phi.y))
    if isinstance(phi, Color):
        return frozenset((phi.x,))
    if isinstance(phi, DistLE):
        return frozenset((phi.x,) + phi.ys)
    if isinstance(phi, Const):
        return frozenset()
    if isinstance(phi, Not):
        return free_vars(phi.sub)
    if isinstance(phi, (And, Or)):
        out = frozenset()
        for c in phi.children:
            out |= free_vars(c)
        return out
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def guards_of(phi):
    """Names of all guard sets mentioned by guarded quantifiers."""
    return {f.guard for f in subformulas(phi) if isinstance(f, GUARDED)}


def quantifier_rank(phi):
    if isinstance(phi, DistLE):
        return 0 if phi.d <= 1 else math.ceil(math.log2(phi.d))
    if isinstance(phi, (Edge, Eq, Color, Const)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.sub)
    if isinstance(phi, (And, Or)):
        return max((quantifier_rank(c) for c in phi.children), default=0)
    if isinstance(phi, QUANTIFIERS):
        return 1 + quantifier_rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def is_sentence(phi):
    return not free_vars(phi)


def contains_distle(phi):
    return any(isinstance(f, DistLE) for f in subformulas(phi))


# -- printing -----------------------------------------------------------------

def to_string(phi):
    return _ts(phi, 0)


def _ts(phi, prec):
    # precedence levels: 0 formula, 1 or, 2 and, 3 unary
    if isinstance(phi, Edge):
        return f"E({phi.x},{phi.y})"
    if isinstance(phi, Eq):
        return f"{phi.x} = {phi.y}"
    if isinstance(phi, Color):
        return f"{phi.name}({phi.x})"
    if isinstance(phi, DistLE):
        return f"dist({phi.x}; {','.join(phi.ys)}) <= {phi.d}"
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Not):
        return "~" + _ts(phi.sub, 3)
    if isinstance(phi, And):
        if not phi.children:
            return "true"
        s = " & ".join(_ts(c, 2) for c in phi.children)
        return f"({s})" if prec > 1 else s
    if isinstance(phi, Or):
        if not phi.children:
            return "false"
        s = " | ".join(_ts(c, 1) for c in phi.children)
        return f"({s})" if prec > 0 else s
    if isinstance(phi, Exists):
        s = f"exists {phi.var}. {_ts(phi.body, 0)}"
    elif isinstance(phi, Forall):
        s = f"forall {phi.var}. {_ts(phi.body, 0)}"
    elif isinstance(phi, ExistsIn):
        s = f"exists {phi.var} in {phi.guard}. {_ts(phi.body, 0)}"
    elif isinstance(phi, ForallIn):
        s = f"forall {phi.var} in {phi.guard}. {_ts(phi.body, 0)}"
    else:
        raise TypeError(f"not a formula: {phi!r}")
    return f"({s})" if prec > 0 else s


# -- parser -------------------------------------------------------------------

_KEYWORDS = {"exists", "forall", "in", "dist", "true", "false"}
_SYMBOLS = ("->", "<=", "(", ")", ",", ";", ".", "=", "&", "|", "~")


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        matched = None
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                matched = sym
                break
        if matched:
            tokens.append((matched, matched, line, col))
            i += len(matched)
            col += len(matched)
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "IDENT"
            tokens.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def error(self, msg):
        tok = self.peek()
        raise ParseError(msg, tok[2], tok[3])

    def parse(self):
        phi = self.formula()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2], tok[3])
        return phi

    def formula(self):
        lhs = self.disjunction()
        if self.peek()[0] == "->":
            self.next()
            rhs = self.formula()
            return Or(Not(lhs), rhs)
        return lhs

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek()[0] == "|":
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(parts)

    def conjunction(self):
        parts = [self.unary()]
        while self.peek()[0] == "&":
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(parts)

    def unary(self):
        kind = self.peek()[0]
        if kind == "~":
            self.next()
            return Not(self.unary())
        if kind in ("exists", "forall"):
            return self.quantified()
        return self.atom()

    def quantified(self):
        # quantifier scope extends as far right as possible
        kind, _, _, _ = self.next()
        var = self.expect("IDENT")[1]
        guard = None
        if self.peek()[0] == "in":
            self.next()
            guard = self.expect("IDENT")[1]
        self.expect(".")
        body = self.formula()
        if guard is None:
            return Exists(var, body) if kind == "exists" else Forall(var, body)
        return (ExistsIn(var, guard, body) if kind == "exists"
                else ForallIn(var, guard, body))

    def atom(self):
        tok = self.peek()
        if tok[0] == "(":
            self.next()
            phi = self.formula()
            self.expect(")")
            return phi
        if tok[0] == "true":
            self.next()
            return TOP
        if tok[0] == "false":
            self.next()
            return BOTTOM
        if tok[0] == "dist":
            self.next()
            self.expect("(")
            x = self.expect("IDENT")[1]
            self.expect(";")
            ys = [self.expect("IDENT")[1]]
            while self.peek()[0] == ",":
                self.next()
                ys.append(self.expect("IDENT")[1])
            self.expect(")")
            self.expect("<=")
            d = int(self.expect("INT")[1])
            return DistLE(x, ys, d)
        if tok[0] == "IDENT":
            name = self.next()[1]
            if self.peek()[0] == "(":
                self.next()
                x = self.expect("IDENT")[1]
                if name == "E":
                    self.expect(",")
                    y = self.expect("IDENT")[1]
                    self.expect(")")
                    return Edge(x, y)
                self.expect(")")
                return Color(name, x)
            if self.peek()[0] == "=":
                self.next()
                y = self.expect("IDENT")[1]
                return Eq(name, y)
            self.error(f"expected '(' or '=' after {name!r}")
        self.error(f"expected a formula, found {tok[1]!r}")


def parse(text):
    """Parse the ASCII formula grammar.  Precedence ~ > & > | > ->;
    quantifier scope extends as far right as possible."""
    return _Parser(text).parse()


# -- normalization ------------------------------------------------------------

def _canon_key(phi, env, depth):
    """Serialization invariant under bound-variable renaming (binders are
    replaced by their nesting depth), used as the canonical sort key."""
    def var(v):
        return ("B", env[v]) if v in env else ("F", v)

    if isinstance(phi, Edge):
        return ("E",) + tuple(sorted((var(phi.x), var(phi.y))))
    if isinstance(phi, Eq):
        return ("=",) + tuple(sorted((var(phi.x), var(phi.y))))
    if isinstance(phi, Color):
        return ("C", phi.name, var(phi.x))
    if isinstance(phi, DistLE):
        return ("D", var(phi.x), tuple(sorted(var(y) for y in phi.ys)), phi.d)
    if isinstance(phi, Const):
        return ("K", phi.value)
    if isinstance(phi, Not):
        return ("N", _canon_key(phi.sub, env, depth))
    if isinstance(phi, And):
        return ("A",) + tuple(_canon_key(c, env, depth) for c in phi.children)
    if isinstance(phi, Or):
        return ("O",) + tuple(_canon_key(c, env, depth) for c in phi.children)
    if isinstance(phi, QUANTIFIERS):
        env2 = dict(env)
        env2[phi.var] = depth
        tag = {Exists: "Ex", Forall: "Fa", ExistsIn: "ExI", ForallIn: "FaI"}[type(phi)]
        g = (phi.guard,) if isinstance(phi, GUARDED) else ()
        return (tag,) + g + (_canon_key(phi.body, env2, depth + 1),)
    raise TypeError(f"not a formula: {phi!r}")


def _canon(phi, env, depth):
    # env carries the de-Bruijn depth of every enclosing binder so that the
    # child sort keys are invariant under the later renaming pass
    if isinstance(phi, Not):
        sub = _canon(phi.sub, env, depth)
        if isinstance(sub, Not):
            return sub.sub
        if isinstance(sub, Const):
            return Const(not sub.value)
        return Not(sub)
    if isinstance(phi, (And, Or)):
        is_and = isinstance(phi, And)
        flat = []
        for c in phi.children:
            c = _canon(c, env, depth)
            if type(c) is type(phi):
                flat.extend(c.children)
            else:
                flat.append(c)
        dominant = BOTTOM if is_and else TOP
        neutral = TOP if is_and else BOTTOM
        kept = {}
        for c in flat:
            if c == dominant:
                return dominant
            if c == neutral:
                continue
            kept.setdefault(_canon_key(c, env, depth), c)
        children = [kept[k] for k in sorted(kept)]
        if not children:
            return neutral
        if len(children) == 1:
            return children[0]
        return And(children) if is_and else Or(children)
    if isinstance(phi, QUANTIFIERS):
        env2 = dict(env)
        env2[phi.var] = depth
        body = _canon(phi.body, env2, depth + 1)
        if isinstance(phi, Exists):
            return Exists(phi.var, body)
        if isinstance(phi, Forall):
            return Forall(phi.var, body)
        if isinstance(phi, ExistsIn):
            return ExistsIn(phi.var, phi.guard, body)
        return ForallIn(phi.var, phi.guard, body)
    if isinstance(phi, Eq) and phi.y < phi.x:
        return Eq(phi.y, phi.x)
    if isinstance(phi, Edge) and phi.y < phi.x:
        return Edge(phi.y, phi.x)
    if isinstance(phi, DistLE):
        return DistLE(phi.x, tuple(sorted(phi.ys)), phi.d)
    return phi


def _rename(phi, env, counter):
    def var(v):
        return env.get(v, v)

    if isinstance(phi, Edge):
        x, y = sorted((var(phi.x), var(phi.y)))
        return Edge(x, y)
    if isinstance(phi, Eq):
        x, y = sorted((var(phi.x), var(phi.y)))
        return Eq(x, y)
    if isinstance(phi, Color):
        return Color(phi.name, var(phi.x))
    if isinstance(phi, DistLE):
        return DistLE(var(phi.x), tuple(sorted(var(y) for y in phi.ys)), phi.d)
    if isinstance(phi, Const):
        return phi
    if isinstance(phi, Not):
        return Not(_rename(phi.sub, env, counter))
    if isinstance(phi, (And, Or)):
        children = tuple(_rename(c, env, counter) for c in phi.children)
        return And(children) if isinstance(phi, And) else Or(children)
    if isinstance(phi, QUANTIFIERS):
        fresh = f"v{counter[0]}"
        counter[0] += 1
        env2 = dict(env)
        env2[phi.var] = fresh
        body = _rename(phi.body, env2, counter)
        if isinstance(phi, Exists):
            return Exists(fresh, body)
        if isinstance(phi, Forall):
            return Forall(fresh, body)
        if isinstance(phi, ExistsIn):
            return ExistsIn(fresh, phi.guard, body)
        return ForallIn(fresh, phi.guard, body)
    raise TypeError(f"not a formula: {phi!r}")


def normalize(phi):
    """Canonical form: flattened and sorted boolean combinations with
    duplicates removed, double negations eliminated, symmetric atoms
    ordered, and bound variables renamed v0, v1, ... in traversal order.

    Idempotent, preserves evaluation on all assignments, and preserves the
    quantifier rank except where a constant subformula collapses a branch.
    """
    return _rename(_canon(phi, {}, 0), {}, [0])


# -- localization -------------------------------------------------------------

def localize(phi):
    """Restrict every plain quantifier of residual rank k to the
    2^(k-1)-neighborhood of the free variables of the quantified
    subformula.  Quantifiers whose subformula has no free variables
    (outermost quantifiers of sentences) are left unrestricted, as are
    guarded quantifiers.  Preserves the quantifier rank exactly."""
    if isinstance(phi, (Edge, Eq, Color, DistLE, Const)):
        return phi
    if isinstance(phi, Not):
        return Not(localize(phi.sub))
    if isinstance(phi, And):
        return And(tuple(localize(c) for c in phi.children))
    if isinstance(phi, Or):
        return Or(tuple(localize(c) for c in phi.children))
    if isinstance(phi, ExistsIn):
        return ExistsIn(phi.var, phi.guard, localize(phi.body))
    if isinstance(phi, ForallIn):
        return ForallIn(phi.var, phi.guard, localize(phi.body))
    if isinstance(phi, (Exists, Forall)):
        params = sorted(free_vars(phi))
        body = localize(phi.body)
        if not params:
            return Exists(phi.var, body) if isinstance(phi, Exists) else Forall(phi.var, body)
        k = quantifier_rank(phi)
        radius = DistLE(phi.var, params, 2 ** (k - 1))
        if isinstance(phi, Exists):
            return Exists(phi.var, And(radius, body))
        return Forall(phi.var, Or(Not(radius), body))
    raise TypeError(f"not a formula: {phi!r}")


# -- flip rewriting -----------------------------------------------------------

def rewrite_flip(phi, a_color, b_color):
    """Substitute every edge atom E(x,y) by
    E(x,y) xor ((A(x) and B(y)) or (B(x) and A(y))) so that evaluating the
    result on a flipped graph with the flip sets marked A/B agrees with
    evaluating the original formula on the unflipped graph.  Quantifier
    rank is unchanged."""
    if isinstance(phi, Edge):
        mixed = Or(And(Color(a_color, phi.x), Color(b_color, phi.y)),
                   And(Color(b_color, phi.x), Color(a_color, phi.y)))
        return Or(And(phi, Not(mixed)), And(Not(phi), mixed))
    if isinstance(phi, (Eq, Color, DistLE, Const)):
        return phi
    if isinstance(phi, Not):
        return Not(rewrite_flip(phi.sub, a_color, b_color))
    if isinstance(phi, And):
        return And(tuple(rewrite_flip(c, a_color, b_color) for c in phi.children))
    if isinstance(phi, Or):
        return Or(tuple(rewrite_flip(c, a_color, b_color) for c in phi.children))
    if isinstance(phi, Exists):
        return Exists(phi.var, rewrite_flip(phi.body, a_color, b_color))
    if isinstance(phi, Forall):
        return Forall(phi.var, rewrite_flip(phi.body, a_color, b_color))
    if isinstance(phi, ExistsIn):
        return ExistsIn(phi.var, phi.guard, rewrite_flip(phi.body, a_color, b_color))
    if isinstance(phi, ForallIn):
        return ForallIn(phi.var, phi.guard, rewrite_flip(phi.body, a_color, b_color))
    raise TypeError(f"not a formula: {phi!r}")


def deguard(phi):
    """Expand guarded quantifiers into plain quantifiers over color atoms
    (exists x in U. psi  ->  exists x. U(x) & psi).  Requires the guard
    sets to be present as colors of the graph under evaluation."""
    if isinstance(phi, (Edge, Eq, Color, DistLE, Const)):
        return phi
    if isinstance(phi, Not):
        return Not(deguard(phi.sub))
    if isinstance(phi, And):
        return And(tuple(deguard(c) for c in phi.children))
    if isinstance(phi, Or):
        return Or(tuple(deguard(c) for c in phi.children))
    if isinstance(phi, Exists):
        return Exists(phi.var, deguard(phi.body))
    if isinstance(phi, Forall):
        return Forall(phi.var, deguard(phi.body))
    if isinstance(phi, ExistsIn):
        return Exists(phi.var, And(Color(phi.guard, phi.var), deguard(phi.body)))
    if isinstance(phi, ForallIn):
        return Forall(phi.var, Or(Not(Color(phi.guard, phi.var)), deguard(phi.body)))
    raise TypeError(f"not a formula: {phi!r}")


# -- evaluation ---------------------------------------------------------------

class EvalError(ValueError):
    pass


def evaluate(g, phi, assignment=None, guards=None):
    """Standard Tarski semantics on a colored graph.  Guarded quantifiers
    range over the named sets in `guards`; distance atoms are resolved by
    breadth-first search.  Raises EvalError on unbound free variables or
    unknown guard names."""
    env = dict(assignment or {})
    guards = guards or {}
    ballcache = {}

    def val(v):
        if v not in env:
            raise EvalError(f"unbound variable {v!r}")
        return env[v]

    def rec(phi):
        if isinstance(phi, Edge):
            return g.has_edge(val(phi.x), val(phi.y))
        if isinstance(phi, Eq):
            return val(phi.x) == val(phi.y)
        if isinstance(phi, Color):
            return g.has_color(phi.name, val(phi.x))
        if isinstance(phi, DistLE):
            seeds = frozenset(val(y) for y in phi.ys)
            key = (seeds, phi.d)
            ball = ballcache.get(key)
            if ball is None:
                ball = g.neighborhood(seeds, phi.d)
                ballcache[key] = ball
            return val(phi.x) in ball
        if isinstance(phi, Const):
            return phi.value
        if isinstance(phi, Not):
            return not rec(phi.sub)
        if isinstance(phi, And):
            return all(rec(c) for c in phi.children)
        if isinstance(phi, Or):
            return any(rec(c) for c in phi.children)
        if isinstance(phi, (Exists, Forall, ExistsIn, ForallIn)):
            if isinstance(phi, GUARDED):
                if phi.guard not in guards:
                    raise EvalError(f"unknown guard {phi.guard!r}")
                domain = sorted(guards[phi.guard])
            else:
                domain = range(g.n)
            shadowed = env.get(phi.var, _MISSING)
            want = isinstance(phi, (Exists, ExistsIn))
            result = not want
            for v in domain:
                env[phi.var] = v
                if rec(phi.body) == want:
                    result = want
                    break
            if shadowed is _MISSING:
                env.pop(phi.var, None)
            else:
                env[phi.var] = shadowed
            return result
        raise TypeError(f"not a formula: {phi!r}")

    missing = free_vars(phi) - set(env)
    if missing:
        raise EvalError(f"unbound free variables: {sorted(missing)}")
    return rec(phi)


_MISSING = object()
