"""Abstract syntax shared by the six calculi.

Terms use a locally nameless representation: bound variables are de Bruijn
indices (`bvar`), free variables are names (`var`).  Binder nodes carry name
hints that are excluded from equality, so alpha-equivalence is plain
structural equality of terms and substitution of a term for a free name can
never capture.

One Term/TypeExpr datatype serves every calculus; a calculus tag plus the
admissibility tables below say which constructors a given language may use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CALCULI = ("urmm", "rmm", "gmm", "lnl", "arrow", "armm")


class SyntaxError_(Exception):
    """Parse or well-formedness error, with best-effort position info."""

    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            msg = f"{line}:{col}: {msg}"
        super().__init__(msg)


# ---------------------------------------------------------------------------
# Grades


@dataclass(frozen=True)
class Grade:
    """A grading-category object.

    Either a natural (built-in gradings), a name (presented gradings), or a
    formal tensor of grades.  The tensor form is kept syntactic so that
    `unmerge` can read a factorization off the type; grade equality is
    decided after normalizing tensors through the grading.
    """

    kind: str  # "nat" | "name" | "tensor"
    nat: int | None = None
    name: str | None = None
    subs: tuple["Grade", ...] = ()

    def __str__(self):
        if self.kind == "nat":
            return str(self.nat)
        if self.kind == "name":
            return self.name
        return f"{_gatom(self.subs[0])} * {_gatom(self.subs[1])}"


def _gatom(g: "Grade") -> str:
    return f"({g})" if g.kind == "tensor" else str(g)


def gnat(n: int) -> Grade:
    return Grade("nat", nat=n)


def gname(s: str) -> Grade:
    return Grade("name", name=s)


def gtensor(m: Grade, n: Grade) -> Grade:
    return Grade("tensor", subs=(m, n))


@dataclass(frozen=True)
class GradeMor:
    """A grading-category morphism src -> tgt.

    For the built-in thin gradings the morphism is determined by its
    endpoints (`word` is None and validity means src >= tgt); for presented
    gradings `word` is a composition word of declared generators.
    """

    src: Grade
    tgt: Grade
    word: tuple[str, ...] | None = None

    def __str__(self):
        if self.word is None:
            return f"{self.src}>={self.tgt}"
        return ";".join(self.word) if self.word else f"id_{self.src}"


# ---------------------------------------------------------------------------
# Types

# kind -> number of TypeExpr children
_TYPE_KINDS = {
    "unit1": 0,   # Cartesian unit 1
    "lunit": 0,   # linear unit I
    "base": 0,    # named base type / signature object
    "prod": 2,    # X * Y  (Cartesian product, or tensor in a linear zone)
    "fun": 2,     # A -> B
    "lolli": 2,   # X -o Y
    "arr": 2,     # A ~> B   (arrow-calculus arrow type)
    "aabs": 2,    # A => X   (abstraction type of the three-zone calculus)
    "jt": 1,      # J(A)
    "kt": 1,      # K(A)
    "tt": 1,      # T(A)
    "tgr": 1,     # T_m(A)
    "grty": 0,    # gr(m)
    "rt": 1,      # R(X)
}


@dataclass(frozen=True)
class TypeExpr:
    kind: str
    subs: tuple["TypeExpr", ...] = ()
    name: str | None = None
    grade: Grade | None = None

    def __post_init__(self):
        assert self.kind in _TYPE_KINDS, self.kind
        assert len(self.subs) == _TYPE_KINDS[self.kind], (self.kind, self.subs)

    def __str__(self):
        return type_to_text(self)


UNIT1 = TypeExpr("unit1")
LUNIT = TypeExpr("lunit")


def base(name) -> TypeExpr:
    return TypeExpr("base", name=str(name))


def prod(x, y) -> TypeExpr:
    return TypeExpr("prod", (x, y))


def fun(a, b) -> TypeExpr:
    return TypeExpr("fun", (a, b))


def lolli(x, y) -> TypeExpr:
    return TypeExpr("lolli", (x, y))


def arr(a, b) -> TypeExpr:
    return TypeExpr("arr", (a, b))


def aabs(a, x) -> TypeExpr:
    return TypeExpr("aabs", (a, x))


def jt(a) -> TypeExpr:
    return TypeExpr("jt", (a,))


def kt(a) -> TypeExpr:
    return TypeExpr("kt", (a,))


def tt(a) -> TypeExpr:
    return TypeExpr("tt", (a,))


def tgr(m: Grade, a) -> TypeExpr:
    return TypeExpr("tgr", (a,), grade=m)


def grty(m: Grade) -> TypeExpr:
    return TypeExpr("grty", grade=m)


def rt(x) -> TypeExpr:
    return TypeExpr("rt", (x,))


# ---------------------------------------------------------------------------
# Terms

# kind -> (n_children, binders-per-child)
_TERM_KINDS = {
    "var": (0, ()),       # free variable, name
    "bvar": (0, ()),      # bound variable, de Bruijn index
    "meta": (0, ()),      # pattern metavariable (rule patterns only)
    "unit": (0, ()),      # ()
    "pair": (2, (0, 0)),
    "pi1": (1, (0,)),
    "pi2": (1, (0,)),
    "gen": (1, (0,)),     # base-category morphism applied to a J-term
    "opapp": (-1, None),  # effect operation applied to its arguments
    "ret": (1, (0,)),
    "do": (2, (0, 1)),    # do x <- t0 in t1
    "lam": (1, (1,)),     # lam (x:X). t   (Cartesian or linear, by zone)
    "lamarrow": (1, (1,)),  # lamarrow (x:A). t   (arrow abstraction)
    "app": (2, (0, 0)),
    "aapp": (2, (0, 0)),  # u . v   (arrow application)
    "letunit": (2, (0, 0)),
    "letpair": (2, (0, 2)),  # let (x,y) = t0 in t1; x is bvar 1, y is bvar 0
    "letj": (2, (0, 1)),
    "letk": (2, (0, 1)),
    "jterm": (1, (0,)),
    "kterm": (1, (0,)),
    "rterm": (1, (0,)),
    "derelict": (1, (0,)),
    "merge": (1, (0,)),
    "unmerge": (1, (0,)),
    "regrade": (1, (0,)),  # regrade<xi> t
}


@dataclass(frozen=True)
class Term:
    kind: str
    subs: tuple["Term", ...] = ()
    name: str | None = None          # var/meta name, gen/op symbol
    index: int | None = None         # bvar index
    xi: GradeMor | None = None       # regrade payload
    tyann: TypeExpr | None = None    # lam / lamarrow annotation
    hints: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        spec = _TERM_KINDS.get(self.kind)
        assert spec is not None, self.kind
        if spec[0] >= 0:
            assert len(self.subs) == spec[0], (self.kind, self.subs)

    def __str__(self):
        return term_to_text(self)


def binder_spec(kind: str) -> tuple[int, ...]:
    n, spec = _TERM_KINDS[kind]
    if spec is None:
        return None  # opapp: no binders, variable arity
    return spec


def var(x: str) -> Term:
    return Term("var", name=x)


def bv(k: int) -> Term:
    return Term("bvar", index=k)


def meta(x: str) -> Term:
    return Term("meta", name=x)


UNIT = Term("unit")


def pair(u, t) -> Term:
    return Term("pair", (u, t))


def pi1(u) -> Term:
    return Term("pi1", (u,))


def pi2(u) -> Term:
    return Term("pi2", (u,))


def gen(f: str, u) -> Term:
    return Term("gen", (u,), name=f)


def opapp(op: str, *args) -> Term:
    return Term("opapp", tuple(args), name=op)


def ret(u) -> Term:
    return Term("ret", (u,))


def do(u, t, hint="x") -> Term:
    return Term("do", (u, t), hints=(hint,))


def lam(ty: TypeExpr, t, hint="x") -> Term:
    return Term("lam", (t,), tyann=ty, hints=(hint,))


def lamarrow(ty: TypeExpr | None, t, hint="x") -> Term:
    return Term("lamarrow", (t,), tyann=ty, hints=(hint,))


def app(u, v) -> Term:
    return Term("app", (u, v))


def aapp(u, v) -> Term:
    return Term("aapp", (u, v))


def letunit(t, s) -> Term:
    return Term("letunit", (t, s))


def letpair(t, s, hx="x", hy="y") -> Term:
    return Term("letpair", (t, s), hints=(hx, hy))


def letj(t, s, hint="a") -> Term:
    return Term("letj", (t, s), hints=(hint,))


def letk(t, s, hint="a") -> Term:
    return Term("letk", (t, s), hints=(hint,))


def jterm(u) -> Term:
    return Term("jterm", (u,))


def kterm(u) -> Term:
    return Term("kterm", (u,))


def rterm(t) -> Term:
    return Term("rterm", (t,))


def derelict(u) -> Term:
    return Term("derelict", (u,))


def merge(t) -> Term:
    return Term("merge", (t,))


def unmerge(t) -> Term:
    return Term("unmerge", (t,))


def regrade(xi: GradeMor, t) -> Term:
    return Term("regrade", (t,), xi=xi)


def with_subs(t: Term, subs) -> Term:
    return Term(t.kind, tuple(subs), name=t.name, index=t.index, xi=t.xi,
                tyann=t.tyann, hints=t.hints)


# ---------------------------------------------------------------------------
# Traversals

def child_binders(t: Term, i: int) -> int:
    spec = binder_spec(t.kind)
    return 0 if spec is None else spec[i]


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Shift free de Bruijn indices >= cutoff by `by`."""
    if t.kind == "bvar":
        return bv(t.index + by) if t.index >= cutoff else t
    if not t.subs:
        return t
    return with_subs(t, (shift(s, by, cutoff + child_binders(t, i))
                         for i, s in enumerate(t.subs)))


def bsubst(t: Term, j: int, u: Term) -> Term:
    """Substitute `u` for bvar j in t, lowering indices above j."""
    if t.kind == "bvar":
        if t.index == j:
            return shift(u, j)
        return bv(t.index - 1) if t.index > j else t
    if not t.subs:
        return t
    return with_subs(t, (bsubst(s, j + child_binders(t, i), u)
                         for i, s in enumerate(t.subs)))


def open_binder(body: Term, name: str) -> Term:
    """Replace the innermost binder's variable (bvar 0) by a free name."""
    return bsubst(body, 0, var(name))


def close_binder(body: Term, name: str) -> Term:
    """Inverse of open_binder: abstract the free name as bvar 0."""

    def go(t, depth):
        if t.kind == "var" and t.name == name:
            return bv(depth)
        if t.kind == "bvar" and t.index >= depth:
            return bv(t.index + 1)
        if not t.subs:
            return t
        return with_subs(t, (go(s, depth + child_binders(t, i))
                             for i, s in enumerate(t.subs)))

    return go(body, 0)


def subst_free(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding substitution of `u` for the free variable x."""
    if t.kind == "var":
        return u if t.name == x else t
    if not t.subs:
        return t
    return with_subs(t, (subst_free(s, x, u) for s in t.subs))


def free_vars(t: Term) -> frozenset:
    if t.kind == "var":
        return frozenset((t.name,))
    out = frozenset()
    for s in t.subs:
        out |= free_vars(s)
    return out


def free_var_counts(t: Term, acc=None) -> dict:
    if acc is None:
        acc = {}
    if t.kind == "var":
        acc[t.name] = acc.get(t.name, 0) + 1
    for s in t.subs:
        free_var_counts(s, acc)
    return acc


def uses_bvar(t: Term, j: int = 0) -> bool:
    if t.kind == "bvar":
        return t.index == j
    return any(uses_bvar(s, j + child_binders(t, i))
               for i, s in enumerate(t.subs))


def locally_closed(t: Term, depth: int = 0) -> bool:
    if t.kind == "bvar":
        return t.index < depth
    return all(locally_closed(s, depth + child_binders(t, i))
               for i, s in enumerate(t.subs))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(s) for s in t.subs)


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = t.subs[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    subs = list(t.subs)
    subs[i] = replace_at(subs[i], path[1:], new)
    return with_subs(t, subs)


def positions(t: Term, prefix=()) -> list:
    out = [prefix]
    for i, s in enumerate(t.subs):
        out.extend(positions(s, prefix + (i,)))
    return out


def alpha_eq(t: Term, u: Term) -> bool:
    """Alpha-equivalence: structural equality of the canonical forms."""
    return t == u


def term_key(t: Term):
    """A total order key on terms, used to orient symmetric exchanges."""
    head = (t.kind, t.name or "", t.index if t.index is not None else -1,
            str(t.xi) if t.xi else "", str(t.tyann) if t.tyann else "")
    return (head, tuple(term_key(s) for s in t.subs))


# ---------------------------------------------------------------------------
# Admissibility

_TYPES_BY_CALC = {
    "urmm": {"jt", "tt", "base"},
    "rmm": {"unit1", "prod", "jt", "tt", "base"},
    "gmm": {"unit1", "prod", "tgr", "base"},
    # lnl: A-zone and C-zone types, kept as one set; the checker enforces
    # zone discipline.
    "lnl": {"unit1", "prod", "fun", "rt", "lunit", "grty", "lolli", "jt",
            "tt", "base"},
    "arrow": {"unit1", "prod", "fun", "arr", "base"},
    "armm": {"unit1", "prod", "aabs", "jt", "kt", "tt", "base"},
}

_TERMS_BY_CALC = {
    "urmm": {"var", "bvar", "gen", "ret", "do", "opapp", "unit"},
    "rmm": {"var", "bvar", "unit", "pair", "pi1", "pi2", "gen", "ret", "do",
            "opapp"},
    "gmm": {"var", "bvar", "unit", "pair", "pi1", "pi2", "ret", "do",
            "regrade", "opapp"},
    "lnl": {"var", "bvar", "unit", "pair", "pi1", "pi2", "lam", "app",
            "letunit", "letpair", "ret", "do", "regrade", "merge", "unmerge",
            "jterm", "letj", "rterm", "derelict", "opapp"},
    "arrow": {"var", "bvar", "unit", "pair", "pi1", "pi2", "lam", "app",
              "lamarrow", "aapp", "ret", "do", "opapp"},
    "armm": {"var", "bvar", "unit", "pair", "pi1", "pi2", "lamarrow", "app",
             "aapp", "jterm", "kterm", "letj", "letk", "ret", "do", "opapp"},
}


def admissible_term_kinds(calculus: str) -> set:
    return _TERMS_BY_CALC[calculus]


def admissible_type_kinds(calculus: str) -> set:
    return _TYPES_BY_CALC[calculus]


def check_admissible(t: Term, calculus: str):
    ok = _TERMS_BY_CALC[calculus]
    for p in positions(t):
        k = subterm_at(t, p).kind
        if k not in ok and k != "meta":
            raise SyntaxError_(f"term former '{k}' is not part of {calculus}")


def type_admissible(ty: TypeExpr, calculus: str) -> bool:
    if ty.kind not in _TYPES_BY_CALC[calculus]:
        return False
    return all(type_admissible(s, calculus) for s in ty.subs)


# ---------------------------------------------------------------------------
# Judgements

ZONES = {
    ("urmm", "A"): 1, ("rmm", "A"): 1, ("gmm", "A"): 1,
    ("lnl", "A"): 1, ("lnl", "C"): 2,
    ("arrow", "A"): 1, ("arrow", "C"): 2,
    ("armm", "A"): 1, ("armm", "C"): 3,
}

Context = tuple  # tuple[tuple[str, TypeExpr], ...]


@dataclass(frozen=True)
class Judgement:
    """A calculus-tagged judgement: context zones |- term : type.

    `form` is "A" for ordinary term judgements and "C" for the second
    judgement family of the two-sorted calculi (the linear judgement of the
    LNL language, the command judgement of the arrow calculus, the
    three-zone judgement of the arrow metalanguage).
    """

    calculus: str
    form: str
    zones: tuple[Context, ...]
    term: Term
    ty: TypeExpr

    def __post_init__(self):
        n = ZONES.get((self.calculus, self.form))
        if n is None:
            raise SyntaxError_(
                f"judgement form {self.form!r} does not exist in {self.calculus}")
        if len(self.zones) != n:
            raise SyntaxError_(
                f"{self.calculus}/{self.form} judgements take {n} context zone(s),"
                f" got {len(self.zones)}")
        seen = set()
        for zone in self.zones:
            for name, _ in zone:
                if name in seen:
                    raise SyntaxError_(f"duplicate context variable {name!r}")
                seen.add(name)

    @property
    def is_command(self) -> bool:
        return self.calculus == "arrow" and self.form == "C"

    def __str__(self):
        zs = " ; ".join(
            ", ".join(f"{x} : {type_to_text(ty)}" for x, ty in zone) or "-"
            for zone in self.zones)
        bang = " !" if self.is_command else " :"
        return f"[{self.calculus}/{self.form}] {zs} |-{bang} " \
               f"{term_to_text(self.term)} : {type_to_text(self.ty)}"


def judgement(calculus, zones, term, ty, form=None) -> Judgement:
    if form is None:
        form = "A" if (calculus, "C") not in ZONES else "C"
    return Judgement(calculus, form, tuple(tuple(z) for z in zones), term, ty)


def all_zone_vars(j: Judgement):
    for zone in j.zones:
        yield from zone


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow2>=>|->|-o|~>|<-|>=)
  | (?P<lp>\()|(?P<rp>\))
  | (?P<sym>[,.:;<>*=\[\]{}])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|[0-9]+)
""", re.VERBOSE)

KEYWORDS = {"do", "in", "let", "lam", "lamarrow", "app", "ret", "pi1", "pi2",
            "derelict", "merge", "unmerge", "regrade", "J", "K", "R", "T",
            "gr", "I"}


def tokenize(text: str):
    toks, line, col, i = [], 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise SyntaxError_(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind not in ("ws", "comment"):
            toks.append((val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            col = len(val) - val.rfind("\n")
        else:
            col += len(val)
        i = m.end()
    toks.append((None, line, col))
    return toks


class _P:
    """Recursive-descent parser over the token list."""

    def __init__(self, toks, sig=None, calculus="rmm"):
        self.toks = toks
        self.i = 0
        self.sig = sig
        self.calculus = calculus

    def peek(self):
        return self.toks[self.i][0]

    def peek2(self):
        return self.toks[self.i + 1][0] if self.i + 1 < len(self.toks) else None

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t[0]

    def expect(self, tok):
        got, line, col = self.toks[self.i]
        if got != tok:
            raise SyntaxError_(f"expected {tok!r}, found {got!r}", line, col)
        self.i += 1

    def err(self, msg):
        _, line, col = self.toks[self.i]
        raise SyntaxError_(msg, line, col)

    # -- helpers over the signature ------------------------------------

    def is_gen(self, name):
        return self.sig is not None and self.sig.has_generator(name)

    def is_op(self, name):
        return self.sig is not None and self.sig.has_op(name)

    # -- grades ---------------------------------------------------------

    def grade(self) -> Grade:
        left = self.grade_atom()
        while self.peek() == "*":
            self.next()
            left = gtensor(left, self.grade_atom())
        return left

    def grade_atom(self) -> Grade:
        tok = self.next()
        if tok is None:
            self.err("expected a grade")
        if tok == "(":
            g = self.grade()
            self.expect(")")
            return g
        if tok.isdigit():
            return gnat(int(tok))
        return gname(tok)

    def grade_mor(self) -> GradeMor:
        save = self.i
        first = self.grade()
        if self.peek() == ">=":
            self.next()
            second = self.grade()
            return GradeMor(first, second)
        # presented-grading generator word  g;f  (endpoints resolved later)
        self.i = save
        word = [self.next()]
        while self.peek() == ";":
            self.next()
            word.append(self.next())
        if self.sig is None or self.sig.grading is None:
            self.err("grade morphism word needs a presented grading in scope")
        return self.sig.grading.word_mor(tuple(word))

    # -- types ----------------------------------------------------------

    def type_(self) -> TypeExpr:
        left = self.type_prod()
        tok = self.peek()
        if tok in ("->", "-o", "=>", "~>"):
            self.next()
            right = self.type_()
            kind = {"->": fun, "-o": lolli, "=>": aabs, "~>": arr}[tok]
            return kind(left, right)
        return left

    def type_prod(self) -> TypeExpr:
        left = self.type_atom()
        while self.peek() == "*":
            self.next()
            left = prod(left, self.type_atom())
        return left

    def type_atom(self) -> TypeExpr:
        tok = self.next()
        if tok == "1":
            return UNIT1
        if tok == "I":
            return LUNIT
        if tok == "(":
            ty = self.type_()
            self.expect(")")
            return ty
        if tok in ("J", "K", "T", "R"):
            self.expect("(")
            inner = self.type_()
            self.expect(")")
            return {"J": jt, "K": kt, "T": tt, "R": rt}[tok](inner)
        if tok == "gr":
            self.expect("(")
            g = self.grade()
            self.expect(")")
            return grty(g)
        if tok == "T_":
            self.expect("(")
            grade = self.grade()
            self.expect(")")
            self.expect("(")
            inner = self.type_()
            self.expect(")")
            return tgr(grade, inner)
        if tok is not None and tok.startswith("T_"):
            g = tok[2:]
            grade = gnat(int(g)) if g.isdigit() else gname(g)
            self.expect("(")
            inner = self.type_()
            self.expect(")")
            return tgr(grade, inner)
        if tok is not None and (tok[0].isalpha() or tok[0] == "_" or tok.isdigit()):
            return base(tok)
        self.err(f"expected a type, found {tok!r}")

    # -- terms ----------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok == "do":
            self.next()
            x = self.next()
            self.expect("<-")
            u = self.term()
            self.expect("in")
            t = self.term()
            return do(u, close_binder(t, x), hint=x)
        if tok == "let":
            return self.let_()
        if tok == "lam":
            self.next()
            self.expect("(")
            x = self.next()
            self.expect(":")
            ty = self.type_()
            self.expect(")")
            self.expect(".")
            t = self.term()
            return lam(ty, close_binder(t, x), hint=x)
        if tok == "lamarrow":
            self.next()
            if self.peek() == "(":
                self.next()
                x = self.next()
                self.expect(":")
                ty = self.type_()
                self.expect(")")
            else:
                x, ty = self.next(), None
            self.expect(".")
            t = self.term()
            return lamarrow(ty, close_binder(t, x), hint=x)
        if tok == "app":
            self.next()
            u = self.dotterm()
            v = self.dotterm()
            return app(u, v)
        return self.dotterm()

    def let_(self) -> Term:
        self.expect("let")
        tok = self.next()
        if tok == "(":
            if self.peek() == ")":
                self.next()
                self.expect("=")
                t = self.term()
                self.expect("in")
                s = self.term()
                return letunit(t, s)
            x = self.next()
            self.expect(",")
            y = self.next()
            self.expect(")")
            self.expect("=")
            t = self.term()
            self.expect("in")
            s = self.term()
            return letpair(t, close_binder(close_binder(s, x), y), hx=x, hy=y)
        if tok in ("J", "K"):
            self.expect("(")
            a = self.next()
            self.expect(")")
            self.expect("=")
            t = self.term()
            self.expect("in")
            s = self.term()
            mk = letj if tok == "J" else letk
            return mk(t, close_binder(s, a), hint=a)
        self.err("expected a let pattern: (), (x,y), J(a), or K(a)")

    def dotterm(self) -> Term:
        left = self.prefixterm()
        while self.peek() == ".":
            self.next()
            left = aapp(left, self.prefixterm())
        return left

    def prefixterm(self) -> Term:
        tok = self.peek()
        if tok in ("ret", "pi1", "pi2", "derelict", "merge", "unmerge"):
            self.next()
            inner = self.prefixterm()
            return {"ret": ret, "pi1": pi1, "pi2": pi2, "derelict": derelict,
                    "merge": merge, "unmerge": unmerge}[tok](inner)
        if tok == "regrade":
            self.next()
            self.expect("<")
            xi = self.grade_mor()
            self.expect(">")
            return regrade(xi, self.prefixterm())
        if tok in ("J", "K", "R") and self.peek2() == "(":
            self.next()
            self.next()
            inner = self.term()
            self.expect(")")
            return {"J": jterm, "K": kterm, "R": rterm}[tok](inner)
        if tok is not None and tok not in KEYWORDS and self.is_gen(tok) \
                and tok[0].isalpha():
            self.next()
            return gen(tok, self.prefixterm())
        return self.atom()

    def atom(self) -> Term:
        tok = self.next()
        if tok == "(":
            if self.peek() == ")":
                self.next()
                return UNIT
            t = self.term()
            if self.peek() == ",":
                self.next()
                s = self.term()
                self.expect(")")
                return pair(t, s)
            self.expect(")")
            return t
        if tok is None or not (tok[0].isalpha() or tok[0] == "_"):
            self.i -= 1
            self.err(f"expected a term, found {tok!r}")
        if tok in KEYWORDS:
            self.i -= 1
            self.err(f"keyword {tok!r} cannot be used as a variable")
        if self.is_op(tok):
            arity = self.sig.op_arity(tok)
            if arity == 0:
                return opapp(tok)
            self.expect("(")
            args = [self.term()]
            while self.peek() == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            if len(args) != arity:
                self.err(f"operation {tok} expects {arity} argument(s),"
                         f" got {len(args)}")
            return opapp(tok, *args)
        return var(tok)


def parse_term(text: str, calculus: str = "rmm", sig=None) -> Term:
    """Parse surface syntax into a locally nameless Term.

    Raises SyntaxError_ with line/column info on lex or grammar errors;
    also rejects term formers that the calculus does not admit.
    """
    p = _P(tokenize(text), sig=sig, calculus=calculus)
    t = p.term()
    if p.peek() is not None:
        p.err(f"trailing input starting at {p.peek()!r}")
    check_admissible(t, calculus)
    return t


def parse_type(text: str, sig=None) -> TypeExpr:
    p = _P(tokenize(text), sig=sig)
    ty = p.type_()
    if p.peek() is not None:
        p.err(f"trailing input starting at {p.peek()!r}")
    return ty


def parse_context(text: str, sig=None) -> Context:
    """Parse `x : T, y : U` (or `-` / empty for the empty context)."""
    text = text.strip()
    if text in ("", "-"):
        return ()
    p = _P(tokenize(text), sig=sig)
    out = []
    while True:
        x = p.next()
        p.expect(":")
        out.append((x, p.type_()))
        if p.peek() != ",":
            break
        p.next()
    if p.peek() is not None:
        p.err(f"trailing input starting at {p.peek()!r}")
    return tuple(out)


# ---------------------------------------------------------------------------
# Printing

def type_to_text(ty: TypeExpr) -> str:
    def atom(t):
        s = go(t)
        if t.kind in ("prod", "fun", "lolli", "arr", "aabs"):
            return f"({s})"
        return s

    def go(t):
        match t.kind:
            case "unit1":
                return "1"
            case "lunit":
                return "I"
            case "base":
                return t.name
            case "prod":
                return f"{atom(t.subs[0])} * {atom(t.subs[1])}"
            case "fun" | "lolli" | "arr" | "aabs":
                op = {"fun": "->", "lolli": "-o", "arr": "~>", "aabs": "=>"}[t.kind]
                lhs = atom(t.subs[0])
                rhs = go(t.subs[1]) if t.subs[1].kind in (
                    "fun", "lolli", "arr", "aabs") else atom(t.subs[1])
                return f"{lhs} {op} {rhs}"
            case "jt" | "kt" | "tt" | "rt":
                return f"{t.kind[0].upper()}({go(t.subs[0])})"
            case "tgr":
                g = t.grade
                if g.kind == "tensor":
                    return f"T_({g})({go(t.subs[0])})"
                return f"T_{g}({go(t.subs[0])})"
            case "grty":
                return f"gr({t.grade})"
        raise AssertionError(t.kind)

    return go(ty)


def _fresh(hint: str, avoid: set) -> str:
    if hint not in avoid:
        return hint
    k = 1
    while f"{hint}{k}" in avoid:
        k += 1
    return f"{hint}{k}"


def term_to_text(t: Term, avoid: frozenset | None = None) -> str:
    """Pretty-print in the surface grammar; parse(print(t)) is alpha-equal."""
    avoid = set(avoid if avoid is not None else free_vars(t))

    def atom(t):
        # arguments of prefix operators may be prefix chains themselves
        s = go(t)
        if t.kind in ("var", "unit", "pair", "bvar", "jterm", "kterm",
                      "rterm", "opapp", "gen", "ret", "pi1", "pi2",
                      "derelict", "merge", "unmerge", "regrade"):
            return s
        return f"({s})"

    def go(t):
        match t.kind:
            case "var":
                return t.name
            case "bvar":
                return f"?b{t.index}"  # only reachable on open terms
            case "meta":
                return f"?{t.name}"
            case "unit":
                return "()"
            case "pair":
                return f"({go(t.subs[0])}, {go(t.subs[1])})"
            case "pi1" | "pi2" | "ret" | "derelict" | "merge" | "unmerge":
                return f"{t.kind} {atom(t.subs[0])}"
            case "gen":
                return f"{t.name} {atom(t.subs[0])}"
            case "opapp":
                if not t.subs:
                    return t.name
                return f"{t.name}({', '.join(go(s) for s in t.subs)})"
            case "regrade":
                return f"regrade<{t.xi}> {atom(t.subs[0])}"
            case "do":
                x = _fresh(t.hints[0] if t.hints else "x", avoid)
                avoid.add(x)
                s = f"do {x} <- {go(t.subs[0])} in {go(open_binder(t.subs[1], x))}"
                avoid.discard(x)
                return s
            case "lam" | "lamarrow":
                x = _fresh(t.hints[0] if t.hints else "x", avoid)
                avoid.add(x)
                head = f"lam ({x}:{type_to_text(t.tyann)})" if t.kind == "lam" \
                    else (f"lamarrow ({x}:{type_to_text(t.tyann)})"
                          if t.tyann is not None else f"lamarrow {x}")
                s = f"{head}. {go(open_binder(t.subs[0], x))}"
                avoid.discard(x)
                return s
            case "app":
                return f"app {atom(t.subs[0])} {atom(t.subs[1])}"
            case "aapp":
                lhs = atom(t.subs[0]) if t.subs[0].kind != "aapp" else go(t.subs[0])
                return f"{lhs} . {atom(t.subs[1])}"
            case "letunit":
                return f"let () = {go(t.subs[0])} in {go(t.subs[1])}"
            case "letpair":
                hx = _fresh(t.hints[0] if t.hints else "x", avoid)
                avoid.add(hx)
                hy = _fresh(t.hints[1] if len(t.hints) > 1 else "y", avoid)
                avoid.add(hy)
                body = open_binder(open_binder(t.subs[1], hy), hx)
                s = f"let ({hx},{hy}) = {go(t.subs[0])} in {go(body)}"
                avoid.discard(hx)
                avoid.discard(hy)
                return s
            case "letj" | "letk":
                a = _fresh(t.hints[0] if t.hints else "a", avoid)
                avoid.add(a)
                tag = "J" if t.kind == "letj" else "K"
                s = f"let {tag}({a}) = {go(t.subs[0])} in {go(open_binder(t.subs[1], a))}"
                avoid.discard(a)
                return s
            case "jterm" | "kterm" | "rterm":
                tag = {"jterm": "J", "kterm": "K", "rterm": "R"}[t.kind]
                return f"{tag}({go(t.subs[0])})"
        raise AssertionError(t.kind)

    return go(t)
