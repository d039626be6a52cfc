"""Judgement checking for all six calculi.

The checker is bidirectional (synthesis wherever the term determines its
type, checking against an expected type otherwise), syntax-directed, and
produces a full derivation tree on acceptance.  Linear contexts in the LNL
calculus use leftover-free splitting: each multiplicative node partitions
the available linear variables by free occurrence, which is the unique
valid split when one exists.

Accepted judgements carry annotations mapping each term position to its
zone and type; the rewrite engine and the evaluators are driven by these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax
from .signatures import Signature, SignatureError
from .syntax import (Judgement, Term, TypeExpr, base, free_vars, grty,
                     jt, kt, open_binder, prod, tgr, tt, type_to_text)


@dataclass
class Derivation:
    rule: str
    judgement: Judgement
    children: tuple = ()

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class CheckResult:
    ok: bool
    message: str = ""
    path: tuple | None = None
    rule: str | None = None
    expected: str | None = None
    actual: str | None = None
    derivation: Derivation | None = None
    annotations: dict = field(default_factory=dict)  # path -> (form, TypeExpr)

    def __bool__(self):
        return self.ok


class _Fail(Exception):
    def __init__(self, path, rule, message, expected=None, actual=None):
        self.path, self.rule, self.message = path, rule, message
        self.expected, self.actual = expected, actual
        super().__init__(message)


class LinearityError(_Fail):
    pass


# ---------------------------------------------------------------------------
# Type equality and validation

def types_equal(t1: TypeExpr, t2: TypeExpr, grading=None) -> bool:
    if t1.kind != t2.kind or t1.name != t2.name:
        return False
    if t1.grade is not None or t2.grade is not None:
        if grading is not None:
            if not grading.equal_grades(t1.grade, t2.grade):
                return False
        elif t1.grade != t2.grade:
            return False
    if len(t1.subs) != len(t2.subs):
        return False
    return all(types_equal(a, b, grading) for a, b in zip(t1.subs, t2.subs))


def validate_type(ty: TypeExpr, calculus: str, zone: str, sig: Signature,
                  path=()):
    """Zone-discipline validation: which type formers may appear where, and
    whether named objects / grades are declared."""

    def need(cond, msg):
        if not cond:
            raise _Fail(path, "type", msg)

    k = ty.kind
    if calculus in ("urmm", "rmm"):
        need(k in ("unit1", "prod", "jt", "tt"),
             f"type former {k} not admissible in {calculus}")
        if calculus == "urmm":
            need(k in ("jt", "tt"), "unary calculus types are J(A) | T(A)")
        if k in ("jt", "tt"):
            inner = ty.subs[0]
            # the terminal object may be written 1; other objects by name
            need(inner.kind == "unit1" or
                 (inner.kind == "base" and sig.has_object(inner.name)),
                 f"{type_to_text(ty)}: argument must be a declared object")
            return
        for s in ty.subs:
            validate_type(s, calculus, zone, sig, path)
        return
    if calculus == "gmm":
        need(k in ("unit1", "prod", "tgr", "base"),
             f"type former {k} not admissible in gmm")
        if k == "base":
            need(sig.has_object(ty.name),
                 f"base type {ty.name!r} is not a declared object")
            return
        if k == "tgr":
            need(sig.grading is not None, "graded types need a grading")
            need(sig.grading.has_object(ty.grade),
                 f"grade {ty.grade} not an object of the grading")
            validate_type(ty.subs[0], calculus, zone, sig, path)
            return
        for s in ty.subs:
            validate_type(s, calculus, zone, sig, path)
        return
    if calculus == "lnl":
        if zone == "A":
            need(k in ("unit1", "prod", "fun", "rt", "base"),
                 f"type former {k} not an A-zone type")
            if k == "base":
                need(sig.has_object(ty.name),
                     f"base type {ty.name!r} is not a declared object")
                return
            if k == "rt":
                validate_type(ty.subs[0], calculus, "C", sig, path)
                return
        else:
            need(k in ("lunit", "grty", "prod", "lolli", "jt", "tt"),
                 f"type former {k} not a linear-zone type")
            if k == "grty":
                need(sig.grading is not None, "grade types need a grading")
                need(sig.grading.has_object(ty.grade),
                     f"grade {ty.grade} not an object of the grading")
                return
            if k in ("jt", "tt"):
                validate_type(ty.subs[0], calculus, "A", sig, path)
                return
        for s in ty.subs:
            validate_type(s, calculus, zone, sig, path)
        return
    if calculus == "arrow":
        need(k in ("unit1", "prod", "fun", "arr", "base"),
             f"type former {k} not admissible in the arrow calculus")
        if k == "base":
            need(sig.has_object(ty.name),
                 f"base type {ty.name!r} is not a declared object")
            return
        for s in ty.subs:
            validate_type(s, calculus, zone, sig, path)
        return
    if calculus == "armm":
        if zone == "A":
            need(k in ("unit1", "prod", "aabs", "base"),
                 f"type former {k} not an A-zone type")
            if k == "base":
                need(sig.has_object(ty.name),
                     f"base type {ty.name!r} is not a declared object")
                return
            if k == "aabs":
                validate_type(ty.subs[0], calculus, "A", sig, path)
                validate_type(ty.subs[1], calculus, "C", sig, path)
                return
        else:
            need(k in ("unit1", "prod", "jt", "kt", "tt"),
                 f"type former {k} not a C-zone type")
            if k in ("jt", "kt", "tt"):
                validate_type(ty.subs[0], calculus, "A", sig, path)
                return
        for s in ty.subs:
            validate_type(s, calculus, zone, sig, path)
        return
    raise _Fail(path, "type", f"unknown calculus {calculus}")


# ---------------------------------------------------------------------------
# Linear splitting

def split_linear(delta: dict, subterms) -> list[dict]:
    """Partition the available linear context among ordered subterms by free
    occurrence.  The split is unique when it exists; duplicated use raises.
    Unused variables are left unclaimed (callers decide where emptiness is
    required)."""
    claims = []
    for t in subterms:
        fv = free_vars(t)
        claims.append({x: ty for x, ty in delta.items() if x in fv})
    seen = {}
    for i, c in enumerate(claims):
        for x in c:
            if x in seen:
                raise LinearityError(
                    (), "linear-split",
                    f"linear variable {x!r} used in two subterms")
            seen[x] = i
    return claims


# ---------------------------------------------------------------------------
# The checker

def _fresh(hint, used):
    return syntax._fresh(hint or "x", used)


class _Checker:
    def __init__(self, sig: Signature, calculus: str):
        self.sig = sig
        self.calculus = calculus
        self.grading = sig.grading
        self.annotations = {}

    # .. helpers ..........................................................

    def teq(self, t1, t2):
        return types_equal(t1, t2, self.grading)

    def fail(self, path, rule, msg, expected=None, actual=None):
        raise _Fail(path, rule, msg,
                    None if expected is None else type_to_text(expected),
                    None if actual is None else type_to_text(actual))

    def note(self, path, form, ty):
        self.annotations[path] = (form, ty)

    def gen_endpoints(self, name, path):
        try:
            g = self.sig.gen_decl(name)
        except SignatureError as e:
            raise _Fail(path, "gen", str(e))
        return g.src, g.tgt

    def open1(self, t, hint, used):
        x = _fresh(hint, used)
        return x, open_binder(t, x)

    def deriv(self, rule, zones, term, ty, children=(), form="A"):
        j = Judgement(self.calculus, form, tuple(tuple(z) for z in zones),
                      term, ty)
        return Derivation(rule, j, tuple(children))

    # .. entry ............................................................

    def check_judgement(self, j: Judgement) -> Derivation:
        for zi, zone in enumerate(j.zones):
            zkind = self.zone_kind(j.form, zi)
            for x, ty in zone:
                validate_type(ty, self.calculus, zkind, self.sig)
        validate_type(j.ty, self.calculus,
                      "C" if j.form == "C" else "A", self.sig)
        used = {x for x, _ in syntax.all_zone_vars(j)} | free_vars(j.term)
        if self.calculus in ("urmm", "rmm", "gmm"):
            if self.calculus == "urmm" and len(j.zones[0]) != 1:
                self.fail((), "judgement",
                          "the unary calculus takes exactly one context variable")
            gamma = dict(j.zones[0])
            d, ty = self.synth_a(j.term, (), gamma, used, expect=j.ty)
            if not self.teq(ty, j.ty):
                self.fail((), "judgement", "result type mismatch", j.ty, ty)
            return d
        if self.calculus == "lnl":
            if j.form == "A":
                gamma = dict(j.zones[0])
                d, ty = self.synth_a(j.term, (), gamma, used, expect=j.ty)
            else:
                gamma, delta = dict(j.zones[0]), dict(j.zones[1])
                unused = set(delta) - free_vars(j.term)
                if unused:
                    raise LinearityError(
                        (), "linear", f"unused linear variable(s): "
                        f"{', '.join(sorted(unused))}")
                d, ty = self.synth_lnl_c(j.term, (), gamma, delta, used,
                                         expect=j.ty)
            if not self.teq(ty, j.ty):
                self.fail((), "judgement", "result type mismatch", j.ty, ty)
            return d
        if self.calculus == "arrow":
            gamma = dict(j.zones[0])
            if j.form == "A":
                d, ty = self.synth_a(j.term, (), gamma, used, expect=j.ty)
            else:
                delta = dict(j.zones[1])
                d, ty = self.synth_command(j.term, (), gamma, delta,
                                           list(j.zones[1]), used, expect=j.ty)
            if not self.teq(ty, j.ty):
                self.fail((), "judgement", "result type mismatch", j.ty, ty)
            return d
        if self.calculus == "armm":
            gamma = dict(j.zones[0])
            if j.form == "A":
                d, ty = self.synth_a(j.term, (), gamma, used, expect=j.ty)
            else:
                delta, phi = dict(j.zones[1]), dict(j.zones[2])
                d, ty = self.synth_armm_c(j.term, (), gamma, delta, phi, used,
                                          expect=j.ty)
            if not self.teq(ty, j.ty):
                self.fail((), "judgement", "result type mismatch", j.ty, ty)
            return d
        self.fail((), "judgement", f"unknown calculus {self.calculus}")

    def zone_kind(self, form, zi):
        if self.calculus == "lnl":
            return "A" if form == "A" or zi == 0 else "C"
        if self.calculus == "armm":
            return "C" if form == "C" and zi == 2 else "A"
        return "A"

    # .. A-zone synthesis (Cartesian judgements of every calculus) ........

    def synth_a(self, t: Term, path, gamma, used, expect=None):
        calc = self.calculus
        k = t.kind
        match k:
            case "var":
                if t.name not in gamma:
                    self.fail(path, "var", f"unbound variable {t.name!r}")
                ty = gamma[t.name]
                self.note(path, "A", ty)
                return self.deriv("var", (tuple(gamma.items()),), t, ty), ty
            case "unit":
                ty = syntax.UNIT1
                if calc in ("rmm", "urmm") and expect is not None and \
                        expect.kind == "jt" and expect.subs[0].kind == "unit1":
                    # () inhabits J(1): the terminal object's unique element
                    ty = expect
                    self.note(path, "A", ty)
                    return self.deriv("unit-j", (tuple(gamma.items()),), t, ty), ty
                self.note(path, "A", ty)
                return self.deriv("unit", (tuple(gamma.items()),), t, ty), ty
            case "pair":
                e1 = e2 = None
                if expect is not None and expect.kind == "prod":
                    e1, e2 = expect.subs
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used, e1)
                d2, ty2 = self.synth_a(t.subs[1], path + (1,), gamma, used, e2)
                ty = prod(ty1, ty2)
                self.note(path, "A", ty)
                return self.deriv("pair", (tuple(gamma.items()),), t, ty,
                                  (d1, d2)), ty
            case "pi1" | "pi2":
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if ty1.kind != "prod":
                    self.fail(path, k, "projection of a non-product",
                              actual=ty1)
                ty = ty1.subs[0 if k == "pi1" else 1]
                self.note(path, "A", ty)
                return self.deriv(k, (tuple(gamma.items()),), t, ty, (d1,)), ty
            case "gen":
                src, tgt = self.gen_endpoints(t.name, path)
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used,
                                       expect=jt(base(src)))
                if not self.teq(ty1, jt(base(src))):
                    self.fail(path, "gen", f"generator {t.name} expects",
                              jt(base(src)), ty1)
                ty = jt(base(tgt))
                self.note(path, "A", ty)
                return self.deriv("gen", (tuple(gamma.items()),), t, ty,
                                  (d1,)), ty
            case "ret":
                if calc == "gmm":
                    d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                    ty = tgr(self.grading.unit(), ty1)
                    self.note(path, "A", ty)
                    return self.deriv("ret", (tuple(gamma.items()),), t, ty,
                                      (d1,)), ty
                ej = expect.subs[0] if expect is not None and \
                    expect.kind == "tt" else None
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used,
                                       expect=None if ej is None else jt(ej))
                if ty1.kind != "jt":
                    self.fail(path, "ret", "ret expects a J-typed argument",
                              actual=ty1)
                ty = tt(ty1.subs[0])
                self.note(path, "A", ty)
                return self.deriv("ret", (tuple(gamma.items()),), t, ty,
                                  (d1,)), ty
            case "do":
                return self.synth_do_a(t, path, gamma, used, expect)
            case "opapp":
                return self.synth_opapp(t, path, gamma, used,
                                        lambda s, p, e: self.synth_a(
                                            s, p, gamma, used, e))
            case "regrade":
                if calc != "gmm":
                    self.fail(path, "regrade", "regrade is a graded-calculus term")
                xi = self.grading.norm_mor(t.xi)
                if not self.grading.has_mor(xi):
                    self.fail(path, "regrade",
                              f"no grading morphism {t.xi}")
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if ty1.kind != "tgr" or not self.grading.equal_grades(
                        ty1.grade, xi.tgt):
                    self.fail(path, "regrade",
                              f"regrade<{t.xi}> applies at grade {xi.tgt}",
                              tgr(xi.tgt, base("_")), ty1)
                ty = tgr(xi.src, ty1.subs[0])
                self.note(path, "A", ty)
                return self.deriv("regrade", (tuple(gamma.items()),), t, ty,
                                  (d1,)), ty
            case "lam":
                if calc not in ("lnl", "arrow"):
                    self.fail(path, "lam", f"lambda is not a term of {calc}")
                x, body = self.open1(t.subs[0], t.hints[0] if t.hints else "x",
                                     used)
                g2 = dict(gamma)
                g2[x] = t.tyann
                eb = expect.subs[1] if expect is not None and \
                    expect.kind == "fun" else None
                d1, tyb = self.synth_a(body, path + (0,), g2, used | {x}, eb)
                ty = syntax.fun(t.tyann, tyb)
                self.note(path, "A", ty)
                return self.deriv("lam", (tuple(gamma.items()),), t, ty,
                                  (d1,)), ty
            case "app":
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if calc == "armm":
                    if ty1.kind != "aabs" or ty1.subs[1].kind != "jt":
                        self.fail(path, "app",
                                  "application expects u : A => J(B)",
                                  actual=ty1)
                    d2, ty2 = self.synth_a(t.subs[1], path + (1,), gamma,
                                           used, expect=ty1.subs[0])
                    if not self.teq(ty2, ty1.subs[0]):
                        self.fail(path, "app", "argument type mismatch",
                                  ty1.subs[0], ty2)
                    ty = ty1.subs[1].subs[0]
                else:
                    if ty1.kind != "fun":
                        self.fail(path, "app", "application of a non-function",
                                  actual=ty1)
                    d2, ty2 = self.synth_a(t.subs[1], path + (1,), gamma,
                                           used, expect=ty1.subs[0])
                    if not self.teq(ty2, ty1.subs[0]):
                        self.fail(path, "app", "argument type mismatch",
                                  ty1.subs[0], ty2)
                    ty = ty1.subs[1]
                self.note(path, "A", ty)
                return self.deriv("app", (tuple(gamma.items()),), t, ty,
                                  (d1, d2)), ty
            case "rterm":
                if calc != "lnl":
                    self.fail(path, "rterm", "R(-) is an LNL term")
                d1, ty1 = self.synth_lnl_c(
                    t.subs[0], path + (0,), gamma, {}, used,
                    expect=expect.subs[0] if expect is not None and
                    expect.kind == "rt" else None)
                ty = syntax.rt(ty1)
                self.note(path, "A", ty)
                return self.deriv("rterm", (tuple(gamma.items()),), t, ty,
                                  (d1,)), ty
            case "lamarrow":
                return self.synth_lamarrow(t, path, gamma, used, expect)
        self.fail(path, k, f"term former {k!r} cannot appear in an"
                           f" {calc} term judgement here")

    def synth_do_a(self, t, path, gamma, used, expect):
        calc = self.calculus
        d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
        hint = t.hints[0] if t.hints else "x"
        if calc == "gmm":
            if ty1.kind != "tgr":
                self.fail(path, "do", "do expects a graded computation",
                          actual=ty1)
            x, body = self.open1(t.subs[1], hint, used)
            g2 = dict(gamma)
            g2[x] = ty1.subs[0]
            d2, ty2 = self.synth_a(body, path + (1,), g2, used | {x})
            if ty2.kind != "tgr":
                self.fail(path, "do", "do body must be a graded computation",
                          actual=ty2)
            m = self.grading.norm(ty1.grade)
            n = self.grading.norm(ty2.grade)
            ty = tgr(self.grading.tensor(m, n), ty2.subs[0])
            self.note(path, "A", ty)
            return self.deriv("do", (tuple(gamma.items()),), t, ty,
                              (d1, d2)), ty
        if ty1.kind != "tt":
            self.fail(path, "do", "do expects a computation", actual=ty1)
        x, body = self.open1(t.subs[1], hint, used)
        if calc == "urmm":
            g2 = {x: jt(ty1.subs[0])}
        else:
            g2 = dict(gamma)
            g2[x] = jt(ty1.subs[0])
        d2, ty2 = self.synth_a(body, path + (1,), g2, used | {x},
                               expect=expect)
        if ty2.kind != "tt":
            self.fail(path, "do", "do body must be a computation", actual=ty2)
        self.note(path, "A", ty2)
        return self.deriv("do", (tuple(gamma.items()),), t, ty2,
                          (d1, d2)), ty2

    def synth_opapp(self, t, path, gamma, used, subcheck):
        try:
            decl = self.sig.op_decl(t.name)
        except SignatureError as e:
            raise _Fail(path, "op", str(e))
        if len(t.subs) != len(decl.params):
            self.fail(path, "op", f"operation {t.name} expects"
                      f" {len(decl.params)} argument(s), got {len(t.subs)}")
        children = []
        for i, (s, (_, pty)) in enumerate(zip(t.subs, decl.params)):
            d, ty = subcheck(s, path + (i,), pty)
            if not self.teq(ty, pty):
                self.fail(path + (i,), "op", f"operation {t.name} argument"
                          f" {i + 1} type mismatch", pty, ty)
            children.append(d)
        self.note(path, "A", decl.result)
        return self.deriv("op", (tuple(gamma.items()),), t, decl.result,
                          tuple(children)), decl.result

    def synth_lamarrow(self, t, path, gamma, used, expect):
        calc = self.calculus
        hint = t.hints[0] if t.hints else "x"
        if calc == "arrow":
            ann = t.tyann
            if ann is None:
                if expect is None or expect.kind != "arr":
                    self.fail(path, "lamarrow",
                              "unannotated arrow abstraction needs an expected"
                              " arrow type")
                ann = expect.subs[0]
            x, body = self.open1(t.subs[0], hint, used)
            d1, tyb = self.synth_command(
                body, path + (0,), gamma, {x: ann}, [(x, ann)], used | {x},
                expect=expect.subs[1] if expect is not None and
                expect.kind == "arr" else None)
            ty = syntax.arr(ann, tyb)
            self.note(path, "A", ty)
            return self.deriv("lamarrow", (tuple(gamma.items()),), t, ty,
                              (d1,)), ty
        if calc == "armm":
            ann = t.tyann
            if ann is None:
                if expect is None or expect.kind != "aabs":
                    self.fail(path, "lamarrow",
                              "unannotated abstraction needs an expected"
                              " =>-type")
                ann = expect.subs[0]
            x, body = self.open1(t.subs[0], hint, used)
            d1, tyb = self.synth_armm_c(
                body, path + (0,), gamma, {x: ann}, {}, used | {x},
                expect=expect.subs[1] if expect is not None and
                expect.kind == "aabs" else None)
            ty = syntax.aabs(ann, tyb)
            self.note(path, "A", ty)
            return self.deriv("lamarrow", (tuple(gamma.items()),), t, ty,
                              (d1,)), ty
        self.fail(path, "lamarrow", f"arrow abstraction is not a term of {calc}")

    # .. LNL linear judgements ............................................

    def synth_lnl_c(self, t: Term, path, gamma, delta, used, expect=None):
        k = t.kind
        zs = (tuple(gamma.items()), tuple(delta.items()))

        def split(*subterms):
            try:
                return split_linear(delta, subterms)
            except LinearityError as e:
                raise LinearityError(path, e.rule, e.message)

        def require_empty_share(rule):
            if delta:
                # the share routed here must be empty (subterm is nonlinear)
                raise LinearityError(
                    path, rule, f"linear variable(s) "
                    f"{', '.join(sorted(delta))} cannot be used under {rule}")

        match k:
            case "var":
                if t.name in delta:
                    ty = delta[t.name]
                    self.note(path, "C", ty)
                    return self.deriv("lvar", zs, t, ty, form="C"), ty
                if t.name in gamma:
                    raise LinearityError(
                        path, "lvar", f"nonlinear variable {t.name!r} used as"
                        f" a linear term (use J(-)/derelict)")
                self.fail(path, "lvar", f"unbound variable {t.name!r}")
            case "unit":
                require_empty_share("unit")
                ty = syntax.LUNIT
                self.note(path, "C", ty)
                return self.deriv("lunit", zs, t, ty, form="C"), ty
            case "pair":
                c0, c1 = split(t.subs[0], t.subs[1])
                e = expect if expect is not None and expect.kind == "prod" \
                    else None
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used, e.subs[0] if e else None)
                d2, ty2 = self.synth_lnl_c(t.subs[1], path + (1,), gamma, c1,
                                           used, e.subs[1] if e else None)
                ty = prod(ty1, ty2)
                self.note(path, "C", ty)
                return self.deriv("tensor", zs, t, ty, (d1, d2), form="C"), ty
            case "letunit":
                c0, c1 = split(t.subs[0], t.subs[1])
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used, syntax.LUNIT)
                if ty1.kind != "lunit":
                    self.fail(path, "letunit", "let () scrutinee must have"
                              " type I", syntax.LUNIT, ty1)
                d2, ty2 = self.synth_lnl_c(t.subs[1], path + (1,), gamma, c1,
                                           used, expect)
                self.note(path, "C", ty2)
                return self.deriv("letunit", zs, t, ty2, (d1, d2), form="C"), ty2
            case "letpair":
                c0, c1 = split(t.subs[0], t.subs[1])
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used)
                if ty1.kind != "prod":
                    self.fail(path, "letpair", "let (x,y) scrutinee must have"
                              " a tensor type", actual=ty1)
                hx = t.hints[0] if t.hints else "x"
                hy = t.hints[1] if len(t.hints) > 1 else "y"
                x = _fresh(hx, used)
                y = _fresh(hy, used | {x})
                body = open_binder(open_binder(t.subs[1], y), x)
                for v, vty in ((x, ty1.subs[0]), (y, ty1.subs[1])):
                    if v not in free_vars(body):
                        raise LinearityError(
                            path, "letpair", f"unused linear variable {v!r}")
                c1b = dict(c1)
                c1b[x] = ty1.subs[0]
                c1b[y] = ty1.subs[1]
                d2, ty2 = self.synth_lnl_c(body, path + (1,), gamma, c1b,
                                           used | {x, y}, expect)
                self.note(path, "C", ty2)
                return self.deriv("letpair", zs, t, ty2, (d1, d2), form="C"), ty2
            case "lam":
                x, body = self.open1(t.subs[0], t.hints[0] if t.hints else "x",
                                     used)
                if x not in free_vars(body):
                    raise LinearityError(
                        path, "limpl", f"unused linear variable {x!r}")
                d2 = dict(delta)
                d2[x] = t.tyann
                d1, tyb = self.synth_lnl_c(body, path + (0,), gamma, d2,
                                           used | {x},
                                           expect.subs[1] if expect is not None
                                           and expect.kind == "lolli" else None)
                ty = syntax.lolli(t.tyann, tyb)
                self.note(path, "C", ty)
                return self.deriv("limpl", zs, t, ty, (d1,), form="C"), ty
            case "app":
                c0, c1 = split(t.subs[0], t.subs[1])
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used)
                if ty1.kind != "lolli":
                    self.fail(path, "lapp", "application of a non-(-o) term",
                              actual=ty1)
                d2, ty2 = self.synth_lnl_c(t.subs[1], path + (1,), gamma, c1,
                                           used, ty1.subs[0])
                if not self.teq(ty2, ty1.subs[0]):
                    self.fail(path, "lapp", "argument type mismatch",
                              ty1.subs[0], ty2)
                ty = ty1.subs[1]
                self.note(path, "C", ty)
                return self.deriv("lapp", zs, t, ty, (d1, d2), form="C"), ty
            case "ret":
                d1, ty1 = self.synth_lnl_c(
                    t.subs[0], path + (0,), gamma, delta, used,
                    jt(expect.subs[0]) if expect is not None and
                    expect.kind == "tt" else None)
                if ty1.kind != "jt":
                    self.fail(path, "ret", "ret expects a J-typed argument",
                              actual=ty1)
                ty = tt(ty1.subs[0])
                self.note(path, "C", ty)
                return self.deriv("ret", zs, t, ty, (d1,), form="C"), ty
            case "do":
                c0, c1 = split(t.subs[0], t.subs[1])
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used)
                if ty1.kind != "tt":
                    self.fail(path, "do", "do expects a computation",
                              actual=ty1)
                x, body = self.open1(t.subs[1], t.hints[0] if t.hints else "x",
                                     used)
                if x not in free_vars(body):
                    raise LinearityError(
                        path, "do", f"unused linear variable {x!r}")
                c1b = dict(c1)
                c1b[x] = jt(ty1.subs[0])
                d2, ty2 = self.synth_lnl_c(body, path + (1,), gamma, c1b,
                                           used | {x}, expect)
                if ty2.kind != "tt":
                    self.fail(path, "do", "do body must be a computation",
                              actual=ty2)
                self.note(path, "C", ty2)
                return self.deriv("do", zs, t, ty2, (d1, d2), form="C"), ty2
            case "regrade":
                xi = self.grading.norm_mor(t.xi)
                if not self.grading.has_mor(xi):
                    self.fail(path, "regrade", f"no grading morphism {t.xi}")
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma,
                                           delta, used, grty(xi.src))
                if ty1.kind != "grty" or not self.grading.equal_grades(
                        ty1.grade, xi.src):
                    self.fail(path, "regrade",
                              f"grade action <{t.xi}> applies at {xi.src}",
                              grty(xi.src), ty1)
                ty = grty(t.xi.tgt)  # the written target keeps factorizations
                self.note(path, "C", ty)
                return self.deriv("regrade", zs, t, ty, (d1,), form="C"), ty
            case "merge":
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma,
                                           delta, used)
                if ty1.kind == "lunit":
                    ty = grty(self.grading.unit())
                elif ty1.kind == "prod" and ty1.subs[0].kind == "grty" \
                        and ty1.subs[1].kind == "grty":
                    ty = grty(syntax.gtensor(ty1.subs[0].grade,
                                             ty1.subs[1].grade))
                else:
                    self.fail(path, "merge", "merge expects I or a tensor of"
                              " grade types", actual=ty1)
                self.note(path, "C", ty)
                return self.deriv("merge", zs, t, ty, (d1,), form="C"), ty
            case "unmerge":
                if expect is not None and expect.kind == "lunit":
                    d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma,
                                               delta, used,
                                               grty(self.grading.unit()))
                    if ty1.kind != "grty" or not self.grading.equal_grades(
                            ty1.grade, self.grading.unit()):
                        self.fail(path, "unmerge", "unmerge to I expects the"
                                  " unit grade", grty(self.grading.unit()), ty1)
                    ty = syntax.LUNIT
                elif expect is not None and expect.kind == "prod" and \
                        expect.subs[0].kind == "grty" and \
                        expect.subs[1].kind == "grty":
                    m, n = expect.subs[0].grade, expect.subs[1].grade
                    d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma,
                                               delta, used,
                                               grty(syntax.gtensor(m, n)))
                    if ty1.kind != "grty" or not self.grading.equal_grades(
                            ty1.grade, syntax.gtensor(m, n)):
                        self.fail(path, "unmerge", "unmerge target grades do"
                                  " not multiply to the source",
                                  grty(syntax.gtensor(m, n)), ty1)
                    ty = expect
                else:
                    d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma,
                                               delta, used)
                    if ty1.kind != "grty":
                        self.fail(path, "unmerge", "unmerge expects a grade"
                                  " type", actual=ty1)
                    g = ty1.grade
                    if g.kind == "tensor":
                        ty = prod(grty(g.subs[0]), grty(g.subs[1]))
                    elif self.grading.equal_grades(g, self.grading.unit()):
                        ty = syntax.LUNIT
                    else:
                        self.fail(path, "unmerge",
                                  f"cannot infer a factorization of grade {g};"
                                  f" annotate via the expected type")
                self.note(path, "C", ty)
                return self.deriv("unmerge", zs, t, ty, (d1,), form="C"), ty
            case "jterm":
                require_empty_share("J(-)")
                e = expect.subs[0] if expect is not None and \
                    expect.kind == "jt" else None
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used, e)
                ty = jt(ty1)
                self.note(path, "C", ty)
                return self.deriv("jterm", zs, t, ty, (d1,), form="C"), ty
            case "letj":
                c0, c1 = split(t.subs[0], t.subs[1])
                d1, ty1 = self.synth_lnl_c(t.subs[0], path + (0,), gamma, c0,
                                           used)
                if ty1.kind != "jt":
                    self.fail(path, "letj", "let J(a) scrutinee must be"
                              " J-typed", actual=ty1)
                a, body = self.open1(t.subs[1], t.hints[0] if t.hints else "a",
                                     used)
                g2 = dict(gamma)
                g2[a] = ty1.subs[0]
                d2, ty2 = self.synth_lnl_c(body, path + (1,), g2, c1,
                                           used | {a}, expect)
                self.note(path, "C", ty2)
                return self.deriv("letj", zs, t, ty2, (d1, d2), form="C"), ty2
            case "derelict":
                require_empty_share("derelict")
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if ty1.kind != "rt":
                    self.fail(path, "derelict", "derelict expects an R-typed"
                              " term", actual=ty1)
                ty = ty1.subs[0]
                self.note(path, "C", ty)
                return self.deriv("derelict", zs, t, ty, (d1,), form="C"), ty
            case "opapp":
                require_empty_share("op")
                return self.synth_opapp(
                    t, path, gamma, used,
                    lambda s, p, e: self.synth_lnl_c(s, p, gamma, {}, used, e))
        self.fail(path, k, f"term former {k!r} is not a linear-judgement term")

    # .. arrow-calculus commands ..........................................

    def synth_command(self, t: Term, path, gamma, delta, delta_order, used,
                      expect=None):
        zs = (tuple(gamma.items()), tuple(delta_order))
        both = dict(gamma)
        both.update(delta)
        match t.kind:
            case "ret":
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), both, used,
                                       expect)
                self.note(path, "C", ty1)
                return self.deriv("cmd-ret", zs, t, ty1, (d1,), form="C"), ty1
            case "aapp":
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if ty1.kind != "arr":
                    self.fail(path, "cmd-app", "arrow application expects"
                              " u : A ~> B", actual=ty1)
                d2, ty2 = self.synth_a(t.subs[1], path + (1,), both, used,
                                       ty1.subs[0])
                if not self.teq(ty2, ty1.subs[0]):
                    self.fail(path, "cmd-app", "arrow argument type mismatch",
                              ty1.subs[0], ty2)
                ty = ty1.subs[1]
                self.note(path, "C", ty)
                return self.deriv("cmd-app", zs, t, ty, (d1, d2), form="C"), ty
            case "do":
                d1, ty1 = self.synth_command(t.subs[0], path + (0,), gamma,
                                             delta, delta_order, used)
                x, body = self.open1(t.subs[1], t.hints[0] if t.hints else "x",
                                     used)
                dl2 = dict(delta)
                dl2[x] = ty1
                d2, ty2 = self.synth_command(body, path + (1,), gamma, dl2,
                                             delta_order + [(x, ty1)],
                                             used | {x}, expect)
                self.note(path, "C", ty2)
                return self.deriv("cmd-do", zs, t, ty2, (d1, d2), form="C"), ty2
        self.fail(path, t.kind,
                  f"{t.kind!r} is not a command former (commands are"
                  f" ret / u . v / do)")

    # .. three-zone judgements ............................................

    def synth_armm_c(self, t: Term, path, gamma, delta, phi, used,
                     expect=None):
        zs = (tuple(gamma.items()), tuple(delta.items()), tuple(phi.items()))
        gd = dict(gamma)
        gd.update(delta)
        k = t.kind
        match k:
            case "var":
                if t.name not in phi:
                    if t.name in gd:
                        self.fail(path, "cvar", f"variable {t.name!r} lives in"
                                  f" a nonlinear zone; use J(-)/K(-)")
                    self.fail(path, "cvar", f"unbound variable {t.name!r}")
                ty = phi[t.name]
                self.note(path, "C", ty)
                return self.deriv("cvar", zs, t, ty, form="C"), ty
            case "unit":
                ty = syntax.UNIT1
                self.note(path, "C", ty)
                return self.deriv("cunit", zs, t, ty, form="C"), ty
            case "pair":
                e = expect if expect is not None and expect.kind == "prod" \
                    else None
                d1, ty1 = self.synth_armm_c(t.subs[0], path + (0,), gamma,
                                            delta, phi, used,
                                            e.subs[0] if e else None)
                d2, ty2 = self.synth_armm_c(t.subs[1], path + (1,), gamma,
                                            delta, phi, used,
                                            e.subs[1] if e else None)
                ty = prod(ty1, ty2)
                self.note(path, "C", ty)
                return self.deriv("cpair", zs, t, ty, (d1, d2), form="C"), ty
            case "pi1" | "pi2":
                d1, ty1 = self.synth_armm_c(t.subs[0], path + (0,), gamma,
                                            delta, phi, used)
                if ty1.kind != "prod":
                    self.fail(path, k, "projection of a non-product",
                              actual=ty1)
                ty = ty1.subs[0 if k == "pi1" else 1]
                self.note(path, "C", ty)
                return self.deriv("c" + k, zs, t, ty, (d1,), form="C"), ty
            case "jterm":
                e = expect.subs[0] if expect is not None and \
                    expect.kind == "jt" else None
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gd, used, e)
                ty = jt(ty1)
                self.note(path, "C", ty)
                return self.deriv("jterm", zs, t, ty, (d1,), form="C"), ty
            case "kterm":
                e = expect.subs[0] if expect is not None and \
                    expect.kind == "kt" else None
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used, e)
                ty = kt(ty1)
                self.note(path, "C", ty)
                return self.deriv("kterm", zs, t, ty, (d1,), form="C"), ty
            case "letj":
                d1, ty1 = self.synth_armm_c(t.subs[0], path + (0,), gamma,
                                            delta, phi, used)
                if ty1.kind != "jt":
                    self.fail(path, "letj", "let J(a) scrutinee must be"
                              " J-typed", actual=ty1)
                a, body = self.open1(t.subs[1], t.hints[0] if t.hints else "a",
                                     used)
                dl2 = dict(delta)
                dl2[a] = ty1.subs[0]
                d2, ty2 = self.synth_armm_c(body, path + (1,), gamma, dl2,
                                            phi, used | {a}, expect)
                self.note(path, "C", ty2)
                return self.deriv("letj", zs, t, ty2, (d1, d2), form="C"), ty2
            case "letk":
                d1, ty1 = self.synth_armm_c(t.subs[0], path + (0,), gamma,
                                            delta, phi, used)
                if ty1.kind != "kt":
                    self.fail(path, "letk", "let K(a) scrutinee must be"
                              " K-typed", actual=ty1)
                a, body = self.open1(t.subs[1], t.hints[0] if t.hints else "a",
                                     used)
                g2 = dict(gamma)
                g2[a] = ty1.subs[0]
                d2, ty2 = self.synth_armm_c(body, path + (1,), g2, delta,
                                            phi, used | {a}, expect)
                self.note(path, "C", ty2)
                return self.deriv("letk", zs, t, ty2, (d1, d2), form="C"), ty2
            case "ret":
                d1, ty1 = self.synth_armm_c(
                    t.subs[0], path + (0,), gamma, delta, phi, used,
                    jt(expect.subs[0]) if expect is not None and
                    expect.kind == "tt" else None)
                if ty1.kind != "jt":
                    self.fail(path, "ret", "ret expects a J-typed argument",
                              actual=ty1)
                ty = tt(ty1.subs[0])
                self.note(path, "C", ty)
                return self.deriv("ret", zs, t, ty, (d1,), form="C"), ty
            case "do":
                d1, ty1 = self.synth_armm_c(t.subs[0], path + (0,), gamma,
                                            delta, phi, used)
                if ty1.kind != "tt":
                    self.fail(path, "do", "do expects a computation",
                              actual=ty1)
                x, body = self.open1(t.subs[1], t.hints[0] if t.hints else "x",
                                     used)
                d2, ty2 = self.synth_armm_c(body, path + (1,), gamma, delta,
                                            {x: jt(ty1.subs[0])}, used | {x},
                                            expect)
                if ty2.kind != "tt":
                    self.fail(path, "do", "do body must be a computation",
                              actual=ty2)
                self.note(path, "C", ty2)
                return self.deriv("do", zs, t, ty2, (d1, d2), form="C"), ty2
            case "aapp":
                d1, ty1 = self.synth_a(t.subs[0], path + (0,), gamma, used)
                if ty1.kind != "aabs":
                    self.fail(path, "aapp", "arrow application expects"
                              " u : A => X", actual=ty1)
                d2, ty2 = self.synth_a(t.subs[1], path + (1,), gd, used,
                                       ty1.subs[0])
                if not self.teq(ty2, ty1.subs[0]):
                    self.fail(path, "aapp", "argument type mismatch",
                              ty1.subs[0], ty2)
                ty = ty1.subs[1]
                self.note(path, "C", ty)
                return self.deriv("aapp", zs, t, ty, (d1, d2), form="C"), ty
            case "opapp":
                return self.synth_opapp(
                    t, path, gamma, used,
                    lambda s, p, e: self.synth_armm_c(s, p, gamma, delta, phi,
                                                      used, e))
        self.fail(path, k, f"term former {k!r} is not a three-zone term")


# ---------------------------------------------------------------------------
# Public API

def check(j: Judgement, sig: Signature) -> CheckResult:
    """Decide the judgement; on acceptance return a replayable derivation."""
    chk = _Checker(sig, j.calculus)
    try:
        d = chk.check_judgement(j)
    except _Fail as e:
        return CheckResult(False, message=e.message, path=e.path, rule=e.rule,
                           expected=e.expected, actual=e.actual)
    except SignatureError as e:
        return CheckResult(False, message=str(e), path=(), rule="signature")
    return CheckResult(True, derivation=d, annotations=chk.annotations)


def check_graded_arithmetic(derivation: Derivation, sig: Signature) -> bool:
    """Re-verify every grading-morphism edge and tensor in a graded
    derivation against the grading category."""
    grading = sig.grading
    if grading is None:
        return False
    for node in derivation.walk():
        t = node.judgement.term
        if node.rule == "regrade":
            xi = grading.norm_mor(t.xi)
            if not grading.has_mor(xi):
                return False
        if node.rule == "do" and node.judgement.calculus == "gmm":
            m = node.children[0].judgement.ty
            n = node.children[1].judgement.ty
            out = node.judgement.ty
            if m.kind != "tgr" or n.kind != "tgr" or out.kind != "tgr":
                return False
            if not grading.equal_grades(
                    out.grade, syntax.gtensor(m.grade, n.grade)):
                return False
    return True


def replay(derivation: Derivation, sig: Signature) -> bool:
    """Re-check every node's judgement locally; True if all accept."""
    for node in derivation.walk():
        res = check(node.judgement, sig)
        if not res.ok:
            return False
    return True


def serialize_derivation(d: Derivation) -> str:
    """One node per line: index, rule name, judgement, child indices."""
    lines = []
    counter = [0]

    def go(node):
        idx = counter[0]
        counter[0] += 1
        kids = [go(c) for c in node.children]
        lines.append((idx, node.rule, str(node.judgement), kids))
        return idx

    go(d)
    lines.sort(key=lambda e: e[0])
    return "\n".join(
        f"{i}: {rule} | {j} | children={kids}" for i, rule, j, kids in lines)
