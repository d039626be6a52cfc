"""Executable finite denotational backends.

Four backends: the dyadic distribution relative monad on finite carriers,
the exception-monad restriction, the grade-bounded list graded monad, and
the Kleisli-arrow model of the two arrow languages.  Everything is exact:
probabilities are dyadic rationals in canonical form and equality of
values is structural, with no tolerances anywhere.

Semantic equality sweeps every environment over the finite carriers.  For
distribution-typed variables this is a priori an infinite space; the sweep
enumerates the principal lattice of dyadic distributions of denominator
2^k where 2^k bounds the polynomial degree of the two interpretations in
the input weights (every clause is (multi)linear in a fresh weight, so the
degree is bounded by term size).  The order-m principal lattice of a
simplex is unisolvent for polynomials of total degree <= m, which makes
agreement on the lattice agreement everywhere: the verdict is exact, not a
sampling heuristic.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

from . import syntax
from .signatures import Signature, SignatureError
from .syntax import Grade, Judgement, TypeExpr
from .typecheck import Derivation, check


class ModelError(Exception):
    pass


class CarrierTooLarge(ModelError):
    pass


# ---------------------------------------------------------------------------
# exact dyadic arithmetic

@dataclass(frozen=True)
class Dyadic:
    """num / 2^exp in canonical form (num odd or zero; exp 0 when num is 0)."""

    num: int
    exp: int

    def __post_init__(self):
        assert self.exp >= 0
        if self.num == 0:
            assert self.exp == 0
        else:
            assert self.num % 2 == 1 or self.exp == 0

    @staticmethod
    def make(num: int, exp: int) -> "Dyadic":
        if num == 0:
            return Dyadic(0, 0)
        while num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        return Dyadic(num, exp)

    def __add__(self, other):
        e = max(self.exp, other.exp)
        return Dyadic.make(self.num * (1 << (e - self.exp)) +
                           other.num * (1 << (e - other.exp)), e)

    def __sub__(self, other):
        e = max(self.exp, other.exp)
        return Dyadic.make(self.num * (1 << (e - self.exp)) -
                           other.num * (1 << (e - other.exp)), e)

    def __mul__(self, other):
        return Dyadic.make(self.num * other.num, self.exp + other.exp)

    def __lt__(self, other):
        return (self - other).num < 0

    def __le__(self, other):
        return (self - other).num <= 0

    def __str__(self):
        return str(self.num) if self.exp == 0 else f"{self.num}/2^{self.exp}"

    @staticmethod
    def parse(text: str) -> "Dyadic":
        text = text.strip()
        m = re.fullmatch(r"(-?\d+)\s*/\s*2\^(\d+)", text)
        if m:
            return Dyadic.make(int(m.group(1)), int(m.group(2)))
        m = re.fullmatch(r"(-?\d+)\s*/\s*(\d+)", text)
        if m:
            den = int(m.group(2))
            e = den.bit_length() - 1
            if den != 1 << e:
                raise ModelError(f"non-dyadic weight {text!r}")
            return Dyadic.make(int(m.group(1)), e)
        if re.fullmatch(r"-?\d+", text):
            return Dyadic.make(int(text), 0)
        raise ModelError(f"cannot parse dyadic {text!r}")


DY_ZERO = Dyadic(0, 0)
DY_ONE = Dyadic(1, 0)


# ---------------------------------------------------------------------------
# semantic values

@dataclass(frozen=True)
class Value:
    kind: str
    payload: tuple = ()

    def __str__(self):
        return render_value(self)


def VUnit() -> Value:
    return Value("unit")


def VElem(label: str) -> Value:
    return Value("elem", (label,))


def VTuple(a: Value, b: Value) -> Value:
    return Value("tuple", (a, b))


def VDist(entries) -> Value:
    ent = tuple(sorted(((v, p) for v, p in entries if p.num != 0),
                       key=lambda e: value_key(e[0])))
    total = DY_ZERO
    for _, p in ent:
        total = total + p
    if total != DY_ONE:
        raise ModelError(f"distribution weights sum to {total}, not 1")
    return Value("dist", ent)


def VOk(v: Value) -> Value:
    return Value("ok", (v,))


def VErr(tag: str) -> Value:
    return Value("err", (tag,))


def VList(items) -> Value:
    return Value("list", tuple(items))


def VFun(table) -> Value:
    return Value("fun", tuple(sorted(table, key=lambda e: value_key(e[0]))))


def VGrade(g: Grade) -> Value:
    return Value("grade", (str(g),))


def VWrap(v: Value) -> Value:
    return Value("wrap", (v,))


def VJ(v: Value) -> Value:
    return Value("vj", (v,))


def VK(v: Value) -> Value:
    return Value("vk", (v,))


def VT(v: Value) -> Value:
    return Value("vt", (v,))


def value_key(v: Value):
    return (v.kind, tuple(value_key(p) if isinstance(p, Value)
                          else (str(p),) for p in v.payload))


def render_value(v: Value) -> str:
    match v.kind:
        case "unit":
            return "()"
        case "elem":
            return v.payload[0]
        case "tuple":
            return f"({v.payload[0]}, {v.payload[1]})"
        case "dist":
            inner = ", ".join(f"{e}:{p}" for e, p in v.payload)
            return "{" + inner + "}"
        case "ok":
            return f"ok({v.payload[0]})"
        case "err":
            return f"err({v.payload[0]})"
        case "list":
            return "[" + ", ".join(str(x) for x in v.payload) + "]"
        case "fun":
            inner = ", ".join(f"{a} -> {b}" for a, b in v.payload)
            return "{" + inner + "}"
        case "grade":
            return f"#{v.payload[0]}"
        case "wrap":
            return f"R({v.payload[0]})"
        case "vj":
            return f"J({v.payload[0]})"
        case "vk":
            return f"K({v.payload[0]})"
        case "vt":
            return f"T({v.payload[0]})"
    raise AssertionError(v.kind)


def fun_lookup(f: Value, arg: Value) -> Value:
    for a, b in f.payload:
        if a == arg:
            return b
    raise ModelError(f"function table has no entry for {arg}")


# ---------------------------------------------------------------------------
# model bindings

@dataclass
class ModelBinding:
    calculus: str
    backend: tuple
    carriers: dict
    geninterp: dict
    opinterp: dict

    @property
    def backend_name(self):
        return self.backend[0]

    def carrier(self, obj: str):
        if obj not in self.carriers:
            raise ModelError(f"no carrier declared for object {obj!r}")
        return self.carriers[obj]


def load_binding(path_or_text, sig: Signature) -> ModelBinding:
    text = path_or_text
    if "\n" not in str(path_or_text) and str(path_or_text).endswith(".mb"):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    calculus = "rmm"
    backend = None
    carriers, geninterp, opinterp = {}, {}, {}
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        head, _, rest = ln.partition(" ")
        rest = rest.strip()
        if head == "calculus":
            calculus = rest
        elif head == "backend":
            backend = _parse_backend(rest)
        elif head == "carrier":
            name, _, elems = rest.partition("=")
            labels = [e.strip() for e in
                      elems.strip().strip("{}").split(",") if e.strip()]
            carriers[name.strip()] = tuple(labels)
        elif head == "interp":
            name, _, table = rest.partition("=")
            geninterp[name.strip()] = _parse_table(table.strip())
        elif head == "opinterp":
            name, _, val = rest.partition("=")
            opinterp[name.strip()] = _parse_op_value(val.strip())
        else:
            raise ModelError(f"unrecognized binding line: {ln!r}")
    if backend is None:
        raise ModelError("binding file declares no backend")
    binding = ModelBinding(calculus, backend, carriers, geninterp, opinterp)
    validate_binding(binding, sig)
    return binding


def _parse_backend(text: str):
    text = text.strip()
    if text == "distribution":
        return ("distribution",)
    if text == "gradedlist":
        return ("gradedlist",)
    m = re.fullmatch(r"exception\(([^()]*)\)", text)
    if m:
        tags = tuple(t.strip() for t in m.group(1).split(",") if t.strip())
        return ("exception", tags or ("err",))
    m = re.fullmatch(r"kleisli\((.*)\)", text)
    if m:
        return ("kleisli", _parse_backend(m.group(1)))
    raise ModelError(f"unknown backend {text!r}")


def _parse_table(text: str) -> dict:
    text = text.strip().strip("{}")
    table = {}
    for item in re.split(r",(?![^()]*\))", text):
        item = item.strip()
        if not item:
            continue
        lhs, _, rhs = item.partition("->")
        lhs = lhs.strip()
        if lhs.startswith("("):
            key = tuple(p.strip() for p in lhs.strip("()").split(","))
        else:
            key = lhs
        table[key] = rhs.strip()
    return table


def _parse_op_value(text: str):
    text = text.strip()
    if text.startswith("dist{"):
        inner = text[len("dist{"):-1]
        entries = []
        for item in inner.split(","):
            e, _, w = item.partition(":")
            entries.append((VElem(e.strip()), Dyadic.parse(w)))
        return VDist(entries)
    if text.startswith("exc("):
        return VErr(text[4:-1].strip())
    if text.startswith("list["):
        inner = text[len("list["):-1]
        return VList(VElem(e.strip()) for e in inner.split(",") if e.strip())
    if text.startswith("{"):
        return _parse_table(text)
    return VElem(text)


def validate_binding(binding: ModelBinding, sig: Signature):
    """Totality of generator tables plus brute-force respect for the
    presentation's relations."""
    for name, table in binding.geninterp.items():
        decl = sig.gen_decl(name)
        src = binding.carrier(decl.src)
        tgt = binding.carrier(decl.tgt)
        for e in src:
            if e not in table:
                raise ModelError(f"interp {name}: missing entry for {e}")
            if table[e] not in tgt:
                raise ModelError(f"interp {name}: {table[e]} not in carrier"
                                 f" of {decl.tgt}")

    def word_fn(word, at=None):
        # composition of the element tables, identity for the empty word
        def fn(e):
            for g in reversed(word):
                e = binding.geninterp[g][e]
            return e
        return fn

    for lhs, rhs in sig.category.relations:
        if any(g not in binding.geninterp for g in lhs + rhs):
            continue
        try:
            src, _ = sig.category.word_endpoints(lhs or rhs)
        except SignatureError:
            continue
        f1, f2 = word_fn(lhs), word_fn(rhs)
        for e in binding.carrier(src):
            if f1(e) != f2(e):
                raise ModelError(
                    f"generator interpretation violates the relation"
                    f" {';'.join(lhs) or 'id'} = {';'.join(rhs) or 'id'}"
                    f" at {e}")


# ---------------------------------------------------------------------------
# backend monad structure (unit / bind on monadic values)

def monad_unit(backend, v: Value) -> Value:
    match backend[0]:
        case "distribution":
            return VDist(((v, DY_ONE),))
        case "exception":
            return VOk(v)
        case "gradedlist":
            return VList((v,))
    raise ModelError(f"backend {backend[0]} has no first-class unit")


def monad_bind(backend, mv: Value, k) -> Value:
    match backend[0]:
        case "distribution":
            acc: dict = {}
            for a, p in mv.payload:
                for b, q in k(a).payload:
                    acc[b] = acc.get(b, DY_ZERO) + (p * q)
            return VDist(acc.items())
        case "exception":
            if mv.kind == "err":
                return mv
            return k(mv.payload[0])
        case "gradedlist":
            out = []
            for a in mv.payload:
                out.extend(k(a).payload)
            return VList(out)
    raise ModelError(f"backend {backend[0]} has no first-class bind")


# ---------------------------------------------------------------------------
# carriers of types

def carrier_values(ty: TypeExpr, binding: ModelBinding, sig: Signature,
                   grid_exp: int = 1) -> list[Value]:
    """All semantic values of a type, used for environment sweeps and for
    tabulating function values.  Raises for non-enumerable types."""
    backend = binding.backend
    k = ty.kind
    if k == "unit1" or k == "lunit":
        return [VUnit()]
    if k == "base":
        return [VElem(e) for e in binding.carrier(ty.name)]
    if k == "prod":
        return [VTuple(a, b)
                for a in carrier_values(ty.subs[0], binding, sig, grid_exp)
                for b in carrier_values(ty.subs[1], binding, sig, grid_exp)]
    if k == "jt":
        if binding.calculus == "armm":
            return [VJ(v) for v in
                    carrier_values(ty.subs[0], binding, sig, grid_exp)]
        if binding.calculus == "lnl":
            return [VJ(v) for v in
                    carrier_values(ty.subs[0], binding, sig, grid_exp)]
        return carrier_values(ty.subs[0], binding, sig, grid_exp)
    if k == "kt":
        return [VK(v) for v in
                carrier_values(ty.subs[0], binding, sig, grid_exp)]
    if k == "grty":
        g = sig.grading.norm(ty.grade) if sig.grading else ty.grade
        return [VGrade(g)]
    if k == "tt":
        inner = carrier_values(ty.subs[0], binding, sig, grid_exp)
        if binding.calculus == "armm" and backend[0] == "kleisli":
            return [VT(mv) for mv in
                    _monadic_values(backend[1], [v.payload[0] for v in inner]
                                    if inner and inner[0].kind == "vj"
                                    else inner, grid_exp)]
        if binding.calculus == "lnl":
            raise ModelError("bare computation types are not enumerable in"
                             " the linear calculus (bound them by a grade)")
        return _monadic_values(backend, inner, grid_exp)
    if k == "tgr":
        if backend[0] != "gradedlist":
            raise ModelError("graded types need the gradedlist backend")
        m = sig.grading.norm(ty.grade)
        if m.kind != "nat":
            raise ModelError(f"cannot enumerate grade {m}")
        inner = carrier_values(ty.subs[0], binding, sig, grid_exp)
        out = []
        for n in range(m.nat + 1):
            out.extend(VList(c) for c in itertools.product(inner, repeat=n))
        return out
    if k == "fun":
        dom = carrier_values(ty.subs[0], binding, sig, grid_exp)
        cod = carrier_values(ty.subs[1], binding, sig, grid_exp)
        return _tables(dom, cod)
    if k == "arr":
        dom = carrier_values(ty.subs[0], binding, sig, grid_exp)
        cod = carrier_values(ty.subs[1], binding, sig, grid_exp)
        inner = backend[1] if backend[0] == "kleisli" else backend
        return _tables(dom, _monadic_values(inner, cod, grid_exp))
    if k == "aabs":
        dom = carrier_values(ty.subs[0], binding, sig, grid_exp)
        cod = carrier_values(ty.subs[1], binding, sig, grid_exp)
        return _tables(dom, cod)
    if k == "lolli":
        if ty.subs[0].kind == "grty" and ty.subs[1].kind == "tt":
            # the grade-bounded computation space: one token in the domain,
            # lists of length at most the grade in the codomain
            m = sig.grading.norm(ty.subs[0].grade)
            if m.kind != "nat":
                raise ModelError(f"cannot enumerate grade {m}")
            inner = carrier_values(ty.subs[1].subs[0], binding, sig, grid_exp)
            token = VGrade(m)
            out = []
            for n in range(m.nat + 1):
                out.extend(VFun(((token, VList(c)),))
                           for c in itertools.product(inner, repeat=n))
            return out
        dom = carrier_values(ty.subs[0], binding, sig, grid_exp)
        cod = carrier_values(ty.subs[1], binding, sig, grid_exp)
        return _tables(dom, cod)
    if k == "rt":
        return [VWrap(v) for v in
                carrier_values(ty.subs[0], binding, sig, grid_exp)]
    raise ModelError(f"cannot enumerate values of type {ty}")


def _tables(dom, cod):
    if len(cod) ** len(dom) > 200000:
        raise CarrierTooLarge(
            f"{len(cod)}^{len(dom)} function tables exceed the sweep cap")
    out = []
    for images in itertools.product(cod, repeat=len(dom)):
        out.append(VFun(tuple(zip(dom, images))))
    return out


def _monadic_values(backend, inner_values, grid_exp):
    match backend[0]:
        case "exception":
            return ([VOk(v) for v in inner_values] +
                    [VErr(t) for t in backend[1]])
        case "distribution":
            return [VDist(zip(inner_values, w))
                    for w in _simplex_lattice(len(inner_values), grid_exp)]
        case "gradedlist":
            raise ModelError("unbounded list types are not enumerable")
    raise ModelError(f"backend {backend[0]} monadic values not enumerable")


def _simplex_lattice(n, k):
    """All weight vectors (a_i / 2^k) with sum 1: the order-2^k principal
    lattice of the probability simplex on n outcomes."""
    if n == 0:
        return []
    denom = 1 << k
    out = []
    for split in itertools.combinations(range(denom + n - 1), n - 1):
        prev = -1
        parts = []
        for s in split + (denom + n - 1,):
            parts.append(s - prev - 1)
            prev = s
        out.append(tuple(Dyadic.make(a, k) for a in parts))
    return out


# ---------------------------------------------------------------------------
# evaluation (driven by the typing derivation)

def eval_term(j: Judgement, env: dict, binding: ModelBinding,
              sig: Signature) -> Value:
    res = check(j, sig)
    if not res.ok:
        raise ModelError(f"judgement does not check: {res.message}")
    return eval_deriv(res.derivation, dict(env), binding, sig)


def _new_names(parent_names, node: Derivation, child: Derivation):
    out = []
    for zone in child.judgement.zones:
        for x, ty in zone:
            if x not in parent_names:
                out.append((x, ty))
    return out


def _names_of(node: Derivation):
    return {x for zone in node.judgement.zones for x, _ in zone}


def eval_deriv(node: Derivation, env: dict, binding: ModelBinding,
               sig: Signature) -> Value:
    t = node.judgement.term
    rule = node.rule
    backend = binding.backend
    calc = node.judgement.calculus
    my_names = _names_of(node)

    def child_env(i, values):
        new = _new_names(my_names, node, node.children[i])
        if len(new) != len(values):
            raise ModelError(f"binder arity mismatch in rule {rule}")
        e2 = dict(env)
        for (x, _), v in zip(new, values):
            e2[x] = v
        return e2

    def ev(i, env2=None):
        return eval_deriv(node.children[i], env if env2 is None else env2,
                          binding, sig)

    match rule:
        case "var" | "lvar" | "cvar":
            if t.name not in env:
                raise ModelError(f"environment missing {t.name!r}")
            return env[t.name]
        case "unit" | "lunit" | "cunit" | "unit-j":
            return VUnit()
        case "pair" | "tensor" | "cpair":
            return VTuple(ev(0), ev(1))
        case "pi1" | "cpi1":
            return ev(0).payload[0]
        case "pi2" | "cpi2":
            return ev(0).payload[1]
        case "gen":
            arg = ev(0)
            table = binding.geninterp.get(t.name)
            if table is None:
                raise ModelError(f"binding has no interpretation for"
                                 f" generator {t.name}")
            return VElem(table[arg.payload[0]])
        case "op":
            interp = binding.opinterp.get(t.name)
            if interp is None:
                raise ModelError(f"binding has no interpretation for"
                                 f" operation {t.name}")
            if isinstance(interp, Value):
                return interp
            args = tuple(ev(i) for i in range(len(node.children)))
            key = tuple(a.payload[0] for a in args) if len(args) > 1 \
                else args[0].payload[0]
            if key not in interp:
                raise ModelError(f"opinterp {t.name}: no entry for {key}")
            return VElem(interp[key])
        case "ret":
            v = ev(0)
            if calc == "lnl":
                return VList((v.payload[0],))  # v is a J-tagged value
            if calc == "armm":
                inner = backend[1]
                return VT(monad_unit(inner, v.payload[0]))
            if calc == "gmm":
                return monad_unit(backend, v)
            return monad_unit(backend, v)
        case "do":
            mv = ev(0)
            if calc == "lnl":
                out = []
                for a in mv.payload:
                    body = ev(1, child_env(1, [VJ(a)]))
                    out.extend(body.payload)
                return VList(out)
            if calc == "armm":
                inner = backend[1]
                return VT(monad_bind(
                    inner, mv.payload[0],
                    lambda b: ev(1, child_env(1, [VJ(b)])).payload[0]))
            if calc == "gmm":
                out_v = monad_bind(backend, mv,
                                   lambda a: ev(1, child_env(1, [a])))
                _check_list_bound(out_v, node.judgement.ty, sig)
                return out_v
            return monad_bind(backend, mv,
                              lambda a: ev(1, child_env(1, [a])))
        case "regrade":
            v = ev(0)
            if calc == "gmm":
                _check_list_bound(v, node.judgement.ty, sig)
                return v  # bounded-list inclusion: identity on elements
            # linear grade action: retag the token
            ty = node.judgement.ty
            return VGrade(sig.grading.norm(ty.grade))
        case "merge":
            ty = node.judgement.ty
            return VGrade(sig.grading.norm(ty.grade))
        case "unmerge":
            ty = node.judgement.ty
            if ty.kind == "lunit":
                return VUnit()
            return VTuple(VGrade(sig.grading.norm(ty.subs[0].grade)),
                          VGrade(sig.grading.norm(ty.subs[1].grade)))
        case "lam" | "limpl":
            ann = t.tyann
            table = []
            for v in carrier_values(ann, binding, sig):
                table.append((v, ev(0, child_env(0, [v]))))
            return VFun(table)
        case "lamarrow":
            ann = t.tyann
            if calc == "arrow":
                table = []
                for v in carrier_values(ann, binding, sig):
                    cmd = ev(0, child_env(0, [v]))
                    # the body command has Delta = [x]; its table is keyed
                    # by the single binder value
                    table.append((v, fun_lookup(cmd, VTuple(v, VUnit()))))
                return VFun(table)
            table = []
            for v in carrier_values(ann, binding, sig):
                table.append((v, ev(0, child_env(0, [v]))))
            return VFun(table)
        case "app" | "lapp":
            f = ev(0)
            a = ev(1)
            out = fun_lookup(f, a)
            if calc == "armm":
                return out.payload[0]  # A => J(B) application lands in B
            return out
        case "aapp":
            f = ev(0)
            both = dict(env)
            a = eval_deriv(node.children[1], both, binding, sig)
            return fun_lookup(f, a)
        case "rterm":
            return VWrap(ev(0))
        case "derelict":
            return ev(0).payload[0]
        case "jterm":
            return VJ(ev(0))
        case "kterm":
            return VK(ev(0))
        case "letj" | "letk":
            v = ev(0)
            return ev(1, child_env(1, [v.payload[0]]))
        case "letunit":
            ev(0)
            return ev(1)
        case "letpair":
            v = ev(0)
            return ev(1, child_env(1, [v.payload[0], v.payload[1]]))
        case "cmd-ret" | "cmd-app" | "cmd-do":
            return eval_command(node, env, binding, sig)
    raise ModelError(f"no evaluation clause for rule {rule!r}")


def _check_list_bound(v: Value, ty: TypeExpr, sig: Signature):
    if v.kind == "list" and ty.kind == "tgr":
        m = sig.grading.norm(ty.grade)
        if m.kind == "nat" and len(v.payload) > m.nat:
            raise ModelError(
                f"graded-list invariant broken: length {len(v.payload)}"
                f" exceeds grade {m.nat}")


def _delta_tuples(delta, binding, sig):
    spaces = [carrier_values(ty, binding, sig) for _, ty in delta]
    return list(itertools.product(*spaces))


def _tuple_value(vs):
    out = VUnit()
    for v in reversed(vs):
        out = VTuple(v, out)
    return out


def eval_command(node: Derivation, env: dict, binding: ModelBinding,
                 sig: Signature) -> Value:
    """Arrow-calculus command: a table from Delta-environments to values of
    the inner monad (the Kleisli-arrow reading of commands)."""
    if binding.backend[0] != "kleisli":
        raise ModelError("commands need a kleisli(...) backend")
    inner = binding.backend[1]
    delta = node.judgement.zones[1]
    my_names = _names_of(node)

    def entry(dvals):
        e2 = dict(env)
        for (x, _), v in zip(delta, dvals):
            e2[x] = v
        if node.rule == "cmd-ret":
            v = eval_deriv(node.children[0], e2, binding, sig)
            return monad_unit(inner, v)
        if node.rule == "cmd-app":
            f = eval_deriv(node.children[0], env, binding, sig)
            a = eval_deriv(node.children[1], e2, binding, sig)
            return fun_lookup(f, a)
        if node.rule == "cmd-do":
            left = eval_command(node.children[0], env, binding, sig)
            lval = fun_lookup(left, _tuple_value(dvals))
            new = _new_names(my_names, node, node.children[1])
            xname = new[0][0]

            def k(b):
                e3 = dict(e2)
                e3[xname] = b
                sub = eval_command(node.children[1], e3, binding, sig)
                sub_delta = node.children[1].judgement.zones[1]
                key = _tuple_value([e3[x] for x, _ in sub_delta])
                return fun_lookup(sub, key)

            return monad_bind(inner, lval, k)
        raise ModelError(f"not a command rule: {node.rule}")

    table = []
    for dvals in _delta_tuples(delta, binding, sig):
        table.append((_tuple_value(dvals), entry(dvals)))
    return VFun(table)


def eval_arrow_command(j: Judgement, env: dict, binding: ModelBinding,
                       sig: Signature) -> Value:
    """Public entry point for command judgements: returns the Kleisli-arrow
    table keyed by Delta-environment tuples."""
    if not (j.calculus == "arrow" and j.form == "C"):
        raise ModelError("not an arrow-calculus command judgement")
    return eval_term(j, env, binding, sig)


# ---------------------------------------------------------------------------
# semantic equality

def env_space(j: Judgement, binding: ModelBinding, sig: Signature,
              grid_exp: int, cap: int = 10 ** 6):
    names, spaces = [], []
    for zone in j.zones:
        for x, ty in zone:
            names.append(x)
            vals = carrier_values(ty, binding, sig, grid_exp)
            spaces.append(vals)
    total = 1
    for s in spaces:
        total *= max(1, len(s))
        if total > cap:
            raise CarrierTooLarge(
                f"environment count exceeds the sweep cap {cap}")
    for combo in itertools.product(*spaces):
        yield dict(zip(names, combo))


def _grid_exp_for(j1: Judgement, j2: Judgement) -> int:
    degree = syntax.term_size(j1.term) + syntax.term_size(j2.term)
    return max(1, math.ceil(math.log2(degree + 1)))


def semantic_eq(j1: Judgement, j2: Judgement, binding: ModelBinding,
                sig: Signature, cap: int = 10 ** 6):
    """Exact validity check: evaluate both sides under every environment.

    Returns (True, None) or (False, witness_env) with the first differing
    environment in the fixed enumeration order.
    """
    if (j1.zones, j1.ty, j1.form) != (j2.zones, j2.ty, j2.form):
        raise ModelError("semantic equality needs a shared judgement shape")
    grid = _grid_exp_for(j1, j2)
    r1 = check(j1, sig)
    r2 = check(j2, sig)
    if not (r1.ok and r2.ok):
        raise ModelError("semantic equality on ill-typed judgements")
    for env in env_space(j1, binding, sig, grid, cap):
        v1 = eval_deriv(r1.derivation, dict(env), binding, sig)
        v2 = eval_deriv(r2.derivation, dict(env), binding, sig)
        if v1 != v2:
            witness = {k: str(v) for k, v in env.items()}
            return False, witness
    return True, None
