"""Finite presentations of the base category, gradings, and effect theories.

A signature bundles: a presented base category (objects, generator
morphisms, relations), optionally a grading (one of the two built-in
numeric gradings, or a finitely presented strict symmetric monoidal
category), and optionally an effect theory (operation symbols with
judgement-shaped signatures plus equational axioms).

Word normalization on presentations is a bounded exhaustive closure: the
normal form of a word is the (length, lexicographic)-least word reachable
by relation rewrites without ever exceeding the configured length cap.
That choice makes normalization provably idempotent: the reachable set
from the normal form is contained in the reachable set of the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax
from .syntax import (Grade, GradeMor, TypeExpr, gnat, gname,
                     parse_context, parse_type, tokenize)


class SignatureError(Exception):
    pass


# ---------------------------------------------------------------------------
# Category presentations

Word = tuple  # tuple[str, ...] of generator names, composition order g;f = "g after f"


@dataclass(frozen=True)
class GenDecl:
    name: str
    src: str
    tgt: str


@dataclass
class CategoryPresentation:
    objects: list[str] = field(default_factory=list)
    generators: dict[str, GenDecl] = field(default_factory=dict)
    relations: list[tuple[Word, Word]] = field(default_factory=list)
    word_cap: int = 16

    def validate(self):
        objs = set(self.objects)
        if len(objs) != len(self.objects):
            raise SignatureError("duplicate object declaration")
        for g in self.generators.values():
            if g.src not in objs or g.tgt not in objs:
                raise SignatureError(
                    f"generator {g.name} : {g.src} -> {g.tgt} uses an undeclared object")
        for lhs, rhs in self.relations:
            if not lhs and not rhs:
                continue
            e1 = self.word_endpoints(lhs) if lhs else None
            e2 = self.word_endpoints(rhs) if rhs else None
            if e1 is not None and e2 is not None and e1 != e2:
                raise SignatureError(
                    f"relation sides {';'.join(lhs)} = {';'.join(rhs)}"
                    f" have different endpoints {e1} vs {e2}")
            for e in (e1, e2):
                # a relation against an identity word forces an endomorphism
                if e is not None and (e1 is None or e2 is None) and e[0] != e[1]:
                    raise SignatureError(
                        f"identity relation on a non-endomorphism word: {e}")

    def word_endpoints(self, word: Word, at: str | None = None):
        """Endpoints (src, tgt) of a composition word g_1;...;g_k (g_k first).

        Empty words are identities; `at` supplies their object.
        """
        if not word:
            if at is None:
                raise SignatureError("identity word needs an object annotation")
            return (at, at)
        src = tgt = None
        for name in reversed(word):
            g = self.generators.get(name)
            if g is None:
                raise SignatureError(f"unknown generator {name!r}")
            if src is None:
                src = g.src
            elif g.src != tgt:
                raise SignatureError(
                    f"word {';'.join(word)} is not composable at {name}"
                    f" (expected source {tgt}, got {g.src})")
            tgt = g.tgt
        return (src, tgt)

    def _rewrite_index(self):
        # relations indexed by the leading generator of each non-empty side
        idx = {}
        for lhs, rhs in self.relations:
            for a, b in ((lhs, rhs), (rhs, lhs)):
                if not a:
                    continue  # insertion of an identity side only grows words
                idx.setdefault(a[0], []).append((a, b))
        self.__dict__["_ridx"] = idx
        return idx

    def _rewrites(self, word: Word, bound: int):
        idx = self.__dict__.get("_ridx") or self._rewrite_index()
        for i, g in enumerate(word):
            for a, b in idx.get(g, ()):
                n = len(a)
                if word[i:i + n] == a and len(word) - n + len(b) <= bound:
                    yield word[:i] + b + word[i + n:]

    def normalize_word(self, word: Word, at: str | None = None) -> Word:
        """Least word (by length then lexicographic order) reachable from
        `word` through relation rewrites.

        Exploration is bounded by max(len(word), longest relation side):
        the bound is monotone along shrinking words, which makes the least
        reachable word a provable fixed point (normalize is idempotent).
        """
        self.word_endpoints(word, at)
        if len(word) > self.word_cap:
            raise SignatureError(
                f"word of length {len(word)} exceeds the cap {self.word_cap}")
        bound = max([len(word)] + [len(s) for rel in self.relations
                                   for s in rel])
        seen = {word}
        frontier = [word]
        while frontier:
            nxt = []
            for w in frontier:
                for w2 in self._rewrites(w, bound):
                    if w2 not in seen:
                        seen.add(w2)
                        nxt.append(w2)
            frontier = nxt
            if len(seen) > 200000:
                raise SignatureError(
                    "relation closure exceeds the exploration budget")
        return min(seen, key=lambda w: (len(w), w))

    def compose_word(self, *words: Word, at: str | None = None) -> Word:
        """Concatenate-and-normalize; raises on non-composable chains."""
        out = ()
        for w in reversed(words):  # apply left-to-right in diagram order
            out = tuple(w) + out
        self.word_endpoints(out, at)
        return self.normalize_word(out, at)


def load_category_lines(lines) -> CategoryPresentation:
    pres = CategoryPresentation()
    for ln in lines:
        pres_line(pres, ln)
    pres.validate()
    return pres


def _parse_word(text: str) -> tuple[Word, str | None]:
    names = [p.strip() for p in text.split(";") if p.strip()]
    if len(names) == 1 and names[0].startswith("id_"):
        return (), names[0][3:]
    return tuple(names), None


def pres_line(pres: CategoryPresentation, ln: str):
    pres.__dict__.pop("_ridx", None)  # the rewrite index is rebuilt lazily
    parts = ln.split()
    if parts[0] == "object":
        pres.objects.append(parts[1])
    elif parts[0] == "gen":
        # gen f : A -> B
        body = ln[len("gen"):].strip()
        name, rest = body.split(":", 1)
        src, tgt = rest.split("->")
        name = name.strip()
        if name in pres.generators:
            raise SignatureError(f"duplicate generator {name!r}")
        pres.generators[name] = GenDecl(name, src.strip(), tgt.strip())
    elif parts[0] == "rel":
        body = ln[len("rel"):].strip()
        lhs, rhs = body.split("=")
        w1, at1 = _parse_word(lhs)
        w2, at2 = _parse_word(rhs)
        pres.relations.append((w1, w2))
        # endpoints validated in validate(); identity-side objects checked here
        for w, at in ((w1, at1), (w2, at2)):
            if not w and at is not None and at not in pres.objects:
                raise SignatureError(f"id_{at}: undeclared object {at!r}")
    else:
        raise SignatureError(f"unrecognized presentation line: {ln!r}")


# ---------------------------------------------------------------------------
# Gradings

class Grading:
    """Interface shared by the built-in numeric gradings and presented ones."""

    name = "abstract"

    def unit(self) -> Grade:
        raise NotImplementedError

    def tensor(self, m: Grade, n: Grade) -> Grade:
        raise NotImplementedError

    def has_object(self, m: Grade) -> bool:
        raise NotImplementedError

    def has_mor(self, xi: GradeMor) -> bool:
        raise NotImplementedError

    def id_mor(self, m: Grade) -> GradeMor:
        return GradeMor(m, m, None if isinstance(self, BuiltinGrading) else ())

    def compose(self, phi: GradeMor, xi: GradeMor) -> GradeMor:
        """phi o xi for xi : m -> n, phi : n -> l."""
        raise NotImplementedError

    def tensor_mor(self, xi: GradeMor, phi: GradeMor) -> GradeMor:
        raise NotImplementedError

    def norm(self, g: Grade) -> Grade:
        """Collapse formal tensors through the grading's tensor."""
        if g.kind == "tensor":
            return self.tensor(self.norm(g.subs[0]), self.norm(g.subs[1]))
        return g

    def norm_mor(self, xi: GradeMor) -> GradeMor:
        return GradeMor(self.norm(xi.src), self.norm(xi.tgt), xi.word)

    def equal_grades(self, m: Grade, n: Grade) -> bool:
        return self.norm(m) == self.norm(n)

    def word_mor(self, word) -> GradeMor:
        raise SignatureError("this grading has no generator words")


class BuiltinGrading(Grading):
    """The thin gradings (N, >=, +, 0) and (N, >=, *, 1).

    Objects are naturals, there is a unique morphism m -> n exactly when
    m >= n, and all structural isomorphisms are identities (the categories
    are strict and thin).
    """

    def __init__(self, flavor: str):
        assert flavor in ("add", "mult")
        self.flavor = flavor
        self.name = f"builtin-{flavor}"

    def unit(self):
        return gnat(0 if self.flavor == "add" else 1)

    def tensor(self, m, n):
        if m.kind != "nat" or n.kind != "nat":
            raise SignatureError("built-in gradings have numeric grades only")
        return gnat(m.nat + n.nat if self.flavor == "add" else m.nat * n.nat)

    def has_object(self, m):
        return self.norm(m).kind == "nat"

    def has_mor(self, xi):
        if xi.word is not None:
            return False
        src, tgt = self.norm(xi.src), self.norm(xi.tgt)
        return src.kind == "nat" and tgt.kind == "nat" and src.nat >= tgt.nat

    def compose(self, phi, xi):
        if self.norm(xi.tgt) != self.norm(phi.src):
            raise SignatureError(f"grade morphisms not composable: {xi} then {phi}")
        # endpoints keep their syntax: a tensor-written grade records the
        # factorization that unmerge reads off the type
        return GradeMor(xi.src, phi.tgt)

    def tensor_mor(self, xi, phi):
        return GradeMor(self.tensor(self.norm(xi.src), self.norm(phi.src)),
                        self.tensor(self.norm(xi.tgt), self.norm(phi.tgt)))


class PresentedGrading(Grading):
    """A finitely presented strict symmetric monoidal grading category."""

    def __init__(self, pres: CategoryPresentation, unit_obj: str,
                 tensor_table: dict, tensor_gens: dict | None = None):
        self.pres = pres
        self.unit_obj = unit_obj
        self.tensor_table = tensor_table  # (a, b) -> c
        self.tensor_gens = tensor_gens or {}  # (gen|'id_obj', gen|'id_obj') -> word
        self.name = "presented"
        self._validate()

    def _validate(self):
        objs = set(self.pres.objects)
        if self.unit_obj not in objs:
            raise SignatureError(f"grading unit {self.unit_obj!r} undeclared")
        for (a, b), c in self.tensor_table.items():
            if {a, b, c} - objs:
                raise SignatureError(f"grading tensor {a} {b} = {c} uses undeclared objects")
        for a in self.pres.objects:
            for b in self.pres.objects:
                if (a, b) not in self.tensor_table:
                    raise SignatureError(f"grading tensor not total: missing {a} (+) {b}")
            if self.tensor_table.get((self.unit_obj, a)) != a or \
                    self.tensor_table.get((a, self.unit_obj)) != a:
                raise SignatureError(f"strict unit law fails at {a}")
        for a in self.pres.objects:
            for b in self.pres.objects:
                for c in self.pres.objects:
                    ab = self.tensor_table[(a, b)]
                    bc = self.tensor_table[(b, c)]
                    if self.tensor_table[(ab, c)] != self.tensor_table[(a, bc)]:
                        raise SignatureError("strict associativity fails on objects")
                if self.tensor_table[(a, b)] != self.tensor_table[(b, a)]:
                    raise SignatureError(
                        "strict symmetry fails on objects; declare a symmetric tensor")

    def unit(self):
        return gname(self.unit_obj)

    def tensor(self, m, n):
        if m.kind != "name" or n.kind != "name":
            raise SignatureError("presented gradings use named grades")
        key = (m.name, n.name)
        if key not in self.tensor_table:
            raise SignatureError(f"grading tensor undefined on {key}")
        return gname(self.tensor_table[key])

    def has_object(self, m):
        m = self.norm(m)
        return m.kind == "name" and m.name in self.pres.objects

    def has_mor(self, xi):
        if xi.word is None:
            return False
        src, tgt = self.norm(xi.src), self.norm(xi.tgt)
        if not xi.word:
            return self.has_object(src) and src == tgt
        s, t = self.pres.word_endpoints(xi.word)
        return gname(s) == src and gname(t) == tgt

    def compose(self, phi, xi):
        if xi.tgt != phi.src:
            raise SignatureError(f"grade morphisms not composable: {xi} then {phi}")
        word = self.pres.compose_word(phi.word, xi.word,
                                      at=xi.src.name if not (phi.word or xi.word) else None)
        return GradeMor(xi.src, phi.tgt, word)

    def tensor_mor(self, xi, phi):
        # tensor on generators must be declared pointwise; desk-scale
        # presentations keep morphism tensors to the identity cases.
        if not xi.word and not phi.word:
            return self.id_mor(self.tensor(xi.src, phi.src))
        raise SignatureError("presented gradings only tensor identity morphisms")

    def word_mor(self, word) -> GradeMor:
        src, tgt = self.pres.word_endpoints(tuple(word))
        return GradeMor(gname(src), gname(tgt), self.pres.normalize_word(tuple(word)))


# ---------------------------------------------------------------------------
# Effect theories


@dataclass(frozen=True)
class OpDecl:
    name: str
    params: tuple[tuple[str, TypeExpr], ...]  # judgement-shaped: named context
    result: TypeExpr


@dataclass
class Axiom:
    name: str
    zones: tuple
    lhs: syntax.Term
    rhs: syntax.Term
    ty: TypeExpr
    form: str = "A"


@dataclass
class EffectTheory:
    calculus: str = "rmm"
    ops: dict[str, OpDecl] = field(default_factory=dict)
    axioms: list[Axiom] = field(default_factory=list)


# ---------------------------------------------------------------------------
# The signature bundle


@dataclass
class Signature:
    category: CategoryPresentation = field(default_factory=CategoryPresentation)
    grading: Grading | None = None
    theory: EffectTheory | None = None

    # -- lookups used by the parser and checker -------------------------

    def has_object(self, name: str) -> bool:
        return name in self.category.objects

    def has_generator(self, name: str) -> bool:
        return name in self.category.generators

    def gen_decl(self, name: str) -> GenDecl:
        g = self.category.generators.get(name)
        if g is None:
            raise SignatureError(f"unknown generator {name!r}")
        return g

    def has_op(self, name: str) -> bool:
        return self.theory is not None and name in self.theory.ops

    def op_decl(self, name: str) -> OpDecl:
        if not self.has_op(name):
            raise SignatureError(f"unknown operation symbol {name!r}")
        return self.theory.ops[name]

    def op_arity(self, name: str) -> int:
        return len(self.op_decl(name).params)


EMPTY_SIGNATURE = Signature()


def builtin_grading(flavor: str) -> BuiltinGrading:
    return BuiltinGrading(flavor)


# ---------------------------------------------------------------------------
# Signature files

def load_signature(path_or_text, validate_axioms: bool = True) -> Signature:
    """Load a signature file (see the file grammar in the README).

    Lines: `calculus <tag>`, `object <name>`, `gen f : A -> B`,
    `rel w = w`, `wordcap <n>`, `grading builtin add|mult`,
    `grading unit <obj>` / `grading tensor a b = c`,
    `op name : (x : T, ...) -> T`, `axiom <t> = <t> in [ctx] : T`.
    """
    text = path_or_text
    if "\n" not in str(path_or_text) and str(path_or_text).endswith(".sig"):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    sig = Signature()
    calculus = "rmm"
    grading_lines = []
    op_lines = []
    axiom_lines = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        head = ln.split()[0]
        if head == "calculus":
            calculus = ln.split()[1]
            if calculus not in syntax.CALCULI:
                raise SignatureError(f"unknown calculus {calculus!r}")
        elif head in ("object", "gen", "rel"):
            pres_line(sig.category, ln)
        elif head == "wordcap":
            sig.category.word_cap = int(ln.split()[1])
        elif head == "grading":
            grading_lines.append(ln)
        elif head == "op":
            op_lines.append(ln)
        elif head == "axiom":
            axiom_lines.append(ln)
        else:
            raise SignatureError(f"unrecognized signature line: {ln!r}")
    sig.category.validate()
    _check_cap_closure(sig.category)
    if grading_lines:
        sig.grading = _load_grading(grading_lines)
    if op_lines or axiom_lines:
        theory = EffectTheory(calculus=calculus)
        sig.theory = theory
        for ln in op_lines:
            decl = _parse_op(ln, sig)
            if decl.name in theory.ops or sig.has_generator(decl.name):
                raise SignatureError(f"duplicate symbol {decl.name!r}")
            theory.ops[decl.name] = decl
        for i, ln in enumerate(axiom_lines):
            theory.axioms.append(_parse_axiom(ln, sig, calculus, i))
        _validate_theory(sig, validate_axioms)
    return sig


def _check_cap_closure(pres: CategoryPresentation):
    """Signature-load error if relation closure needs words beyond the cap."""
    for lhs, rhs in pres.relations:
        if max(len(lhs), len(rhs)) > pres.word_cap:
            raise SignatureError(
                f"relation word longer than the cap {pres.word_cap}")


def _load_grading(lines) -> Grading:
    if any(ln.startswith("grading builtin") for ln in lines):
        if len(lines) != 1:
            raise SignatureError("a built-in grading takes no further grading lines")
        flavor = lines[0].split()[2]
        if flavor not in ("add", "mult"):
            raise SignatureError(f"unknown built-in grading {flavor!r}")
        return BuiltinGrading(flavor)
    pres = CategoryPresentation()
    unit_obj = None
    tensor = {}
    for ln in lines:
        parts = ln.split()
        if parts[1] == "object":
            pres.objects.append(parts[2])
        elif parts[1] == "gen":
            pres_line(pres, ln[len("grading"):].strip())
        elif parts[1] == "rel":
            pres_line(pres, ln[len("grading"):].strip())
        elif parts[1] == "unit":
            unit_obj = parts[2]
        elif parts[1] == "tensor":
            # grading tensor a b = c
            a, b, eq, c = parts[2], parts[3], parts[4], parts[5]
            if eq != "=":
                raise SignatureError(f"bad tensor line: {ln!r}")
            tensor[(a, b)] = c
        else:
            raise SignatureError(f"unrecognized grading line: {ln!r}")
    pres.validate()
    if unit_obj is None:
        raise SignatureError("presented grading needs a unit object")
    return PresentedGrading(pres, unit_obj, tensor)


def _parse_op(ln: str, sig: Signature) -> OpDecl:
    # op name : (x : T, y : U) -> T2    |    op name : () -> T
    body = ln[len("op"):].strip()
    name, rest = body.split(":", 1)
    name = name.strip()
    if "->" not in rest:
        raise SignatureError(f"operation {name!r} needs a result type")
    params_text, result_text = rest.rsplit("->", 1)
    params_text = params_text.strip()
    if not (params_text.startswith("(") and params_text.endswith(")")):
        raise SignatureError(f"operation {name!r}: parameters must be parenthesized")
    inner = params_text[1:-1].strip()
    params = parse_context(inner, sig) if inner else ()
    result = parse_type(result_text.strip(), sig)
    return OpDecl(name, tuple(params), result)


def _parse_axiom(ln: str, sig: Signature, calculus: str, idx: int) -> Axiom:
    # axiom <lhs> = <rhs> in [x : T, ...] : T
    body = ln[len("axiom"):].strip()
    p = syntax._P(tokenize(body), sig=sig, calculus=calculus)
    lhs = p.term()
    p.expect("=")
    rhs = p.term()
    p.expect("in")
    p.expect("[")
    ctx = []
    while p.peek() != "]":
        x = p.next()
        p.expect(":")
        ctx.append((x, p.type_()))
        if p.peek() == ",":
            p.next()
    p.expect("]")
    p.expect(":")
    ty = p.type_()
    if p.peek() is not None:
        p.err("trailing input after axiom")
    for t in (lhs, rhs):
        syntax.check_admissible(t, calculus)
    return Axiom(f"ax{idx + 1}", (tuple(ctx),), lhs, rhs, ty)


def _validate_theory(sig: Signature, validate_axioms: bool):
    from .typecheck import check  # local import: typecheck depends on signatures

    theory = sig.theory
    calculus = theory.calculus
    for decl in theory.ops.values():
        ok_result = decl.result.kind in ("tt", "tgr", "base", "jt", "unit1")
        if not ok_result:
            raise SignatureError(
                f"operation {decl.name}: result must be a computation or base type,"
                f" got {decl.result}")
    if not validate_axioms:
        return
    for ax in theory.axioms:
        for side, t in (("left", ax.lhs), ("right", ax.rhs)):
            j = syntax.Judgement(calculus, ax.form, ax.zones, t, ax.ty)
            res = check(j, sig)
            if not res.ok:
                raise SignatureError(
                    f"axiom {ax.name}: {side} side does not type-check: {res.message}")


# ---------------------------------------------------------------------------
# FinSet-skeleton presentations (used by tests and shipped instances)

def finset_function_name(n: int, m: int, images: tuple[int, ...]) -> str:
    return f"f{n}_{m}_" + "".join(str(i) for i in images)


def all_functions(n: int, m: int):
    """All functions {0..n-1} -> {0..m-1} as image tuples."""
    if n == 0:
        return [()]
    out = [()]
    for _ in range(n):
        out = [t + (i,) for t in out for i in range(m)]
    return out


def finset_skeleton_presentation(max_size: int = 3, word_cap: int = 16
                                 ) -> CategoryPresentation:
    """Small FinSet skeleton: objects 0..max_size, all functions as
    generators, composition table as relations."""
    pres = CategoryPresentation(word_cap=word_cap)
    pres.objects = [str(k) for k in range(max_size + 1)]
    table = {}
    for n in range(max_size + 1):
        for m in range(max_size + 1):
            for images in all_functions(n, m):
                name = finset_function_name(n, m, images)
                pres.generators[name] = GenDecl(name, str(n), str(m))
                table[name] = (n, m, images)
    for g, (n1, m1, im1) in table.items():
        for f, (n0, m0, im0) in table.items():
            if m0 != n1:
                continue
            comp = tuple(im1[i] for i in im0)
            if comp == tuple(range(n0)) and n0 == m1:
                pres.relations.append(((g, f), ()))
            else:
                pres.relations.append(((g, f), (finset_function_name(n0, m1, comp),)))
    # identity generators collapse to identity words
    for n in range(max_size + 1):
        idname = finset_function_name(n, n, tuple(range(n)))
        pres.relations.append(((idname,), ()))
    pres.validate()
    return pres
