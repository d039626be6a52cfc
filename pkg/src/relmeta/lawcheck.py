"""Brute-force verification of the categorical law sets on finite data.

Everything here is tables: a finite category is explicit hom-sets with a
composition table, a relative monad is an object map plus unit and
extension tables, and each law checker sweeps every instantiation of its
equations, reporting the first counterexample as a replayable witness.

Monoidal structure on explicit categories may be *partial* (tensors whose
result leaves the declared object set are simply absent); law instances
that would need an undefined tensor are counted and reported as skips,
never silently dropped.  Structural isomorphisms are strict: the shipped
finite-set skeleton uses lexicographic pairing, under which the
associators and unitors really are identities (the symmetry is not, and is
carried as an explicit table).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .signatures import all_functions


class LawError(Exception):
    pass


MAX_OBJECTS = 4
MAX_MORPHISMS = 64


# ---------------------------------------------------------------------------
# reports

@dataclass
class LawLine:
    law: str
    status: str  # PASS | FAIL | SKIP-note
    witness: tuple | None = None
    skipped: int = 0

    def render(self):
        s = f"LAW {self.law} {self.status}"
        if self.witness is not None:
            s += f" [witness: {self.witness}]"
        if self.skipped:
            s += f" [skipped {self.skipped} out-of-fragment instances]"
        return s


@dataclass
class LawReport:
    name: str
    lines: list[LawLine] = field(default_factory=list)

    @property
    def ok(self):
        return all(l.status == "PASS" for l in self.lines)

    def add(self, law, witness=None, skipped=0):
        self.lines.append(LawLine(law, "FAIL" if witness is not None
                                  else "PASS", witness, skipped))

    def render(self):
        body = "\n".join(l.render() for l in self.lines)
        passed = sum(1 for l in self.lines if l.status == "PASS")
        return (f"{body}\nSUMMARY {self.name}: {passed}/{len(self.lines)}"
                f" laws pass")


# ---------------------------------------------------------------------------
# finite categories

@dataclass
class FinCategory:
    objects: tuple
    homs: dict            # (a, b) -> tuple of morphism names
    comp: dict            # (g, f) -> h   (g after f)
    ids: dict             # a -> morphism name
    dom: dict
    cod: dict
    unit: str | None = None
    obj_tensor: dict = field(default_factory=dict)   # (a, b) -> c, partial
    mor_tensor: dict = field(default_factory=dict)   # (f, g) -> h, partial
    sigma: dict = field(default_factory=dict)        # (a, b) -> morphism

    def hom(self, a, b):
        return self.homs.get((a, b), ())

    def morphisms(self):
        for ms in self.homs.values():
            yield from ms

    def compose(self, g, f):
        if self.cod[f] != self.dom[g]:
            raise LawError(f"not composable: {g} after {f}")
        return self.comp[(g, f)]

    def tensor_obj(self, a, b):
        return self.obj_tensor.get((a, b))

    def tensor_mor(self, f, g):
        return self.mor_tensor.get((f, g))

    def validate(self):
        if len(self.objects) > MAX_OBJECTS:
            raise LawError(f"instance exceeds the {MAX_OBJECTS}-object cap")
        nmor = sum(len(m) for m in self.homs.values())
        if nmor > MAX_MORPHISMS:
            raise LawError(f"instance exceeds the {MAX_MORPHISMS}-morphism cap")
        for a in self.objects:
            i = self.ids[a]
            assert self.dom[i] == a and self.cod[i] == a
        for (a, b), ms in self.homs.items():
            for f in ms:
                assert self.dom[f] == a and self.cod[f] == b
                assert self.compose(self.ids[b], f) == f
                assert self.compose(f, self.ids[a]) == f
        for a, b in itertools.product(self.objects, repeat=2):
            for f in self.hom(a, b):
                for c in self.objects:
                    for g in self.hom(b, c):
                        h = self.compose(g, f)
                        assert self.dom[h] == a and self.cod[h] == c
                        for d in self.objects:
                            for k in self.hom(c, d):
                                assert self.compose(k, h) == \
                                    self.compose(self.compose(k, g), f)
        if self.unit is not None:
            self._validate_monoidal()

    def _validate_monoidal(self):
        u = self.unit
        for a in self.objects:
            if self.tensor_obj(u, a) not in (None, a) or \
                    self.tensor_obj(a, u) not in (None, a):
                raise LawError("unit tensors must be strict identities")
        # functoriality of the tensor where defined
        for (f, g), h in self.mor_tensor.items():
            a1, b1 = self.dom[f], self.cod[f]
            a2, b2 = self.dom[g], self.cod[g]
            if self.tensor_obj(a1, a2) != self.dom[h] or \
                    self.tensor_obj(b1, b2) != self.cod[h]:
                raise LawError(f"tensor endpoints wrong for {f} (x) {g}")
        for (f, g), h in self.mor_tensor.items():
            for (f2, g2), h2 in self.mor_tensor.items():
                if self.cod[f2] != self.dom[f] or self.cod[g2] != self.dom[g]:
                    continue
                lhs = self.mor_tensor.get((self.compose(f, f2),
                                           self.compose(g, g2)))
                if lhs is not None and lhs != self.compose(h, h2):
                    raise LawError("tensor is not functorial")
        for (a, b), s in self.sigma.items():
            ba = self.tensor_obj(b, a)
            if self.dom[s] != self.tensor_obj(a, b) or self.cod[s] != ba:
                raise LawError(f"symmetry endpoints wrong at ({a},{b})")
            s2 = self.sigma.get((b, a))
            if s2 is not None and \
                    self.compose(s2, s) != self.ids[self.tensor_obj(a, b)]:
                raise LawError(f"symmetry is not involutive at ({a},{b})")


@dataclass
class FinFunctor:
    source: FinCategory | None
    target: FinCategory
    omap: dict
    mmap: dict
    kappa: dict = field(default_factory=dict)  # (a,b) -> морфизм, partial
    iota: str | None = None

    def validate(self):
        if self.source is None:
            return
        for a in self.source.objects:
            assert self.omap[a] in self.target.objects
            assert self.mmap[self.source.ids[a]] == \
                self.target.ids[self.omap[a]]
        for f in self.source.morphisms():
            for g in self.source.morphisms():
                if self.source.dom[f] != self.source.cod[g]:
                    continue
                assert self.mmap[self.source.compose(f, g)] == \
                    self.target.compose(self.mmap[f], self.mmap[g])


def identity_functor(c: FinCategory) -> FinFunctor:
    kappa = {}
    for (a, b), t in c.obj_tensor.items():
        kappa[(a, b)] = c.ids[t]
    return FinFunctor(c, c, {a: a for a in c.objects},
                      {m: m for m in c.morphisms()},
                      kappa=kappa, iota=c.ids[c.unit] if c.unit else None)


# ---------------------------------------------------------------------------
# the FinSet skeleton with lexicographic tensor

def _fname(n, m, images):
    return f"f{n}_{m}_" + ("".join(str(i) for i in images) or "e")


def finset_category(max_size: int = 3) -> FinCategory:
    objects = tuple(str(k) for k in range(max_size + 1))
    homs, comp, ids, dom, cod = {}, {}, {}, {}, {}
    tabs = {}
    for n in range(max_size + 1):
        for m in range(max_size + 1):
            ms = []
            for images in all_functions(n, m):
                name = _fname(n, m, images)
                ms.append(name)
                tabs[name] = (n, m, images)
                dom[name], cod[name] = str(n), str(m)
            homs[(str(n), str(m))] = tuple(ms)
        ids[str(n)] = _fname(n, n, tuple(range(n)))
    for g, (n1, m1, im1) in tabs.items():
        for f, (n0, m0, im0) in tabs.items():
            if m0 != n1:
                continue
            comp[(g, f)] = _fname(n0, m1, tuple(im1[i] for i in im0))
    obj_tensor, mor_tensor, sigma = {}, {}, {}
    for a in range(max_size + 1):
        for b in range(max_size + 1):
            if a * b <= max_size or a == 0 or b == 0:
                obj_tensor[(str(a), str(b))] = str(a * b)
    for f, (n0, m0, im0) in tabs.items():
        for g, (n1, m1, im1) in tabs.items():
            if (str(n0), str(n1)) in obj_tensor and \
                    (str(m0), str(m1)) in obj_tensor:
                images = tuple(im0[i // n1] * m1 + im1[i % n1]
                               for i in range(n0 * n1))
                mor_tensor[(f, g)] = _fname(n0 * n1, m0 * m1, images)
    for a in range(max_size + 1):
        for b in range(max_size + 1):
            if (str(a), str(b)) in obj_tensor:
                images = tuple((i % b) * a + (i // b) for i in range(a * b))
                sigma[(str(a), str(b))] = _fname(a * b, b * a, images)
    cat = FinCategory(objects, homs, comp, ids, dom, cod, unit="1",
                      obj_tensor=obj_tensor, mor_tensor=mor_tensor,
                      sigma=sigma)
    return cat


def finset_table(name):
    n, m, rest = name[1:].split("_", 2)
    images = () if rest == "e" else tuple(int(c) for c in rest)
    return int(n), int(m), images


def finset_mor(n, m, images):
    return _fname(n, m, tuple(images))


# ---------------------------------------------------------------------------
# relative monad data

@dataclass
class FinRelMonadData:
    name: str
    C: FinCategory
    aobjs: tuple                       # source objects
    jmap: dict                         # a -> C-object
    tmap: dict                         # a -> C-object
    eta: dict                          # a -> morphism
    ext_plain: dict | None = None      # (A, B, f) -> g
    ext_strong: dict | None = None     # (Gamma, A, B, f) -> g
    ext_j: dict | None = None          # (GammaA, A, B, f) -> g, GammaA in aobjs
    ext_w: dict | None = None          # (M-obj, A, B, f) -> g
    ext_bi: dict | None = None         # (Gamma, Delta, A, B, f) -> g
    jfun: FinFunctor | None = None     # J with kappa/iota (strong monoidal)
    wfun: FinFunctor | None = None     # W for the W-strong tables

    def copy(self):
        import copy
        return copy.deepcopy(self)


# -- constructions -----------------------------------------------------------

def restrict_monad(name, C: FinCategory, tmap_full: dict, eta_full: dict,
                   ext_full, aobjs, jmap) -> FinRelMonadData:
    """Restriction of (partial) ordinary monad tables along J (an object
    inclusion): the unit at A is the unit at JA and extension is unchanged.
    """
    tmap = {a: tmap_full[jmap[a]] for a in aobjs}
    eta = {a: eta_full[jmap[a]] for a in aobjs}
    ext_plain = {}
    for a in aobjs:
        for b in aobjs:
            for f in C.hom(jmap[a], tmap[b]):
                ext_plain[(a, b, f)] = ext_full(jmap[a], jmap[b], f)
    return FinRelMonadData(name, C, tuple(aobjs), dict(jmap), tmap, eta,
                           ext_plain=ext_plain)


def exception_monad_tables(C: FinCategory, max_source: int):
    """The exception monad X |-> X + 1 on the finite-set skeleton, tabulated
    on sources of size <= max_source (so T stays inside the category)."""
    tmap, eta = {}, {}
    for n in range(max_source + 1):
        tmap[str(n)] = str(n + 1)
        eta[str(n)] = finset_mor(n, n + 1, range(n))

    def ext(x_obj, y_obj, f):
        # f : X -> TY; f* : TX -> TY propagates the error point
        n, m, images = finset_table(f)
        return finset_mor(n + 1, m, tuple(images) + (m - 1,))

    return tmap, eta, ext


def exception_restriction_instance(a_max: int = 2, c_max: int = 3
                                   ) -> FinRelMonadData:
    """Ex-restriction ground truth: the exception monad on sets of size <=
    c_max restricted along the inclusion of sizes <= a_max."""
    C = finset_category(c_max)
    tmap_full, eta_full, ext_full = exception_monad_tables(C, a_max)
    aobjs = tuple(str(k) for k in range(a_max + 1))
    jmap = {a: a for a in aobjs}
    d = restrict_monad("exception-restriction", C, tmap_full, eta_full,
                       ext_full, aobjs, jmap)
    _add_exception_strength(d)
    return d


def _add_exception_strength(d: FinRelMonadData):
    """Canonical strength of a finite-set relative monad:
    f+(g, u) = (f(g, -))*(u), here with explicit error propagation."""
    C = d.C
    d.ext_strong = {}
    for gamma in C.objects:
        gn = int(gamma)
        for a in d.aobjs:
            for b in d.aobjs:
                ja, tb = d.jmap[a], d.tmap[b]
                gja = C.tensor_obj(gamma, ja)
                gta = C.tensor_obj(gamma, d.tmap[a])
                if gja is None or gta is None:
                    continue
                an, tbn = int(ja), int(tb)
                tan = int(d.tmap[a])
                for f in C.hom(gja, tb):
                    _, _, ftab = finset_table(f)
                    images = []
                    for i in range(gn * tan):
                        g, u = divmod(i, tan)
                        if u == tan - 1:  # the error point of TA
                            images.append(tbn - 1)
                        else:
                            images.append(ftab[g * an + u])
                    d.ext_strong[(gamma, a, b, f)] = finset_mor(
                        gn * tan, tbn, images)
    # the J-indexed fragment and J's monoidal witnesses
    d.ext_j = {(g, a, b, f): v for (g, a, b, f), v in d.ext_strong.items()
               if g in d.aobjs}
    kappa = {}
    for a in d.aobjs:
        for b in d.aobjs:
            t = C.tensor_obj(a, b)
            if t is not None and t in d.aobjs:
                kappa[(a, b)] = C.ids[t]
    d.jfun = FinFunctor(None, C, dict(d.jmap), {}, kappa=kappa,
                        iota=C.ids["1"])


def identity_monad_instance(c_max: int = 2) -> FinRelMonadData:
    """T = J = id on the finite-set skeleton: the trivial relative monad."""
    C = finset_category(c_max)
    aobjs = C.objects
    d = FinRelMonadData(
        "identity", C, aobjs, {a: a for a in aobjs}, {a: a for a in aobjs},
        {a: C.ids[a] for a in aobjs},
        ext_plain={(a, b, f): f for a in aobjs for b in aobjs
                   for f in C.hom(a, b)})
    d.ext_strong = {}
    for gamma in C.objects:
        for a in aobjs:
            for b in aobjs:
                gja = C.tensor_obj(gamma, a)
                if gja is None:
                    continue
                for f in C.hom(gja, b):
                    d.ext_strong[(gamma, a, b, f)] = f
    d.ext_j = {k: v for k, v in d.ext_strong.items() if k[0] in aobjs}
    d.jfun = identity_functor(C)
    return d


# ---------------------------------------------------------------------------
# law checkers

def check_rel_monad_laws(d: FinRelMonadData) -> LawReport:
    """(eta)* = id, f* o eta = f, g* o f* = (g* o f)* over all tables."""
    rep = LawReport(f"{d.name}/relmonad")
    C = d.C
    if d.ext_plain is None:
        raise LawError("plain extension tables absent")
    w = None
    for a in d.aobjs:
        got = d.ext_plain.get((a, a, d.eta[a]))
        if got != C.ids[d.tmap[a]]:
            w = ("eta-ext", a, d.eta[a], got)
            break
    rep.add("unit-extension", w)
    w = None
    for a in d.aobjs:
        for b in d.aobjs:
            for f in C.hom(d.jmap[a], d.tmap[b]):
                if C.compose(d.ext_plain[(a, b, f)], d.eta[a]) != f:
                    w = ("ext-unit", a, b, f)
                    break
    rep.add("extension-unit", w)
    w = None
    for a in d.aobjs:
        for b in d.aobjs:
            for c in d.aobjs:
                for f in C.hom(d.jmap[a], d.tmap[b]):
                    for g in C.hom(d.jmap[b], d.tmap[c]):
                        lhs = C.compose(d.ext_plain[(b, c, g)],
                                        d.ext_plain[(a, b, f)])
                        rhs = d.ext_plain[
                            (a, c, C.compose(d.ext_plain[(b, c, g)], f))]
                        if lhs != rhs:
                            w = ("ext-comp", a, b, c, f, g)
                            break
    rep.add("extension-composition", w)
    return rep


def check_monad_morphism(gamma: dict, d1: FinRelMonadData,
                         d2: FinRelMonadData) -> LawReport:
    """gamma_A : T1 A -> T2 A a morphism of relative monads."""
    rep = LawReport("monad-morphism")
    C = d1.C
    w = None
    for a in d1.aobjs:
        if C.compose(gamma[a], d1.eta[a]) != d2.eta[a]:
            w = ("unit", a)
            break
    rep.add("morphism-unit", w)
    w = None
    for a in d1.aobjs:
        for b in d1.aobjs:
            for f in C.hom(d1.jmap[a], d1.tmap[b]):
                lhs = C.compose(gamma[b], d1.ext_plain[(a, b, f)])
                rhs = C.compose(d2.ext_plain[(a, b, C.compose(gamma[b], f))],
                                gamma[a])
                if lhs != rhs:
                    w = ("extension", a, b, f)
                    break
    rep.add("morphism-extension", w)
    return rep


def _tensor_id_mor(C, obj, f):
    return C.tensor_mor(C.ids[obj], f)


def _tensor_mor_id(C, f, obj):
    return C.tensor_mor(f, C.ids[obj])


def check_strong_laws(d: FinRelMonadData, table: str = "ext_strong",
                      indices=None, wfun: FinFunctor | None = None
                      ) -> LawReport:
    """The three strong-extension equations plus naturality in the context.

    table/indices select the table family: the full strong tables (indices
    = all C-objects), the J-indexed fragment, or W-indexed tables with the
    strong monoidal witnesses of W.
    """
    C = d.C
    ext = getattr(d, table)
    if ext is None:
        raise LawError(f"{table} tables absent")
    if indices is None:
        indices = C.objects
    w_omap = (wfun.omap if wfun else None)

    def wobj(g):
        return w_omap[g] if w_omap else g

    rep = LawReport(f"{d.name}/{table}")
    skipped = 0
    w = None
    # unit law at the monoidal unit
    for a in d.aobjs:
        unit_idx = None
        for g in indices:
            if wobj(g) == C.unit:
                unit_idx = g
                break
        if unit_idx is None:
            skipped += 1
            continue
        got = ext.get((unit_idx, a, a, d.eta[a]))
        if got != C.ids[d.tmap[a]]:
            w = ("strong-unit", a, got)
            break
    rep.add("strong-unit", w, skipped)
    skipped = 0
    w = None
    for gamma in indices:
        for a in d.aobjs:
            for b in d.aobjs:
                gj = C.tensor_obj(wobj(gamma), d.jmap[a])
                if gj is None or C.tensor_obj(wobj(gamma), d.tmap[a]) is None:
                    skipped += 1
                    continue
                ge = _tensor_id_mor(C, wobj(gamma), d.eta[a])
                for f in C.hom(gj, d.tmap[b]):
                    if (gamma, a, b, f) not in ext:
                        skipped += 1
                        continue
                    if C.compose(ext[(gamma, a, b, f)], ge) != f:
                        w = ("strong-ext-unit", gamma, a, b, f)
                        break
    rep.add("strong-extension-unit", w, skipped)
    skipped = 0
    w = None
    for gamma in indices:
        for delta in indices:
            dg = C.tensor_obj(wobj(delta), wobj(gamma))
            if dg is None:
                skipped += 1
                continue
            # locate the composite index: for W-tables the index space is
            # W's source, so the tensor must exist there too
            comp_idx = None
            if w_omap:
                for m in indices:
                    if wobj(m) == dg:
                        comp_idx = m
                        break
            else:
                comp_idx = dg
            if comp_idx is None:
                skipped += 1
                continue
            for a in d.aobjs:
                for b in d.aobjs:
                    for c in d.aobjs:
                        gja = C.tensor_obj(wobj(gamma), d.jmap[a])
                        gta = C.tensor_obj(wobj(gamma), d.tmap[a])
                        if gja is None or gta is None or \
                                C.tensor_obj(dg, d.jmap[a]) is None or \
                                C.tensor_obj(dg, d.tmap[a]) is None or \
                                C.tensor_obj(wobj(delta), d.jmap[b]) is None:
                            skipped += 1
                            continue
                        for f in C.hom(gja, d.tmap[b]):
                            if (gamma, a, b, f) not in ext:
                                skipped += 1
                                continue
                            fstar = ext[(gamma, a, b, f)]
                            for g in C.hom(
                                    C.tensor_obj(wobj(delta), d.jmap[b]),
                                    d.tmap[c]):
                                if (delta, b, c, g) not in ext:
                                    skipped += 1
                                    continue
                                mid_t = _tensor_id_mor(C, wobj(delta), fstar)
                                mid_j = _tensor_id_mor(C, wobj(delta), f)
                                gstar = ext[(delta, b, c, g)]
                                if mid_t is None or mid_j is None:
                                    skipped += 1
                                    continue
                                inner = C.compose(gstar, mid_j)
                                if (comp_idx, a, c, inner) not in ext:
                                    skipped += 1
                                    continue
                                lhs = C.compose(gstar, mid_t)
                                rhs = ext[(comp_idx, a, c, inner)]
                                if lhs != rhs:
                                    w = ("strong-assoc", gamma, delta, a, b,
                                         c, f, g)
                                    break
    rep.add("strong-associativity", w, skipped)
    # naturality in the context index
    skipped = 0
    w = None
    if w_omap and wfun.source is not None:
        nat_mors = [(wfun.source.dom[m], wfun.source.cod[m], wfun.mmap[m])
                    for m in wfun.source.morphisms()]
    elif w_omap:
        nat_mors = []
    else:
        nat_mors = [(C.dom[m], C.cod[m], m) for m in C.morphisms()]
    for (gp, gamma, h) in nat_mors:
        if gp not in indices or gamma not in indices:
            continue
        for a in d.aobjs:
            for b in d.aobjs:
                if C.tensor_obj(wobj(gamma), d.jmap[a]) is None or \
                        C.tensor_obj(wobj(gp), d.jmap[a]) is None or \
                        C.tensor_obj(wobj(gp), d.tmap[a]) is None or \
                        C.tensor_obj(wobj(gamma), d.tmap[a]) is None:
                    skipped += 1
                    continue
                hj = _tensor_mor_id(C, h, d.jmap[a])
                ht = _tensor_mor_id(C, h, d.tmap[a])
                if hj is None or ht is None:
                    skipped += 1
                    continue
                for f in C.hom(C.tensor_obj(wobj(gamma), d.jmap[a]),
                               d.tmap[b]):
                    if (gamma, a, b, f) not in ext or \
                            (gp, a, b, C.compose(f, hj)) not in ext:
                        skipped += 1
                        continue
                    lhs = ext[(gp, a, b, C.compose(f, hj))]
                    rhs = C.compose(ext[(gamma, a, b, f)], ht)
                    if lhs != rhs:
                        w = ("strong-naturality", gp, gamma, h, a, b, f)
                        break
    rep.add("strong-naturality", w, skipped)
    return rep


def check_w_strong_laws(d: FinRelMonadData, wfun: FinFunctor) -> LawReport:
    indices = tuple(wfun.source.objects) if wfun.source is not None \
        else tuple(wfun.omap)
    return check_strong_laws(d, table="ext_w", indices=indices, wfun=wfun)


def check_j_strong_laws(d: FinRelMonadData) -> LawReport:
    return check_strong_laws(d, table="ext_j", indices=d.aobjs)


# -- strength maps and the conversion formulas -------------------------------

def _kappa_inv(C: FinCategory, kappa_mor):
    """Invert an iso by table search."""
    a, b = C.dom[kappa_mor], C.cod[kappa_mor]
    for m in C.hom(b, a):
        if C.compose(m, kappa_mor) == C.ids[a] and \
                C.compose(kappa_mor, m) == C.ids[b]:
            return m
    raise LawError(f"{kappa_mor} is not invertible")


def strength_from_extension(d: FinRelMonadData):
    """theta_{A,B} = (eta_{AxB} o kappa_{A,B})* with the J-indexed tables.

    Returns (theta tables, skipped index pairs)."""
    if d.ext_j is None or d.jfun is None:
        raise LawError("J-indexed tables or J witnesses absent")
    C = d.C
    theta, skipped = {}, []
    for a in d.aobjs:
        for b in d.aobjs:
            kap = d.jfun.kappa.get((a, b))
            ab = C.tensor_obj(a, b)
            if kap is None or ab not in d.aobjs:
                skipped.append((a, b))
                continue
            f = C.compose(d.eta[ab], kap)
            if (a, b, ab, f) not in d.ext_j:
                skipped.append((a, b))  # the T-side tensor left the fragment
                continue
            theta[(a, b)] = d.ext_j[(a, b, ab, f)]
    return theta, skipped


def extension_from_strength(theta: dict, d: FinRelMonadData):
    """f+ = (f o kappa^-1)* o theta_{A,B}: rebuild the J-indexed tables from
    strength maps and the plain extension."""
    if d.ext_plain is None or d.jfun is None:
        raise LawError("plain tables or J witnesses absent")
    C = d.C
    ext_j, skipped = {}, []
    for a in d.aobjs:
        for b in d.aobjs:
            kap = d.jfun.kappa.get((a, b))
            ab = C.tensor_obj(a, b)
            if kap is None or ab not in d.aobjs or (a, b) not in theta:
                skipped.append((a, b))
                continue
            kinv = _kappa_inv(C, kap)
            for c in d.aobjs:
                for f in C.hom(C.tensor_obj(d.jmap[a], d.jmap[b]),
                               d.tmap[c]):
                    plain = d.ext_plain[(ab, c, C.compose(f, kinv))]
                    ext_j[(a, b, c, f)] = C.compose(plain, theta[(a, b)])
    return ext_j, skipped


def check_strength_map_laws(theta: dict, d: FinRelMonadData) -> LawReport:
    """The four strength-map diagrams plus naturality in both indices."""
    C = d.C
    rep = LawReport(f"{d.name}/strength-maps")
    if d.jfun is None:
        raise LawError("J witnesses absent")
    iota = d.jfun.iota
    skipped = 0
    w = None
    # unit-side diagram: T(lambda) o theta_{I,B} o (iota (x) TB) = lambda
    for b in d.aobjs:
        unit_a = None
        for a in d.aobjs:
            if d.jmap[a] == C.unit:
                unit_a = a
        if unit_a is None or (unit_a, b) not in theta:
            skipped += 1
            continue
        lhs = C.compose(theta[(unit_a, b)],
                        _tensor_mor_id(C, iota, d.tmap[b]))
        if lhs != C.ids[d.tmap[b]]:  # strict unitors
            w = ("theta-unitor", b, lhs)
            break
    rep.add("strength-unitor", w, skipped)
    skipped = 0
    w = None
    # eta compatibility: theta o (JA (x) eta_B) = eta_{AxB} o kappa
    for a in d.aobjs:
        for b in d.aobjs:
            if (a, b) not in theta:
                skipped += 1
                continue
            kap = d.jfun.kappa[(a, b)]
            ab = C.tensor_obj(a, b)
            lhs = C.compose(theta[(a, b)],
                            _tensor_id_mor(C, d.jmap[a], d.eta[b]))
            rhs = C.compose(d.eta[ab], kap)
            if lhs != rhs:
                w = ("theta-eta", a, b)
                break
    rep.add("strength-eta", w, skipped)
    skipped = 0
    w = None
    # associativity pentagon (strict associators)
    for a in d.aobjs:
        for b in d.aobjs:
            for c in d.aobjs:
                ab = C.tensor_obj(a, b)
                bc = C.tensor_obj(b, c)
                if ab not in d.aobjs or bc not in d.aobjs or \
                        (ab, c) not in theta or (a, bc) not in theta or \
                        (b, c) not in theta or \
                        C.tensor_obj(d.jmap[a], d.jmap[b]) is None:
                    skipped += 1
                    continue
                kap_ab = d.jfun.kappa[(a, b)]
                lhs = C.compose(theta[(ab, c)],
                                _tensor_mor_id(C, kap_ab, d.tmap[c]))
                rhs = C.compose(theta[(a, bc)],
                                _tensor_id_mor(C, d.jmap[a], theta[(b, c)]))
                if lhs != rhs:
                    w = ("theta-assoc", a, b, c)
                    break
    rep.add("strength-associativity", w, skipped)
    skipped = 0
    w = None
    # extension compatibility
    for a in d.aobjs:
        for b in d.aobjs:
            for c in d.aobjs:
                if (a, b) not in theta or (a, c) not in theta:
                    skipped += 1
                    continue
                ab = C.tensor_obj(a, b)
                kinv = _kappa_inv(C, d.jfun.kappa[(a, b)])
                for f in C.hom(d.jmap[b], d.tmap[c]):
                    fstar = d.ext_plain[(b, c, f)]
                    lhs = C.compose(theta[(a, c)],
                                    _tensor_id_mor(C, d.jmap[a], fstar))
                    inner = C.compose(
                        theta[(a, c)],
                        C.compose(_tensor_id_mor(C, d.jmap[a], f), kinv))
                    acobj = C.tensor_obj(a, c)
                    rhs = C.compose(d.ext_plain[(ab, acobj, inner)],
                                    theta[(a, b)])
                    if lhs != rhs:
                        w = ("theta-ext", a, b, c, f)
                        break
    rep.add("strength-extension", w, skipped)
    return rep


# -- bistrong ----------------------------------------------------------------
#
# With the lexicographic tensor on the finite-set skeleton, all the
# reassociations in the two-sided laws are identity permutations, so the
# checks compose only the genuinely non-trivial block permutations.

def _perm_mor(size, perm):
    return finset_mor(size, size, perm)


def _swap_blocks(g_n, x_n, d_n):
    """Gamma x (X x Delta) -> Gamma x (Delta x X) as a function table on the
    lex encodings (this is Gamma (x) sigma_{X,Delta})."""
    out = []
    for i in range(g_n * x_n * d_n):
        g_i, xd = divmod(i, x_n * d_n)
        x_i, d_i = divmod(xd, d_n)
        out.append(g_i * (d_n * x_n) + d_i * x_n + x_i)
    return out


def bistrong_from_strong(d: FinRelMonadData) -> dict:
    """Induce (Gamma, Delta)-indexed tables from the strong ones through the
    symmetry: shuffle Delta past the monadic slot, extend at context
    Gamma (x) Delta, and shuffle back."""
    C = d.C
    out = {}
    for gamma in C.objects:
        for delta in C.objects:
            gd = C.tensor_obj(gamma, delta)
            if gd is None:
                continue
            g_n, d_n = int(gamma), int(delta)
            for a in d.aobjs:
                for b in d.aobjs:
                    a_n, t_n = int(d.jmap[a]), int(d.tmap[a])
                    src_j = g_n * a_n * d_n
                    src_t = g_n * t_n * d_n
                    if str(src_j) not in C.objects or \
                            str(src_t) not in C.objects:
                        continue
                    # p : Gamma x (Delta x JA) -> Gamma x (JA x Delta)
                    p = _swap_blocks(g_n, d_n, a_n)
                    # q : Gamma x (TA x Delta) -> Gamma x (Delta x TA)
                    q = _swap_blocks(g_n, t_n, d_n)
                    for f in C.hom(str(src_j), d.tmap[b]):
                        fp = C.compose(f, _perm_mor(src_j, p))
                        fstar = d.ext_strong[(gd, a, b, fp)]
                        out[(gamma, delta, a, b, f)] = C.compose(
                            fstar, _perm_mor(src_t, q))
    return out


def check_bistrong_laws(d: FinRelMonadData) -> LawReport:
    """The two-sided extension laws and, when the symmetry is present, the
    symmetric-bistrength condition."""
    C = d.C
    ext = d.ext_bi
    if ext is None:
        raise LawError("bistrong tables absent")
    rep = LawReport(f"{d.name}/bistrong")
    w = None
    skipped = 0
    for a in d.aobjs:
        got = ext.get((C.unit, C.unit, a, a, d.eta[a]))
        if got is None:
            skipped += 1
        elif got != C.ids[d.tmap[a]]:
            w = ("bi-unit", a, got)
            break
    rep.add("bistrong-unit", w, skipped)
    w = None
    for (gamma, delta, a, b, f), fstar in ext.items():
        mid = C.tensor_mor(d.eta[a], C.ids[delta])
        ge = None if mid is None else _tensor_id_mor(C, gamma, mid)
        if ge is None:
            continue
        if C.compose(fstar, ge) != f:
            w = ("bi-ext-unit", gamma, delta, a, b, f)
            break
    rep.add("bistrong-extension-unit", w)
    w = None
    skipped = 0
    for (g1, d1, a, b, f), fstar in ext.items():
        for (g2, d2, b2, c, g), gstar in ext.items():
            if b2 != b:
                continue
            og = C.tensor_obj(g2, g1)
            od = C.tensor_obj(d1, d2)
            if og is None or od is None:
                skipped += 1
                continue
            m1 = C.tensor_mor(fstar, C.ids[d2])
            m2 = None if m1 is None else _tensor_id_mor(C, g2, m1)
            m1j = C.tensor_mor(f, C.ids[d2])
            m2j = None if m1j is None else _tensor_id_mor(C, g2, m1j)
            if m2 is None or m2j is None:
                skipped += 1
                continue
            inner = C.compose(gstar, m2j)
            key = (og, od, a, c, inner)
            if key not in ext:
                skipped += 1
                continue
            lhs = C.compose(gstar, m2)
            if lhs != ext[key]:
                w = ("bi-assoc", g1, d1, g2, d2, a, b, c, f, g)
                break
        if w:
            break
    rep.add("bistrong-associativity", w, skipped)
    w = None
    skipped = 0
    if C.sigma:
        for (gd, gp, a, b, f), fstar in list(ext.items()):
            # the symmetric condition relates the extension at index
            # (Gamma x Delta, Gamma') to the one at (Gamma, Delta x Gamma')
            for gamma in C.objects:
                for delta in C.objects:
                    if C.tensor_obj(gamma, delta) != gd:
                        continue
                    dgp = C.tensor_obj(delta, gp)
                    if dgp is None:
                        skipped += 1
                        continue
                    g_n, d_n, gp_n = int(gamma), int(delta), int(gp)
                    a_n, t_n = int(d.jmap[a]), int(d.tmap[a])
                    n_j = g_n * a_n * d_n * gp_n
                    n_t = g_n * t_n * d_n * gp_n
                    if str(n_j) not in C.objects or str(n_t) not in C.objects:
                        skipped += 1
                        continue
                    # sigma~ : Gamma x (X x (Delta x Gamma')) ->
                    #          (Gamma x Delta) x (X x Gamma')
                    def sig(x_n, total):
                        out = [0] * total
                        for i in range(total):
                            g_i, rest = divmod(i, x_n * d_n * gp_n)
                            x_i, rest2 = divmod(rest, d_n * gp_n)
                            d_i, p_i = divmod(rest2, gp_n)
                            out[i] = ((g_i * d_n + d_i) * x_n + x_i) * gp_n \
                                + p_i
                        return out
                    sj = _perm_mor(n_j, sig(a_n, n_j))
                    st = _perm_mor(n_t, sig(t_n, n_t))
                    key = (gamma, dgp, a, b, C.compose(f, sj))
                    if key not in ext:
                        skipped += 1
                        continue
                    lhs = C.compose(fstar, st)
                    if lhs != ext[key]:
                        w = ("bi-symmetric", gamma, delta, gp, a, b, f)
                        break
    rep.add("bistrong-symmetric", w, skipped)
    return rep


# ---------------------------------------------------------------------------
# mutation sweeps

def mutations_of(d: FinRelMonadData, tables=("eta", "ext_plain",
                                             "ext_strong")):
    """Yield (description, mutated copy): every single table cell replaced
    by each minimally different legal value (the next morphism in its
    hom-set)."""
    C = d.C
    for tname in tables:
        table = getattr(d, tname)
        if table is None:
            continue
        for key, mor in table.items():
            homset = C.hom(C.dom[mor], C.cod[mor])
            if len(homset) < 2:
                continue
            alt = homset[(homset.index(mor) + 1) % len(homset)]
            mut = d.copy()
            getattr(mut, tname)[key] = alt
            if tname == "ext_strong" and mut.ext_j is not None \
                    and key in mut.ext_j:
                mut.ext_j[key] = alt
            yield (f"{tname}[{key}] := {alt}", mut)


def replay_witness(d: FinRelMonadData, report: LawReport) -> bool:
    """A failing report's witness must reproduce: re-running the checker on
    the same data yields the same failing law."""
    checks = {
        "relmonad": check_rel_monad_laws,
        "ext_strong": lambda dd: check_strong_laws(dd),
    }
    for line in report.lines:
        if line.status == "FAIL":
            law_kind = report.name.rsplit("/", 1)[-1]
            fn = checks.get(law_kind, check_rel_monad_laws)
            rerun = fn(d)
            return any(l.status == "FAIL" and l.witness == line.witness
                       for l in rerun.lines)
    return False


# ---------------------------------------------------------------------------
# graded monads over a finite grading fragment
#
# The graded checks live over implicit finite sets (declared carriers with
# computed function spaces) rather than an explicit FinCategory: the
# quantification domains are astronomically larger than the 64-morphism cap
# allows, so the heavy sweeps are vectorized (values are integer-coded and
# the extension operator becomes table gathers).

import numpy as _np


@dataclass
class GradedMonadData:
    """The bounded-list graded monad on declared carriers, with mutable unit
    and regrade tables and a cell-override map for the extension operator.
    """

    name: str
    flavor: str                      # "mult" | "add"
    grades: tuple                    # the finite fragment, ascending
    carriers: dict                   # name -> tuple of element labels
    eta: dict = field(default_factory=dict)      # (X, elem) -> list value
    tx: dict = field(default_factory=dict)       # (m, n, X, val) -> val
    ext_overrides: dict = field(default_factory=dict)
    _vals: dict = field(default_factory=dict)

    def __post_init__(self):
        cap = max(self.grades)
        for X, elems in self.carriers.items():
            for m in range(cap + 1):
                self._vals.setdefault((m, X), self._lists(elems, m))
            for e in elems:
                self.eta.setdefault((X, e), (e,))
            for m in self.grades:
                for n in self.grades:
                    if m >= n:
                        for v in self._vals[(n, X)]:
                            self.tx.setdefault((m, n, X, v), v)

    @staticmethod
    def _lists(elems, m):
        out = []
        for k in range(m + 1):
            out.extend(itertools.product(elems, repeat=k))
        return out

    def copy(self):
        import copy
        return copy.deepcopy(self)

    def tensor(self, m, n):
        return m * n if self.flavor == "mult" else m + n

    @property
    def unit_grade(self):
        return 1 if self.flavor == "mult" else 0

    def tvals(self, m, X):
        return self._vals[(m, X)]

    def ext_value(self, G, m, n, X, Y, f: dict, cell):
        """f : G x X -> T_n Y as a dict; one output cell of f*_{m,n}."""
        key = (G, m, n, X, Y, tuple(sorted(f.items())))
        if (key, cell) in self.ext_overrides:
            return self.ext_overrides[(key, cell)]
        g, xs = cell
        out = []
        for x in xs:
            out.extend(f[(g, x)])
        return tuple(out)

    def ext(self, G, m, n, X, Y, f: dict) -> dict:
        out = {}
        for g in self.carriers[G]:
            for xs in self.tvals(m, X):
                out[(g, xs)] = self.ext_value(G, m, n, X, Y, f, (g, xs))
        return out


def bounded_list_instance(carriers=None, grades=(1, 2, 3),
                          flavor="mult") -> GradedMonadData:
    if carriers is None:
        carriers = {"U": ("u",), "B": ("b0", "b1")}
    return GradedMonadData("bounded-list", flavor, tuple(sorted(grades)),
                           dict(carriers))


class _GradedCodec:
    """Integer coding of one combo's value spaces plus the vectorized
    extension operator."""

    def __init__(self, gd: GradedMonadData, X, cap):
        self.gd = gd
        self.X = X
        self.vals = gd.tvals(cap, X)
        self.code = {v: i for i, v in enumerate(self.vals)}
        n = len(self.vals)
        self.cat = _np.full((n, n), -1, dtype=_np.int32)
        for i, a in enumerate(self.vals):
            for j, b in enumerate(self.vals):
                c = a + b
                if c in self.code:
                    self.cat[i, j] = self.code[c]
        self.empty = self.code[()]


def _all_maps_array(dom_size, n_codes):
    """All functions dom -> codes as an int array (N, dom_size)."""
    total = n_codes ** dom_size
    if total > 600000:
        raise LawError(f"graded sweep too large: {n_codes}^{dom_size}")
    ar = _np.arange(total, dtype=_np.int64)
    cols = []
    for i in range(dom_size):
        cols.append((ar // (n_codes ** (dom_size - 1 - i))) % n_codes)
    return _np.stack(cols, axis=1).astype(_np.int32)


class _ExtVec:
    """Vectorized f*_{m,n} for every row of fmat at once, with extension
    overrides applied by matching rows against the override's table."""

    def __init__(self, gd, G, m, n, X, Y, fmat, dom_index, codec_y,
                 _level_vals=None):
        # fmat: (Nf, |G x X|) codes of T_n Y values (in codec_y space)
        self.cells = []
        gelems = gd.carriers[G]
        xvals = gd.tvals(m, X)
        Nf = fmat.shape[0]
        out = _np.empty((Nf, len(gelems) * len(xvals)), dtype=_np.int32)
        ci = 0
        self.cell_index = {}
        for g in gelems:
            for xs in xvals:
                acc = _np.full(Nf, codec_y.empty, dtype=_np.int32)
                for x in xs:
                    acc = codec_y.cat[acc, fmat[:, dom_index[(g, x)]]]
                out[:, ci] = acc
                self.cell_index[(g, xs)] = ci
                self.cells.append((g, xs))
                ci += 1
        if gd.ext_overrides:
            fdomkeys = sorted(dom_index, key=lambda k: dom_index[k])
            cols = [dom_index[k] for k in fdomkeys]
            for (key, cell), val in gd.ext_overrides.items():
                kG, km, kn, kX, kY, kf = key
                if (kG, km, kn, kX, kY) != (G, m, n, X, Y):
                    continue
                ftab = dict(kf)
                try:
                    coded = _np.array([codec_y.code[ftab[k]]
                                       for k in fdomkeys], dtype=_np.int32)
                except KeyError:
                    continue
                if cell not in self.cell_index or val not in codec_y.code:
                    continue
                rows = _np.nonzero((fmat[:, cols] == coded).all(axis=1))[0]
                out[rows, self.cell_index[cell]] = codec_y.code[val]
        self.mat = out

    def col(self, cell):
        return self.mat[:, self.cell_index[cell]]


def _fmat_for(gd, G, X, n, codec_y):
    """All maps G x X -> T_n Y coded in codec_y's space, plus the domain
    index and the level-n value list (for override decoding)."""
    gelems = gd.carriers[G]
    xelems = gd.carriers[X]
    dom = [(g, x) for g in gelems for x in xelems]
    dom_index = {k: i for i, k in enumerate(dom)}
    level_vals = gd.tvals(n, codec_y.X)
    level_codes = _np.array([codec_y.code[v] for v in level_vals],
                            dtype=_np.int32)
    raw = _all_maps_array(len(dom), len(level_vals))
    return level_codes[raw], dom_index, level_vals


def check_graded_laws(gd: GradedMonadData, stop_early: bool = False
                      ) -> LawReport:
    """The graded-monad laws over the declared fragment: unit laws,
    associativity, regrade functoriality and compatibility, and naturality
    in the context; out-of-fragment tensors are reported as skips.

    stop_early returns after the first failing law (used by the mutation
    sweeps, where any failure suffices)."""
    rep = LawReport(f"{gd.name}/graded")

    def halted():
        return stop_early and not rep.ok
    grades = gd.grades
    cap = max(grades)
    e = gd.unit_grade
    names = sorted(gd.carriers)
    codecs = {X: _GradedCodec(gd, X, cap) for X in names}

    # regrade functoriality
    w = None
    for m in grades:
        for X in names:
            for v in gd.tvals(m, X):
                if gd.tx[(m, m, X, v)] != v:
                    w = ("tx-id", m, X, v)
                    break
    rep.add("graded-functor-identity", w)
    if halted():
        return rep
    w = None
    for m in grades:
        for n in grades:
            for l in grades:
                if not (m >= n >= l):
                    continue
                for X in names:
                    for v in gd.tvals(l, X):
                        if gd.tx[(m, l, X, v)] != \
                                gd.tx[(m, n, X, gd.tx[(n, l, X, v)])]:
                            w = ("tx-comp", m, n, l, X, v)
                            break
    rep.add("graded-functor-composition", w)
    if halted():
        return rep
    # regrades are natural transformations: they commute with the lifted
    # action of every carrier map
    w = None
    for m in grades:
        for n in grades:
            if not (m >= n):
                continue
            for X in names:
                for Y in names:
                    for h in itertools.product(gd.carriers[Y],
                                               repeat=len(gd.carriers[X])):
                        htab = dict(zip(gd.carriers[X], h))
                        for v in gd.tvals(n, X):
                            hv = tuple(htab[x] for x in v)
                            lhs = gd.tx[(m, n, Y, hv)]
                            rhs = tuple(htab[x] for x in gd.tx[(m, n, X, v)])
                            if lhs != rhs:
                                w = ("tx-naturality", m, n, X, Y, htab, v)
                                break
    rep.add("graded-regrade-naturality", w)
    if halted():
        return rep

    # right unit: (eta o pi)*_{m,e} agrees with the projection
    w = None
    skipped = 0
    for G in names:
        for m in grades:
            if gd.tensor(m, e) not in grades:
                skipped += 1
                continue
            for A in names:
                f = {(g, a): gd.eta[(A, a)]
                     for g in gd.carriers[G] for a in gd.carriers[A]}
                for g in gd.carriers[G]:
                    for xs in gd.tvals(m, A):
                        got = gd.ext_value(G, m, e, A, A, f, (g, xs))
                        if got != gd.tx[(gd.tensor(m, e), m, A, xs)] if \
                                gd.tensor(m, e) != m else got != xs:
                            w = ("unit-right", G, m, A, g, xs, got)
                            break
    rep.add("graded-unit-right", w, skipped)
    if halted():
        return rep

    # left unit: f*_{e,m} o (G x eta) = f, for every f
    w = None
    skipped = 0
    for G in names:
        for m in grades:
            if gd.tensor(e, m) not in grades:
                skipped += 1
                continue
            for A in names:
                for B in names:
                    cy = codecs[B]
                    fmat, dom_index, lv = _fmat_for(gd, G, A, m, cy)
                    extv = _ExtVec(gd, G, e, m, A, B, fmat, dom_index, cy, lv)
                    for g in gd.carriers[G]:
                        for a in gd.carriers[A]:
                            lhs = extv.col((g, gd.eta[(A, a)]))
                            rhs = fmat[:, dom_index[(g, a)]]
                            if not _np.array_equal(lhs, rhs):
                                fi = int(_np.nonzero(lhs != rhs)[0][0])
                                w = ("unit-left", G, m, A, B, g, a,
                                     f"f#{fi}")
                                break
    rep.add("graded-unit-left", w, skipped)
    if halted():
        return rep

    # associativity
    w = None
    skipped = 0
    for l in grades:
        for m in grades:
            for n in grades:
                lm = gd.tensor(l, m)
                mn = gd.tensor(m, n)
                lmn = gd.tensor(lm, n)
                if lm not in grades or mn not in grades or lmn not in grades:
                    skipped += 1
                    continue
                for G in names:
                    for A in names:
                        for B in names:
                            for Cc in names:
                                ww = _graded_assoc_combo(
                                    gd, codecs, G, A, B, Cc, l, m, n)
                                if ww is not None:
                                    w = ww
                                    break
    rep.add("graded-associativity", w, skipped)
    if halted():
        return rep

    # naturality in the context
    w = None
    for G2 in names:
        for G in names:
            maps = list(itertools.product(gd.carriers[G],
                                          repeat=len(gd.carriers[G2])))
            for m in grades:
                for n in grades:
                    if gd.tensor(m, n) not in grades:
                        continue
                    for A in names:
                        for B in names:
                            cy = codecs[B]
                            fmat, dom_index, lv = _fmat_for(gd, G, A, n, cy)
                            extv = _ExtVec(gd, G, m, n, A, B, fmat,
                                           dom_index, cy, lv)
                            for u in maps:
                                utab = dict(zip(gd.carriers[G2], u))
                                # f o (u x A) columns, then its extension
                                dom2 = {(g2, a): dom_index[(utab[g2], a)]
                                        for g2 in gd.carriers[G2]
                                        for a in gd.carriers[A]}
                                dom2_index = {k: i for i, k in
                                              enumerate(sorted(dom2))}
                                f2 = fmat[:, [dom2[k] for k in sorted(dom2)]]
                                extv2 = _ExtVec(gd, G2, m, n, A, B, f2,
                                                dom2_index, cy, lv)
                                for g2 in gd.carriers[G2]:
                                    for xs in gd.tvals(m, A):
                                        lhs = extv2.col((g2, xs))
                                        rhs = extv.col((utab[g2], xs))
                                        if not _np.array_equal(lhs, rhs):
                                            fi = int(_np.nonzero(
                                                lhs != rhs)[0][0])
                                            w = ("naturality", G2, G, u, m,
                                                 n, A, B, g2, xs, f"f#{fi}")
                                            break
    rep.add("graded-context-naturality", w)
    if halted():
        return rep

    # compatibility of regrades with the extension (both indices)
    w = None
    skipped = 0
    for m in grades:
        for n in grades:
            for n2 in grades:
                if not (n >= n2) or gd.tensor(m, n) not in grades or \
                        gd.tensor(m, n2) not in grades:
                    skipped += 1
                    continue
                for G in names:
                    for A in names:
                        for B in names:
                            ww = _graded_regrade_combo(gd, codecs, G, A, B,
                                                       m, n, n2)
                            if ww is not None:
                                w = ww
                                break
    rep.add("graded-regrade-compatibility", w, skipped)
    if halted():
        return rep
    return rep


def _graded_assoc_combo(gd, codecs, G, A, B, Cc, l, m, n):
    lm, mn = gd.tensor(l, m), gd.tensor(m, n)
    cb, cc = codecs[B], codecs[Cc]
    fmat, fdom, flv = _fmat_for(gd, G, A, m, cb)
    gmat, gdom, glv = _fmat_for(gd, G, B, n, cc)
    Nf, Ng = fmat.shape[0], gmat.shape[0]
    extF = _ExtVec(gd, G, l, m, A, B, fmat, fdom, cb, flv)
    extG1 = _ExtVec(gd, G, lm, n, B, Cc, gmat, gdom, cc, glv)
    extG2 = _ExtVec(gd, G, m, n, B, Cc, gmat, gdom, cc, glv)
    bvals = gd.tvals(max(gd.grades), B)
    loop_f = Nf <= Ng
    outer = range(Nf) if loop_f else range(Ng)
    for oi in outer:
        if loop_f:
            frow = fmat[oi]
            extF_row = extF.mat[oi]
            # h = g*_{m,n} o (pi, f) for all g: columns over g-axis
            hcols = {}
            for (g, a), col in fdom.items():
                hcols[(g, a)] = extG2.mat[:, extG2.cell_index[
                    (g, cb.vals[frow[col]])]]
            hdom_index = {k: i for i, k in enumerate(sorted(hcols))}
            hmat = _np.stack([hcols[k] for k in sorted(hcols)], axis=1)
            extH = _ExtVec(gd, G, l, mn, A, Cc, hmat, hdom_index, cc,
                           gd.tvals(mn, Cc))
            for g in gd.carriers[G]:
                for xs in gd.tvals(l, A):
                    fstar_v = cb.vals[extF_row[extF.cell_index[(g, xs)]]]
                    lhs = extG1.mat[:, extG1.cell_index[(g, fstar_v)]]
                    rhs = extH.col((g, xs))
                    if not _np.array_equal(lhs, rhs):
                        gi = int(_np.nonzero(lhs != rhs)[0][0])
                        return ("assoc", G, A, B, Cc, l, m, n,
                                f"f#{oi}", f"g#{gi}", g, xs)
        else:
            extG1_row = extG1.mat[oi]
            extG2_row = extG2.mat[oi]

            def row_lut(row, ext_cells, g, level):
                lut = _np.full(len(cb.vals), -1, dtype=_np.int32)
                for v in gd.tvals(level, B):
                    lut[cb.code[v]] = row[ext_cells.cell_index[(g, v)]]
                return lut

            hcols = {}
            for (g, a), col in fdom.items():
                hcols[(g, a)] = row_lut(extG2_row, extG2, g, m)[fmat[:, col]]
            hdom_index = {k: i for i, k in enumerate(sorted(hcols))}
            hmat = _np.stack([hcols[k] for k in sorted(hcols)], axis=1)
            extH = _ExtVec(gd, G, l, mn, A, Cc, hmat, hdom_index, cc,
                           gd.tvals(mn, Cc))
            for g in gd.carriers[G]:
                lutg = row_lut(extG1_row, extG1, g, lm)
                for xs in gd.tvals(l, A):
                    fstar_col = extF.col((g, xs))
                    lhs = lutg[fstar_col]
                    rhs = extH.col((g, xs))
                    if not _np.array_equal(lhs, rhs):
                        fi = int(_np.nonzero(lhs != rhs)[0][0])
                        return ("assoc", G, A, B, Cc, l, m, n,
                                f"f#{fi}", f"g#{oi}", g, xs)
    return None


def _graded_regrade_combo(gd, codecs, G, A, B, m, n, n2):
    """ext_{m,n}(T_xi o f) vs T_{m (+) xi} o ext_{m,n2}(f) for xi : n >= n2,
    and the mirrored condition in the first index."""
    cy = codecs[B]
    fmat, fdom, flv = _fmat_for(gd, G, A, n2, cy)
    # T_xi o f : recode every value through the (n, n2) regrade table
    lut = _np.arange(len(cy.vals), dtype=_np.int32)
    for v in gd.tvals(n2, B):
        lut[cy.code[v]] = cy.code[gd.tx[(n, n2, B, v)]]
    fmat_x = lut[fmat]
    extL = _ExtVec(gd, G, m, n, A, B, fmat_x, fdom, cy, gd.tvals(n, B))
    extR = _ExtVec(gd, G, m, n2, A, B, fmat, fdom, cy, flv)
    mn, mn2 = gd.tensor(m, n), gd.tensor(m, n2)
    lut2 = _np.arange(len(cy.vals), dtype=_np.int32)
    for v in gd.tvals(mn2, B):
        lut2[cy.code[v]] = cy.code[gd.tx[(mn, mn2, B, v)]]
    for g in gd.carriers[G]:
        for xs in gd.tvals(m, A):
            lhs = extL.col((g, xs))
            rhs = lut2[extR.col((g, xs))]
            if not _np.array_equal(lhs, rhs):
                fi = int(_np.nonzero(lhs != rhs)[0][0])
                return ("regrade-compat", G, A, B, m, n, n2, g, xs, f"f#{fi}")
    # first index: ext(f) o (G x T_xi) vs T_{xi (+) n2} o ext at m
    for m2 in gd.grades:
        if not (m >= m2) or gd.tensor(m2, n2) not in gd.grades:
            continue
        extS = _ExtVec(gd, G, m2, n2, A, B, fmat, fdom, cy, flv)
        mn2b = gd.tensor(m2, n2)
        lut3 = _np.arange(len(cy.vals), dtype=_np.int32)
        for v in gd.tvals(mn2b, B):
            lut3[cy.code[v]] = cy.code[gd.tx[(mn2, mn2b, B, v)]]
        for g in gd.carriers[G]:
            for xs in gd.tvals(m2, A):
                ys = gd.tx[(m, m2, A, xs)]
                lhs = extR.col((g, ys))
                rhs = lut3[extS.col((g, xs))]
                if not _np.array_equal(lhs, rhs):
                    fi = int(_np.nonzero(lhs != rhs)[0][0])
                    return ("regrade-compat-left", G, A, B, m, m2, n2, g,
                            xs, f"f#{fi}")
    return None


def graded_mutations(gd: GradedMonadData, rng=None, ext_samples=0):
    """Single-cell mutations: every eta cell, every regrade cell, and (when
    rng is given) a sample of extension-operator cells."""
    for (X, a), val in list(gd.eta.items()):
        space = gd.tvals(1, X)
        alt = space[(space.index(val) + 1) % len(space)]
        mut = gd.copy()
        mut.eta[(X, a)] = alt
        yield (f"eta[{X},{a}] := {alt}", mut)
    for (m, n, X, v), val in list(gd.tx.items()):
        space = gd.tvals(m, X)
        if len(space) < 2:
            continue
        alt = space[(space.index(val) + 1) % len(space)]
        mut = gd.copy()
        mut.tx[(m, n, X, v)] = alt
        yield (f"tx[{m},{n},{X},{v}] := {alt}", mut)
    if not rng or not ext_samples:
        return
    names = sorted(gd.carriers)
    made = 0
    while made < ext_samples:
        G, A, B = (rng.choice(names) for _ in range(3))
        m = rng.choice(gd.grades)
        n = rng.choice(gd.grades)
        if gd.tensor(m, n) not in gd.grades:
            continue
        dom = [(g, a) for g in gd.carriers[G] for a in gd.carriers[A]]
        f = {k: rng.choice(gd.tvals(n, B)) for k in dom}
        g0 = rng.choice(gd.carriers[G])
        xs = rng.choice(gd.tvals(m, A))
        cur = gd.ext_value(G, m, n, A, B, f, (g0, xs))
        space = gd.tvals(gd.tensor(m, n), B)
        alt = space[(space.index(cur) + 1) % len(space)]
        mut = gd.copy()
        key = (G, m, n, A, B, tuple(sorted(f.items())))
        mut.ext_overrides[(key, (g0, xs))] = alt
        made += 1
        yield (f"ext[{G},{m},{n},{A},{B}]@{(g0, xs)} := {alt}", mut)
