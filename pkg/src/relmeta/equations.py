"""Equational reasoning: normalization, proof checking, and a three-valued
equality decision procedure.

checkEq is sound but deliberately incomplete: Proven means the oriented
rewrite system plus a bounded bidirectional axiom search joined the two
sides; Refuted means a registered finite model separates them under some
environment (with a replayable witness); otherwise the verdict is Unknown
and carries both normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rules as rules_mod
from . import syntax
from .rules import Rule, RuleCtx, RULES_BY_HEAD
from .signatures import Axiom, Signature
from .syntax import (Judgement, Term, alpha_eq, positions, replace_at, shift,
                     subterm_at, term_to_text)
from .typecheck import check


class RewriteError(Exception):
    pass


class BudgetExceeded(RewriteError):
    def __init__(self, budget, term):
        self.budget, self.term = budget, term
        super().__init__(f"rewriting exceeded the step budget {budget}")


class SubjectReductionError(RewriteError):
    pass


@dataclass(frozen=True)
class Step:
    name: str
    path: tuple
    orientation: str = "fwd"      # position in a valley proof
    kind: str = "rule"            # "rule" | "axiom"
    axdir: str = "lr"             # for axioms: which side rewrites to which
    sigma: tuple = ()             # for axioms: sorted (var, term) bindings

    def render(self) -> str:
        loc = ".".join(str(i) for i in self.path) if self.path else "root"
        out = f"{self.name} at {loc}"
        if self.kind == "axiom" and self.sigma:
            binds = ", ".join(f"{x} := {term_to_text(t)}"
                              for x, t in self.sigma)
            out += " with {" + binds + "}"
        if self.kind == "axiom":
            out += f" {self.axdir}"
        return out + f" {self.orientation}"


@dataclass
class EqProof:
    steps: tuple[Step, ...]

    def render(self) -> str:
        return "\n".join(s.render() for s in self.steps)


@dataclass
class EqVerdict:
    status: str  # PROVEN | REFUTED | UNKNOWN
    proof: EqProof | None = None
    model: str | None = None
    witness: dict | None = None
    lhs_nf: Term | None = None
    rhs_nf: Term | None = None

    @property
    def proven(self):
        return self.status == "PROVEN"

    def render(self) -> str:
        if self.status == "PROVEN":
            return "PROVEN\n" + self.proof.render()
        if self.status == "REFUTED":
            env = ", ".join(f"{k}={v}" for k, v in sorted(self.witness.items()))
            return f"REFUTED model={self.model} witness=[{env}]"
        return (f"UNKNOWN\n  lhs normal form: {term_to_text(self.lhs_nf)}\n"
                f"  rhs normal form: {term_to_text(self.rhs_nf)}")


@dataclass
class NormalizeResult:
    term: Term
    steps: list[Step] = field(default_factory=list)


# ---------------------------------------------------------------------------
# redex enumeration and single steps

def _annotate(j: Judgement, sig: Signature):
    res = check(j, sig)
    if not res.ok:
        raise RewriteError(f"term does not type-check: {res.message}")
    return res.annotations


def redexes(j: Judgement, sig: Signature, include_search=False):
    """All (rule, path, result) triples available on the judgement's term."""
    ann = _annotate(j, sig)
    out = []
    t = j.term
    for path in positions(t):
        sub = subterm_at(t, path)
        for r in RULES_BY_HEAD.get((j.calculus, sub.kind), ()):
            if r.search_only and not include_search:
                continue
            ctx = RuleCtx(sig, j.calculus, path, ann)
            new = r.rewrite(sub, ctx)
            if new is not None and new != sub:
                out.append((r, path, replace_at(t, path, new)))
    return out


def apply_rule_at(j: Judgement, sig: Signature, rule_name: str, path: tuple,
                  include_search=True) -> Term:
    """Replay a single named rule at a position; raises if it does not fire."""
    ann = _annotate(j, sig)
    sub = subterm_at(j.term, path)
    for r in RULES_BY_HEAD.get((j.calculus, sub.kind), ()):
        if r.name != rule_name:
            continue
        new = r.rewrite(sub, RuleCtx(sig, j.calculus, path, ann))
        if new is not None:
            return replace_at(j.term, path, new)
    raise RewriteError(f"rule {rule_name} does not apply at {path}")


def normalize(j: Judgement, sig: Signature, *, budget: int = 10000,
              rng=None, check_steps: bool = True) -> NormalizeResult:
    """Rewrite to a fixed point of the oriented rule set.

    Deterministic (leftmost-outermost, rule registration order) unless an
    rng is supplied, in which case each step picks a uniformly random redex
    (used by the confluence smoke tests).  Every step re-checks the
    judgement, so subject reduction is enforced, not assumed.
    """
    cur = j
    steps: list[Step] = []
    for _ in range(budget):
        rds = redexes(cur, sig)
        if not rds:
            return NormalizeResult(cur.term, steps)
        if rng is None:
            r, path, new_term = rds[0]
        else:
            r, path, new_term = rds[rng.randrange(len(rds))]
        nxt = Judgement(cur.calculus, cur.form, cur.zones, new_term, cur.ty)
        if check_steps:
            res = check(nxt, sig)
            if not res.ok:
                raise SubjectReductionError(
                    f"rule {r.name} at {path} broke typing: {res.message}\n"
                    f"  before: {term_to_text(cur.term)}\n"
                    f"  after:  {term_to_text(new_term)}")
        cur = nxt
        steps.append(Step(r.name, path))
    raise BudgetExceeded(budget, cur.term)


# ---------------------------------------------------------------------------
# axiom application

def _min_free_ok(t: Term, depth: int) -> bool:
    """True iff t references no binder below `depth` (relative indices)."""
    if t.kind == "bvar":
        return t.index >= depth
    ok = True
    for i, s in enumerate(t.subs):
        ok = ok and _min_free_ok(s, depth + syntax.child_binders(t, i))
    return ok


def _amatch(pat: Term, subj: Term, axvars: set, depth: int, sigma: dict):
    if pat.kind == "var" and pat.name in axvars:
        if not _min_free_ok(subj, depth):
            return None
        cand = shift(subj, -depth, 0) if depth else subj
        if pat.name in sigma:
            return sigma if alpha_eq(sigma[pat.name], cand) else None
        sigma[pat.name] = cand
        return sigma
    if (pat.kind != subj.kind or pat.name != subj.name
            or pat.index != subj.index or pat.xi != subj.xi
            or pat.tyann != subj.tyann or len(pat.subs) != len(subj.subs)):
        return None
    for i, (p, s) in enumerate(zip(pat.subs, subj.subs)):
        sigma = _amatch(p, s, axvars, depth + syntax.child_binders(pat, i),
                        sigma)
        if sigma is None:
            return None
    return sigma


def _ainst(pat: Term, sigma: dict, depth: int = 0) -> Term:
    if pat.kind == "var" and pat.name in sigma:
        return shift(sigma[pat.name], depth) if depth else sigma[pat.name]
    if not pat.subs:
        return pat
    return syntax.with_subs(
        pat, (_ainst(s, sigma, depth + syntax.child_binders(pat, i))
              for i, s in enumerate(pat.subs)))


def axiom_moves(j: Judgement, sig: Signature, axioms):
    """All single axiom rewrites (either direction, any position) that keep
    the judgement well-typed."""
    out = []
    for ax in axioms:
        axvars = {x for x, _ in ax.zones[0]}
        for axdir, (src, tgt) in (("lr", (ax.lhs, ax.rhs)),
                                  ("rl", (ax.rhs, ax.lhs))):
            for path in positions(j.term):
                sub = subterm_at(j.term, path)
                sigma = _amatch(src, sub, axvars, 0, {})
                if sigma is None:
                    continue
                missing = axvars - set(sigma)
                if missing:
                    continue  # a var only on the other side cannot be guessed
                new_sub = _ainst(tgt, sigma)
                new_term = replace_at(j.term, path, new_sub)
                nxt = Judgement(j.calculus, j.form, j.zones, new_term, j.ty)
                if not check(nxt, sig).ok:
                    continue
                out.append((Step(ax.name, path, kind="axiom", axdir=axdir,
                                 sigma=tuple(sorted(sigma.items()))),
                            nxt))
    return out


def apply_axiom_at(j: Judgement, sig: Signature, ax: Axiom, path: tuple,
                   axdir: str, sigma: dict | None = None) -> Term:
    axvars = {x for x, _ in ax.zones[0]}
    src, tgt = (ax.lhs, ax.rhs) if axdir == "lr" else (ax.rhs, ax.lhs)
    sub = subterm_at(j.term, path)
    if sigma is None:
        sigma = _amatch(src, sub, axvars, 0, {})
        if sigma is None:
            raise RewriteError(f"axiom {ax.name} does not match at {path}")
    else:
        if not alpha_eq(_ainst(src, sigma), sub):
            raise RewriteError(
                f"axiom {ax.name} with the given substitution does not match"
                f" at {path}")
    return replace_at(j.term, path, _ainst(tgt, sigma))


# ---------------------------------------------------------------------------
# the three-valued decision procedure

def check_eq(jl: Judgement, jr: Judgement, sig: Signature, models=(), *,
             depth: int = 6, breadth: int = 400, budget: int = 10000
             ) -> EqVerdict:
    """Proven / Refuted / Unknown for a pair of judgements of one shape.

    models is a list of (name, ModelBinding) used for refutation.
    """
    if (jl.calculus, jl.form, jl.zones, jl.ty) != \
            (jr.calculus, jr.form, jr.zones, jr.ty):
        raise RewriteError("the two sides are not judgements of one shape")
    nl = normalize(jl, sig, budget=budget)
    nr = normalize(jr, sig, budget=budget)
    rhs_steps = [Step(s.name, s.path, orientation="bwd")
                 for s in reversed(nr.steps)]
    if alpha_eq(nl.term, nr.term):
        return EqVerdict("PROVEN",
                         proof=EqProof(tuple(nl.steps + rhs_steps)))
    axioms = sig.theory.axioms if sig.theory else []
    mid = _bisearch(jl, nl, jr, nr, sig, axioms, depth, breadth, budget)
    if mid is not None:
        return EqVerdict("PROVEN", proof=EqProof(tuple(mid)))
    from . import models as models_mod
    for name, binding in models:
        eq, witness = models_mod.semantic_eq(jl, jr, binding, sig)
        if not eq:
            return EqVerdict("REFUTED", model=name, witness=witness)
    return EqVerdict("UNKNOWN", lhs_nf=nl.term, rhs_nf=nr.term)


def _expand(state_j, sig, axioms, budget):
    """One search layer: an axiom move followed by renormalization."""
    out = []
    moves = axiom_moves(state_j, sig, axioms)
    # search-only rules participate in both orientations
    for r, path, new_term in redexes(state_j, sig, include_search=True):
        if r.search_only:
            moves.append((Step(r.name, path),
                          Judgement(state_j.calculus, state_j.form,
                                    state_j.zones, new_term, state_j.ty)))
    for step, nxt in moves:
        norm = normalize(nxt, sig, budget=budget)
        out.append(([step] + norm.steps,
                    Judgement(nxt.calculus, nxt.form, nxt.zones, norm.term,
                              nxt.ty)))
    return out


def _bisearch(jl, nl, jr, nr, sig, axioms, depth, breadth, budget):
    if not axioms and not any(
            r.search_only for r in rules_mod.rules_for(jl.calculus, True)):
        return None
    mk = lambda j, t: Judgement(j.calculus, j.form, j.zones, t, j.ty)
    # seed with the originals too: an axiom redex may only exist before
    # normalization reshapes the term
    left = {nl.term: list(nl.steps), jl.term: []}
    right = {nr.term: [Step(s.name, s.path, orientation="bwd")
                       for s in reversed(nr.steps)], jr.term: []}
    lfront, rfront = dict(left), dict(right)
    for _ in range(depth):
        if not lfront and not rfront:
            break
        expand_left = (len(lfront) <= len(rfront) and lfront) or not rfront
        src, seen, other = ((lfront, left, right) if expand_left
                            else (rfront, right, left))
        nxt_front = {}
        base_j = jl if expand_left else jr
        for term, steps in list(src.items()):
            for new_steps, njudge in _expand(mk(base_j, term), sig, axioms,
                                             budget):
                nt = njudge.term
                if nt in seen:
                    continue
                if expand_left:
                    acc = steps + new_steps
                else:
                    acc = [Step(s.name, s.path, orientation="bwd",
                                kind=s.kind, axdir=s.axdir, sigma=s.sigma)
                           for s in reversed(new_steps)] + steps
                seen[nt] = acc
                nxt_front[nt] = acc
                if len(seen) > breadth:
                    break
                if nt in other:
                    if expand_left:
                        return acc + other[nt]
                    return other[nt] + acc
            if len(seen) > breadth:
                break
        if expand_left:
            lfront = nxt_front
        else:
            rfront = nxt_front
        meet = set(left) & set(right)
        if meet:
            t = next(iter(meet))
            return left[t] + right[t]
    return None


# ---------------------------------------------------------------------------
# proof checking

def check_proof(proof: EqProof, jl: Judgement, jr: Judgement,
                sig: Signature) -> bool:
    """Replay a valley proof: forward steps from the left endpoint, backward
    steps from the right endpoint, cursors must meet alpha-equal.  Every
    intermediate term must type-check (rule/axiom application enforces it).
    """
    steps = list(proof.steps)
    i, jdx = 0, len(steps)
    axioms = {ax.name: ax for ax in (sig.theory.axioms if sig.theory else [])}

    def apply_one(j, step):
        if step.kind == "axiom":
            ax = axioms.get(step.name)
            if ax is None:
                raise RewriteError(f"unknown axiom {step.name}")
            new_term = apply_axiom_at(j, sig, ax, step.path, step.axdir,
                                      dict(step.sigma) if step.sigma else None)
        else:
            new_term = apply_rule_at(j, sig, step.name, step.path)
        nxt = Judgement(j.calculus, j.form, j.zones, new_term, j.ty)
        if not check(nxt, sig).ok:
            raise RewriteError("proof step produced an ill-typed term")
        return nxt

    try:
        curl = jl
        while i < jdx and steps[i].orientation == "fwd":
            curl = apply_one(curl, steps[i])
            i += 1
        curr = jr
        while jdx > i and steps[jdx - 1].orientation == "bwd":
            curr = apply_one(curr, steps[jdx - 1])
            jdx -= 1
        if i != jdx:
            return False  # not a valley: a fwd step after a bwd step
        return alpha_eq(curl.term, curr.term)
    except RewriteError:
        return False


def parse_proof(text: str, sig: Signature, calculus: str) -> EqProof:
    """Parse the line-oriented proof format:
    `<name> at <path> [with {x := <term>, ...}] [lr|rl] <fwd|bwd>`."""
    steps = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        head, _, rest = ln.partition(" at ")
        name = head.strip()
        rest = rest.strip()
        sigma = ()
        if " with " in rest:
            loc, _, with_part = rest.partition(" with ")
            brace = with_part[with_part.index("{") + 1:with_part.rindex("}")]
            binds = []
            for item in _split_top(brace, ","):
                x, _, tm = item.partition(":=")
                binds.append((x.strip(),
                              syntax.parse_term(tm.strip(), calculus, sig)))
            sigma = tuple(sorted(binds))
            tail = with_part[with_part.rindex("}") + 1:].split()
        else:
            parts = rest.split()
            loc, tail = parts[0], parts[1:]
        loc = loc.strip()
        path = () if loc == "root" else tuple(int(c) for c in loc.split("."))
        axdir, orient, kind = "lr", "fwd", "rule"
        for tok in tail:
            if tok in ("lr", "rl"):
                axdir, kind = tok, "axiom"
            elif tok in ("fwd", "bwd"):
                orient = tok
        steps.append(Step(name, path, orientation=orient, kind=kind,
                          axdir=axdir, sigma=sigma))
    return EqProof(tuple(steps))


def _split_top(text, sep):
    depth, parts, cur = 0, [], []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# the local-store regression entry point

@dataclass
class StoreReport:
    axioms_ok: bool
    results: list  # (name, EqVerdict)

    @property
    def ok(self):
        return self.axioms_ok and all(v.proven for _, v in self.results)


def derive_local_store(sig: Signature, fixtures, models=()) -> StoreReport:
    """Check that the store theory's axioms load (they type-check at load
    time) and that each fixture equation pair is Proven from them.

    fixtures: list of (name, Judgement, Judgement).
    """
    axioms_ok = sig.theory is not None and len(sig.theory.axioms) >= 2
    results = []
    for name, jl, jr in fixtures:
        results.append((name, check_eq(jl, jr, sig, models)))
    return StoreReport(axioms_ok, results)
