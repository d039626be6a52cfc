"""Normalization, the three-valued equality procedure, and proof replay."""

import random

import pytest

from relmeta import gen as genmod
from relmeta.equations import (BudgetExceeded, EqProof, Step, check_eq,
                               check_proof, derive_local_store, normalize,
                               parse_proof)
from relmeta.signatures import load_signature
from relmeta.syntax import (alpha_eq, judgement, parse_context, parse_term,
                            parse_type, term_to_text)


def _j(calc, sig, ctx, term, ty, form=None):
    return judgement(calc, [parse_context(c, sig) for c in ctx] if
                     isinstance(ctx, list) else [parse_context(ctx, sig)],
                     parse_term(term, calc, sig), parse_type(ty, sig),
                     form=form)


# -- normalization ------------------------------------------------------------

def test_left_unit(coin_sig):
    j = _j("rmm", coin_sig, "y : J(2)", "do x <- ret y in ret not x", "T(2)")
    res = normalize(j, coin_sig)
    assert term_to_text(res.term) == "ret not y"
    assert [s.name for s in res.steps] == ["do.beta"]


def test_right_unit_and_assoc(coin_sig):
    j = _j("rmm", coin_sig, "u : T(2)",
           "do z <- (do x <- u in ret not x) in ret z", "T(2)")
    res = normalize(j, coin_sig)
    assert term_to_text(res.term) == "do x <- u in ret not x"


def test_projection_laws(coin_sig):
    j = _j("rmm", coin_sig, "x : J(2)", "pi1 (x, coin)", "J(2)")
    assert term_to_text(normalize(j, coin_sig).term) == "x"
    j = _j("rmm", coin_sig, "p : J(2) * T(2)", "(pi1 p, pi2 p)",
           "J(2) * T(2)")
    assert term_to_text(normalize(j, coin_sig).term) == "p"


def test_unit_eta(coin_sig):
    j = _j("rmm", coin_sig, "p : 1 * 1", "pi1 p", "1")
    assert normalize(j, coin_sig).term.kind == "unit"


def test_gen_word_collapse(coin_sig):
    j = _j("rmm", coin_sig, "x : J(2)", "not not x", "J(2)")
    assert term_to_text(normalize(j, coin_sig).term) == "x"


def test_assoc_right_nesting(coin_sig):
    j = _j("rmm", coin_sig, "u : T(2)",
           "do z <- (do y <- u in ret not y) in coin", "T(2)")
    nf = normalize(j, coin_sig).term
    assert nf.kind == "do"
    assert nf.subs[0].kind != "do"  # right-nested


def test_graded_normalization(gmm_sig):
    j = _j("gmm", gmm_sig, "u : T_2(A)",
           "do x <- regrade<3>=2> u in regrade<2>=1> ret x", "T_6(A)")
    res = normalize(j, gmm_sig)
    # regrades hoist out, the unit law collapses the bind, stacks compose
    assert term_to_text(res.term) == "regrade<6>=2> u"
    j2 = _j("gmm", gmm_sig, ["u : T_2(A), f : T_3(B)"],
            "do x <- regrade<3>=2> u in regrade<4>=3> f", "T_12(B)")
    res2 = normalize(j2, gmm_sig)
    assert res2.term.kind == "regrade"
    assert res2.term.subs[0].kind == "do"
    assert str(res2.term.xi) == "12>=6"


def test_lnl_commuting(lnl_sig):
    # the let hoists out of the bind scrutinee; ret then pops outward
    j = _j("lnl", lnl_sig, ["", "u : I, x : J(A)"],
           "do y <- (let () = u in ret x) in ret y", "T(A)", form="C")
    res = normalize(j, lnl_sig)
    assert term_to_text(res.term) == "ret (let () = u in x)"
    # hoisting out of an application's function position
    j2 = _j("lnl", lnl_sig, ["", "u : I, f : J(A) -o T(A), x : J(A)"],
            "app (let () = u in f) x", "T(A)", form="C")
    assert term_to_text(normalize(j2, lnl_sig).term) == \
        "let () = u in app f x"


def test_lnl_grade_programs(lnl_sig):
    # splitting off a unit grade is the identity
    j = _j("lnl", lnl_sig, ["", "w : gr(1 * 2)"],
           "let (s,r) = unmerge w in (let () = unmerge s in r)", "gr(2)",
           form="C")
    assert term_to_text(normalize(j, lnl_sig).term) == "w"
    j = _j("lnl", lnl_sig, ["", "w : gr(2 * 3)"],
           "let (s,r) = unmerge w in (r, s)", "gr(3) * gr(2)", form="C")
    assert term_to_text(normalize(j, lnl_sig).term) == "unmerge w"
    j = _j("lnl", lnl_sig, ["", "w : gr(2 * 3)"], "merge unmerge w",
           "gr(6)", form="C")
    assert term_to_text(normalize(j, lnl_sig).term) == "w"


def test_armm_rules():
    sig = load_signature("calculus armm\nobject B\n")
    j = _j("armm", sig, ["", "w : B", ""],
           "(lamarrow (a:B). ret J(a)) . w", "T(B)", form="C")
    assert term_to_text(normalize(j, sig).term) == "ret J(w)"
    j = _j("armm", sig, ["u : B => T(B)"], "lamarrow (a:B). u . a",
           "B => T(B)", form="A")
    assert term_to_text(normalize(j, sig).term) == "u"
    j = _j("armm", sig, ["", "", "t : J(B)"],
           "let J(a) = t in J(a)", "J(B)", form="C")
    assert term_to_text(normalize(j, sig).term) == "t"
    # there is no let/ret commuting conversion in the three-zone theory:
    # this term is already normal
    j = _j("armm", sig, ["", "", "t : J(B)"],
           "let J(a) = t in ret J(a)", "T(B)", form="C")
    assert term_to_text(normalize(j, sig).term) == "let J(a) = t in ret J(a)"


def test_armm_let_exchange_orients():
    sig = load_signature("calculus armm\nobject B\n")
    # independent K-let hoists over a J-let (fixed kind priority)
    j = _j("armm", sig, ["k : B", "d : B", "t : J(B) * K(B)"],
           "let J(a) = pi1 t in (let K(b) = pi2 t in ret J((a, b)))",
           "T(B * B)", form="C")
    nf = normalize(j, sig).term
    assert nf.kind == "letj"  # letj has higher priority: letpair/K float out
    # and the exchange terminates (no ping-pong): normalize twice agrees
    j2 = judgement("armm", j.zones, nf, j.ty, form="C")
    assert alpha_eq(normalize(j2, sig).term, nf)


def test_budget_exceeded(coin_sig):
    j = _j("rmm", coin_sig, "u : T(2)",
           "do z <- (do y <- u in ret not y) in coin", "T(2)")
    with pytest.raises(BudgetExceeded):
        normalize(j, coin_sig, budget=1)


# -- checkEq ------------------------------------------------------------------

def test_reflexivity(coin_sig):
    j = _j("rmm", coin_sig, "", "coin", "T(2)")
    assert check_eq(j, j, coin_sig).status == "PROVEN"


def test_stone_equations_proven(coin_sig, dist_binding):
    for lhs, rhs, ty in [
        ("do x <- coin in ret ()", "ret ()", "T(1)"),
        ("do x <- coin in do y <- coin in ret pair2(x,y)",
         "do y <- coin in do x <- coin in ret pair2(x,y)", "T(4)"),
        ("do x <- coin in ret not x", "coin", "T(2)"),
    ]:
        jl = _j("rmm", coin_sig, "", lhs, ty)
        jr = _j("rmm", coin_sig, "", rhs, ty)
        v = check_eq(jl, jr, coin_sig, [("dist", dist_binding)])
        assert v.status == "PROVEN"
        assert check_proof(v.proof, jl, jr, coin_sig)


def test_dropping_idempotence_axiom(coin_sig, dist_binding):
    import copy
    weak = copy.deepcopy(coin_sig)
    weak.theory.axioms = [ax for ax in weak.theory.axioms
                          if ax.name != "ax1"]
    jl = _j("rmm", weak, "", "do x <- coin in ret ()", "T(1)")
    jr = _j("rmm", weak, "", "ret ()", "T(1)")
    v = check_eq(jl, jr, weak, [("dist", dist_binding)])
    assert v.status in ("UNKNOWN", "REFUTED")
    assert v.status == "UNKNOWN"  # the model validates the equation


def test_refutation_with_witness(coin_sig, dist_binding):
    jl = _j("rmm", coin_sig, "z : J(2)", "do x <- coin in ret x", "T(2)")
    jr = _j("rmm", coin_sig, "z : J(2)", "ret z", "T(2)")
    v = check_eq(jl, jr, coin_sig, [("dist", dist_binding)])
    assert v.status == "REFUTED"
    assert v.model == "dist"
    assert v.witness == {"z": "tt"}


def test_unknown_carries_normal_forms(coin_sig):
    jl = _j("rmm", coin_sig, "z : J(2)", "do x <- coin in ret x", "T(2)")
    jr = _j("rmm", coin_sig, "z : J(2)", "ret z", "T(2)")
    v = check_eq(jl, jr, coin_sig)
    assert v.status == "UNKNOWN"
    assert v.lhs_nf is not None and v.rhs_nf is not None


# -- proof objects -------------------------------------------------------------

def test_proof_rendering_and_parsing(coin_sig):
    jl = _j("rmm", coin_sig, "y : J(2)", "do x <- ret y in ret not x",
            "T(2)")
    jr = _j("rmm", coin_sig, "y : J(2)", "ret not y", "T(2)")
    v = check_eq(jl, jr, coin_sig)
    text = v.proof.render()
    reparsed = parse_proof(text, coin_sig, "rmm")
    assert check_proof(reparsed, jl, jr, coin_sig)


def test_proof_wrong_position_fails(coin_sig):
    jl = _j("rmm", coin_sig, "y : J(2)", "do x <- ret y in ret not x",
            "T(2)")
    jr = _j("rmm", coin_sig, "y : J(2)", "ret not y", "T(2)")
    bad = EqProof((Step("do.beta", (0,)),))
    assert not check_proof(bad, jl, jr, coin_sig)


def test_axiom_proof_with_substitution(store_sig):
    jl = _j("rmm", store_sig, "a : J(Atom), b : J(Val)",
            "do z <- assign(a,b) in lookup(a)", "T(Val)")
    jr = _j("rmm", store_sig, "a : J(Atom), b : J(Val)",
            "do z <- assign(a,b) in ret b", "T(Val)")
    proof = parse_proof("ax1 at root with {x := a, y := b} lr fwd",
                        store_sig, "rmm")
    assert check_proof(proof, jl, jr, store_sig)
    wrong = parse_proof("ax1 at root with {x := b, y := a} lr fwd",
                        store_sig, "rmm")
    assert not check_proof(wrong, jl, jr, store_sig)


# -- local store ---------------------------------------------------------------

def test_local_store_suite(store_sig):
    from conftest import fixture_text
    from relmeta.cli import load_eq_file
    import tempfile, os
    fixtures = []
    for name in ("store_d1.eq", "store_d2.eq"):
        with tempfile.NamedTemporaryFile("w", suffix=".eq", delete=False) \
                as fh:
            fh.write(fixture_text(name))
            path = fh.name
        jl, jr = load_eq_file(path, store_sig)
        os.unlink(path)
        fixtures.append((name, jl, jr))
    rep = derive_local_store(store_sig, fixtures)
    assert rep.axioms_ok
    assert rep.ok, [(n, v.status) for n, v in rep.results]


def test_local_store_empty_suite_vacuous(store_sig):
    rep = derive_local_store(store_sig, [])
    assert rep.ok


# -- confluence smoke (small; the full 1000-term sweep runs in acceptance) ----

def test_confluence_smoke_small(sweep_sig, rng):
    g = genmod.Gen(rng, sweep_sig, "rmm", ["1o", "2"])
    done = 0
    while done < 60:
        ctx = genmod.seeded_context("rmm", ["1o", "2"], g.gen_context(1))
        ty = g.gen_type(1)
        try:
            t = g.gen_term(ctx, ty, rng.randint(2, 10))
        except ValueError:
            continue
        done += 1
        j = judgement("rmm", [ctx], t, ty)
        base = normalize(j, sweep_sig).term
        for k in range(3):
            alt = normalize(j, sweep_sig,
                            rng=random.Random(1000 * done + k)).term
            assert alpha_eq(alt, base), term_to_text(t)


def test_subject_reduction_enforced(coin_sig):
    # every normalize step re-checks; a well-typed start cannot break
    j = _j("rmm", coin_sig, "u : T(2) * T(2)",
           "do x <- pi1 u in do y <- pi2 u in ret pair2(x,y)", "T(4)")
    normalize(j, coin_sig, check_steps=True)
