"""Batch command-line frontend and REPL.

Exit codes: 0 accepted/Proven/pass, 1 rejected/Refuted/fail, 2 Unknown,
3 usage or I/O error.  All randomized work is seeded and the seed prints
in the report header; with the default single worker, reports are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import equations, lawcheck, models, syntax, translate
from .signatures import Signature, SignatureError, load_signature
from .syntax import Judgement, SyntaxError_, parse_context, parse_term, parse_type
from .typecheck import check, serialize_derivation

EXIT_OK, EXIT_REJECT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# input files

ZONE_KEYS = {"ctx": 0, "dctx": 1, "lctx": 1, "pctx": 2}


def read_kv_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(str(e))
    out = {}
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].rstrip()
        if not ln.strip():
            continue
        head, _, rest = ln.partition(" ")
        out.setdefault(head, []).append(rest.strip())
    return out


def load_judgement(path, sig: Signature, term_key="term") -> Judgement:
    kv = read_kv_file(path)
    calculus = kv.get("calculus", ["rmm"])[0]
    nzones = max(syntax.ZONES.get((calculus, "C"),
                                  syntax.ZONES[(calculus, "A")]), 1)
    zones = [() for _ in range(nzones)]
    has_c_zone = False
    for key, idx in ZONE_KEYS.items():
        if key in kv:
            if idx >= nzones:
                raise CliError(f"{key} is not a zone of {calculus}")
            zones[idx] = parse_context(kv[key][0], sig)
            if idx > 0:
                has_c_zone = True
    form = kv.get("form", [None])[0]
    if form is None:
        form = "C" if ((calculus, "C") in syntax.ZONES and
                       (has_c_zone or calculus in ("lnl", "arrow", "armm")))\
            else "A"
    if form == "A":
        zones = zones[:1]
    if form in ("command", "term"):
        form = "C" if form == "command" else "A"
    if term_key not in kv or "type" not in kv:
        raise CliError(f"file {path} needs `{term_key}` and `type` lines")
    term = parse_term(kv[term_key][0], calculus, sig)
    ty = parse_type(kv["type"][0], sig)
    return Judgement(calculus, form, tuple(zones), term, ty)


def load_eq_file(path, sig: Signature):
    jl = load_judgement(path, sig, term_key="lhs")
    jr = load_judgement(path, sig, term_key="rhs")
    return jl, jr


# ---------------------------------------------------------------------------
# reporting helpers

def emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def header(args):
    if not args.json:
        print(f"# relmeta seed={args.seed} workers={args.workers}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_typecheck(args):
    sig = load_signature(args.sig) if args.sig else Signature()
    j = load_judgement(args.file, sig)
    res = check(j, sig)
    header(args)
    if res.ok:
        emit(args, {"verdict": "accepted"},
             f"accepted: {j}\n" + serialize_derivation(res.derivation))
        return EXIT_OK
    emit(args, {"verdict": "rejected", "rule": res.rule,
                "path": list(res.path or ()), "message": res.message,
                "expected": res.expected, "actual": res.actual},
         f"rejected at rule {res.rule}, path {res.path}: {res.message}")
    return EXIT_REJECT


def cmd_normalize(args):
    sig = load_signature(args.sig) if args.sig else Signature()
    j = load_judgement(args.file, sig)
    header(args)
    try:
        res = equations.normalize(j, sig, budget=args.step_budget)
    except equations.BudgetExceeded as e:
        emit(args, {"verdict": "budget-exceeded"}, str(e))
        return EXIT_UNKNOWN
    steps = "\n".join(s.render() for s in res.steps)
    emit(args, {"verdict": "normalized",
                "normal_form": syntax.term_to_text(res.term),
                "steps": [s.render() for s in res.steps]},
         f"normal form: {syntax.term_to_text(res.term)}\n{steps}")
    return EXIT_OK


def cmd_eval(args):
    sig = load_signature(args.sig) if args.sig else Signature()
    if not args.model:
        raise CliError("eval needs --model")
    binding = models.load_binding(args.model[0].split("=", 1)[-1], sig)
    j = load_judgement(args.file, sig)
    header(args)
    if any(zone for zone in j.zones):
        raise CliError("eval runs closed judgements; use eq for open ones")
    val = models.eval_term(j, {}, binding, sig)
    emit(args, {"verdict": "value", "value": str(val)}, f"value: {val}")
    return EXIT_OK


def _load_models(args, sig):
    out = []
    for spec in args.model or []:
        name, _, path = spec.rpartition("=")
        if not name:
            name, path = path.rsplit("/", 1)[-1].rsplit(".", 1)[0], path
        out.append((name, models.load_binding(path, sig)))
    return out


def cmd_eq(args):
    sig = load_signature(args.theory or args.sig)
    jl, jr = load_eq_file(args.file, sig)
    header(args)
    verdict = equations.check_eq(jl, jr, sig, _load_models(args, sig),
                                 depth=args.search_depth,
                                 budget=args.step_budget)
    payload = {"verdict": verdict.status}
    if verdict.status == "REFUTED":
        payload["model"] = verdict.model
        payload["witness"] = verdict.witness
    emit(args, payload, verdict.render())
    return {"PROVEN": EXIT_OK, "REFUTED": EXIT_REJECT,
            "UNKNOWN": EXIT_UNKNOWN}[verdict.status]


def cmd_prove(args):
    sig = load_signature(args.theory or args.sig)
    jl, jr = load_eq_file(args.file, sig)
    with open(args.proof, "r", encoding="utf-8") as fh:
        proof = equations.parse_proof(fh.read(), sig, jl.calculus)
    header(args)
    ok = equations.check_proof(proof, jl, jr, sig)
    emit(args, {"verdict": "checked" if ok else "step-mismatch"},
         "proof checked" if ok else "proof does not replay")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_translate(args):
    sig = load_signature(args.sig)
    j = load_judgement(args.file, sig)
    header(args)
    tgt, trace = translate.translate(j, sig, args.src, args.tgt)
    emit(args, {"verdict": "translated",
                "target": syntax.term_to_text(tgt.term),
                "target_type": syntax.type_to_text(tgt.ty),
                "typing_preserved": trace.typing_preserved},
         trace.render())
    return EXIT_OK


LAW_SETS = ("relmonad", "strong", "jstrong", "wstrong", "graded", "bistrong",
            "strengthmap", "all")


def load_instance(path):
    kv = read_kv_file(path)
    if "builtin" in kv:
        parts = kv["builtin"][0].split()
        name = parts[0]
        kwargs = dict(p.split("=", 1) for p in parts[1:])
        if name == "exception-restriction":
            return lawcheck.exception_restriction_instance(
                int(kwargs.get("amax", 2)), int(kwargs.get("cmax", 3)))
        if name == "identity":
            return lawcheck.identity_monad_instance(int(kwargs.get("cmax", 2)))
        if name == "graded-list":
            grades = tuple(int(g) for g in
                           kwargs.get("grades", "1,2,3").split(","))
            return lawcheck.bounded_list_instance(grades=grades)
        raise CliError(f"unknown builtin instance {name!r}")
    return _explicit_instance(kv, path)


def _explicit_instance(kv, path):
    objects = tuple(kv.get("objects", [""])[0].split())
    homs, comp, ids, dom, cod = {}, {}, {}, {}, {}
    for line in kv.get("hom", []):
        lhs, _, rhs = line.partition("=")
        a, b = lhs.split()
        ms = tuple(rhs.strip().strip("[]").replace(",", " ").split())
        homs[(a, b)] = ms
        for m in ms:
            dom[m], cod[m] = a, b
    for line in kv.get("comp", []):
        lhs, _, rhs = line.partition("=")
        g, f = lhs.split()
        comp[(g, f)] = rhs.strip()
    for line in kv.get("id", []):
        a, _, m = line.partition("=")
        ids[a.strip()] = m.strip()
    cat = lawcheck.FinCategory(objects, homs, comp, ids, dom, cod)
    for line in kv.get("unitobj", []):
        cat.unit = line.strip()
    for line in kv.get("tensor", []):
        lhs, _, rhs = line.partition("=")
        a, b = lhs.split()
        cat.obj_tensor[(a, b)] = rhs.strip()
    for line in kv.get("tensormor", []):
        lhs, _, rhs = line.partition("=")
        f, g = lhs.split()
        cat.mor_tensor[(f, g)] = rhs.strip()
    cat.validate()
    aobjs = tuple(kv.get("aobj", [" ".join(objects)])[0].split())
    jmap = {a: a for a in aobjs}
    for line in kv.get("jmap", []):
        a, _, x = line.partition("=")
        jmap[a.strip()] = x.strip()
    tmap, eta = {}, {}
    for line in kv.get("tmap", []):
        a, _, x = line.partition("=")
        tmap[a.strip()] = x.strip()
    for line in kv.get("eta", []):
        a, _, m = line.partition("=")
        eta[a.strip()] = m.strip()
    d = lawcheck.FinRelMonadData(path, cat, aobjs, jmap, tmap, eta)
    for line in kv.get("ext", []):
        lhs, _, rhs = line.partition("=")
        parts = lhs.split()
        if len(parts) == 3:
            a, b, f = parts
            d.ext_plain = d.ext_plain or {}
            d.ext_plain[(a, b, f)] = rhs.strip()
        else:
            g, a, b, f = parts
            d.ext_strong = d.ext_strong or {}
            d.ext_strong[(g, a, b, f)] = rhs.strip()
    return d


def cmd_lawcheck(args):
    inst = load_instance(args.file)
    header(args)
    reports = []
    want = args.laws
    if isinstance(inst, lawcheck.GradedMonadData):
        if want not in ("graded", "all"):
            raise CliError("a graded instance supports --laws graded")
        reports.append(lawcheck.check_graded_laws(inst))
    else:
        if want in ("relmonad", "all") and inst.ext_plain is not None:
            reports.append(lawcheck.check_rel_monad_laws(inst))
        if want in ("strong", "all") and inst.ext_strong is not None:
            reports.append(lawcheck.check_strong_laws(inst))
        if want in ("jstrong", "all") and inst.ext_j is not None:
            reports.append(lawcheck.check_j_strong_laws(inst))
        if want in ("wstrong", "all") and inst.ext_w is not None and \
                inst.wfun is not None:
            reports.append(lawcheck.check_w_strong_laws(inst, inst.wfun))
        if want in ("bistrong", "all"):
            if inst.ext_bi is None and inst.ext_strong is not None:
                inst.ext_bi = lawcheck.bistrong_from_strong(inst)
            if inst.ext_bi is not None:
                reports.append(lawcheck.check_bistrong_laws(inst))
        if want in ("strengthmap", "all") and inst.ext_j is not None and \
                inst.jfun is not None:
            theta, _ = lawcheck.strength_from_extension(inst)
            reports.append(lawcheck.check_strength_map_laws(theta, inst))
    if not reports:
        raise CliError(f"instance has no tables for --laws {want}")
    ok = all(r.ok for r in reports)
    text = "\n".join(r.render() for r in reports)
    emit(args, {"verdict": "pass" if ok else "fail",
                "laws": [{"law": l.law, "status": l.status,
                          "witness": None if l.witness is None
                          else [str(x) for x in l.witness]}
                         for r in reports for l in r.lines]},
         text)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_repl(args):
    sig = load_signature(args.sig) if args.sig else Signature()
    binding = None
    if args.model:
        binding = models.load_binding(args.model[0].split("=", 1)[-1], sig)
    calculus = args.calculus or "rmm"
    zones = {}
    expected = None
    print(f"# relmeta repl (calculus {calculus}; :help for commands)")
    while True:
        try:
            line = input("relmeta> ").strip()
        except EOFError:
            return EXIT_OK
        if not line:
            continue
        try:
            if line in (":q", ":quit", "quit"):
                return EXIT_OK
            if line == ":help":
                print("commands: :sig <path> | :model <path> |"
                      " :calculus <tag> | :ctx/:lctx/:dctx/:pctx <decls> |"
                      " :type <ty> | :check <t> | :eval <t> |"
                      " :normalize <t> | :eq <t> = <t> | :quit")
            elif line.startswith(":sig "):
                sig = load_signature(line[5:].strip())
                print("signature loaded")
            elif line.startswith(":model "):
                binding = models.load_binding(line[7:].strip(), sig)
                print("model binding loaded")
            elif line.startswith(":calculus "):
                calculus = line[10:].strip()
            elif any(line.startswith(f":{k} ") for k in ZONE_KEYS):
                key, rest = line[1:].split(" ", 1)
                zones[ZONE_KEYS[key]] = parse_context(rest, sig)
            elif line.startswith(":type "):
                expected = parse_type(line[6:].strip(), sig)
            elif line.startswith((":check ", ":eval ", ":normalize ")):
                cmd, rest = line[1:].split(" ", 1)
                t = parse_term(rest, calculus, sig)
                j = _repl_judgement(calculus, zones, t, expected, sig)
                if cmd == "check":
                    res = check(j, sig)
                    print("accepted" if res.ok else f"rejected: {res.message}")
                elif cmd == "eval":
                    if binding is None:
                        print("load a model binding first (:model)")
                    else:
                        print(models.eval_term(j, {}, binding, sig))
                else:
                    res = equations.normalize(j, sig)
                    print(syntax.term_to_text(res.term))
            elif line.startswith(":eq "):
                body = line[4:]
                p = syntax._P(syntax.tokenize(body), sig=sig,
                              calculus=calculus)
                tl = p.term()
                p.expect("=")
                tr = p.term()
                jl = _repl_judgement(calculus, zones, tl, expected, sig)
                jr = _repl_judgement(calculus, zones, tr, expected, sig)
                ms = [] if binding is None else [("repl", binding)]
                print(equations.check_eq(jl, jr, sig, ms).render())
            else:
                print(f"unrecognized input {line!r} (:help)")
        except (SyntaxError_, SignatureError, CliError, models.ModelError,
                equations.RewriteError) as e:
            print(f"error: {e}")


def _repl_judgement(calculus, zones, term, expected, sig):
    if expected is None:
        raise CliError("set an expected type first (:type)")
    n = max(i for (c, f), i in
            [((calculus, "A"), syntax.ZONES[(calculus, "A")])] +
            ([((calculus, "C"), syntax.ZONES[(calculus, "C")])]
             if (calculus, "C") in syntax.ZONES else []))
    zs = tuple(zones.get(i, ()) for i in range(n))
    form = "C" if (calculus, "C") in syntax.ZONES else "A"
    if form == "C" and n == 1:
        form = "A"
    return Judgement(calculus, form if n > 1 else "A", zs, term, expected)


# ---------------------------------------------------------------------------

def make_parser():
    p = argparse.ArgumentParser(
        prog="relmeta",
        description="toolchain for the relative monadic metalanguage family")
    p.add_argument("--json", action="store_true",
                   help="machine-readable output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-budget", type=int, default=10000)
    p.add_argument("--carrier-cap", type=int, default=10 ** 6)
    p.add_argument("--workers", type=int, default=1,
                   help="worker count (sweeps are deterministic; >1 runs"
                        " the same fixed enumeration order)")
    p.add_argument("--search-depth", type=int, default=6)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, with_model=False):
        sp.add_argument("--sig", help="signature file")
        sp.add_argument("--calculus")
        if with_model:
            sp.add_argument("--model", action="append",
                            help="model binding file (name=path)")

    sp = sub.add_parser("typecheck")
    common(sp)
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_typecheck)
    sp = sub.add_parser("normalize")
    common(sp)
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_normalize)
    sp = sub.add_parser("eval")
    common(sp, with_model=True)
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_eval)
    sp = sub.add_parser("eq")
    common(sp, with_model=True)
    sp.add_argument("--theory", help="signature/theory file")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_eq)
    sp = sub.add_parser("prove")
    common(sp)
    sp.add_argument("--theory")
    sp.add_argument("file")
    sp.add_argument("proof")
    sp.set_defaults(fn=cmd_prove)
    sp = sub.add_parser("translate")
    common(sp)
    sp.add_argument("--from", dest="src", required=True,
                    choices=("gmm", "arrow"))
    sp.add_argument("--to", dest="tgt", required=True,
                    choices=("lnl-rmm", "lnl", "armm"))
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_translate)
    sp = sub.add_parser("lawcheck")
    sp.add_argument("file")
    sp.add_argument("--laws", default="all", choices=LAW_SETS)
    sp.set_defaults(fn=cmd_lawcheck)
    sp = sub.add_parser("repl")
    common(sp, with_model=True)
    sp.set_defaults(fn=cmd_repl)
    return p


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0,) else 0
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    random.seed(args.seed)
    try:
        return args.fn(args)
    except (CliError, SignatureError, SyntaxError_, models.ModelError,
            equations.RewriteError, translate.TranslateError,
            lawcheck.LawError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
