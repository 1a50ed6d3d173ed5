"""Command-line front end; every subcommand prints one JSON report.

Exit status: 0 on success, 1 when ``axioms`` or ``search`` found a
violation, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__, corpus
from .axioms import (
    AXIOMS, DEFAULT_ARITY, BudgetExceeded, StructureFamilySpec, check_axiom,
    check_majority_filter_closure, search_counterexample,
)
from .cantor import (
    EPStream, approx_eq, capture_check, code_family, join, measure_of, project,
    schnorr_test_level, split, tailset_closure,
)
from .dlo import (
    DLOError, ParamConfig, classify_property_dlo, dichotomy,
    parse_order_formula, typical_elements_dlo,
)
from .engine import (
    DEFAULT_BUDGET, DEFAULT_POOL, classify_element, classify_property,
    find_witness, param_names, typical_set,
)
from .model import EvaluationError, StructureError, evaluate, extension, load_structure
from .symmetry import MAX_LISTED, definable_closure, orbit_partition, stabilizer_group
from .syntax import FormulaSyntaxError, parse_formula, render_formula

GRAMMAR = (
    'formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" or)* ; '
    'or := and ("|" and)* ; and := unary ("&" unary)* ; '
    'unary := "!" unary | quant | atom | "(" formula ")" ; '
    'quant := ("forall"|"exists"|"Qmost"|"Qinf") ident formula ; '
    'atom := ident "(" term ("," term)* ")" | term ("="|"!=") term'
)


class UsageError(Exception):
    pass


def _elements(text):
    if text is None or not text.strip():
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma separated elements, got {text!r}") from None


def _bindings(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected NAME=ELEMENT, got {item!r}")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"expected an integer element in {item!r}") from None
    return out


def _structure(ref):
    if os.path.exists(ref):
        with open(ref) as fh:
            return load_structure(fh.read(), name=os.path.basename(ref))
    stem = ref[:-len(".struct")] if ref.endswith(".struct") else ref
    if stem in corpus.STRUCTURES:
        return corpus.structure(stem)
    raise UsageError(f"no structure file or corpus structure named {ref!r}")


def _report(command, inputs, results, budgets=None, violations=None, certificates=None):
    return {
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "budgets": budgets or {},
        "results": results,
        "violations": violations or [],
        "certificates": certificates or [],
    }


def _formula(args, S, params):
    return parse_formula(args.formula, S.signature, params)


# --- subcommands -----------------------------------------------------------

def cmd_eval(args):
    S = _structure(args.structure)
    params = _bindings(args.param)
    env = {**params, **_bindings(args.assign)}
    phi = _formula(args, S, list(params))
    value = evaluate(S, phi, env)
    return _report("eval", {"structure": S.name, "formula": render_formula(phi),
                            "valuation": env}, {"value": value}), 0


def cmd_extension(args):
    S = _structure(args.structure)
    params = _bindings(args.param)
    env = {**params, **_bindings(args.assign)}
    phi = _formula(args, S, list(params))
    ext = extension(S, phi, args.var, env)
    cls = classify_property(S, phi, env, args.mode, args.var)
    return _report("extension", {"structure": S.name, "formula": render_formula(phi),
                                 "var": args.var, "valuation": env, "mode": args.mode},
                   {"extension": sorted(ext), "complement_size": cls.complement_size,
                    "verdict": cls.verdict}), 0


def cmd_orbits(args):
    S = _structure(args.structure)
    fixed = _elements(args.fixed)
    part = orbit_partition(S, fixed)
    results = {"orbits": part.as_lists(), "definable_closure": sorted(definable_closure(S, fixed))}
    if S.size <= MAX_LISTED:
        group = stabilizer_group(S, fixed)
        results["group_order"] = len(group)
        if args.list:
            results["automorphisms"] = [list(p) for p in group]
    return _report("orbits", {"structure": S.name, "fixed": list(fixed)}, results), 0


def _verdict_dict(v, budget=None, S=None):
    out = {"element": v.element, "verdict": v.verdict, "orbit": list(v.orbit),
           "certificate": v.certificate}
    if budget is not None and not v.typical:
        w = find_witness(S, v.element, v.params, budget)
        out["witness"] = render_formula(w) if w is not None else None
    return out


def cmd_typical(args):
    S = _structure(args.structure)
    fixed = _elements(args.fixed)
    budget = args.budget if args.witness else None
    verdicts = [_verdict_dict(classify_element(S, a, fixed), budget, S) for a in S.universe]
    budgets = {"budget": budget, "pool": list(DEFAULT_POOL)} if budget else {}
    return _report("typical", {"structure": S.name, "fixed": list(fixed),
                               "parameter_names": list(param_names(fixed))},
                   {"typical_set": sorted(typical_set(S, fixed)), "universe_size": S.size},
                   budgets=budgets, certificates=verdicts), 0


def cmd_witness(args):
    S = _structure(args.structure)
    fixed = _elements(args.fixed)
    if not 0 <= args.element < S.size:
        raise UsageError(f"element {args.element} out of range 0..{S.size - 1}")
    w = find_witness(S, args.element, fixed, args.budget)
    results = {"element": args.element, "witness": None, "extension": None,
               "typical": classify_element(S, args.element, fixed).typical}
    if w is not None:
        env = dict(zip(param_names(fixed), fixed))
        results["witness"] = render_formula(w)
        results["extension"] = sorted(extension(S, w, "x", env))
    return _report("witness", {"structure": S.name, "fixed": list(fixed),
                               "parameter_names": list(param_names(fixed))}, results,
                   budgets={"budget": args.budget, "pool": list(DEFAULT_POOL)}), 0


def _read_formula_file(path, S):
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            names, sep, text = line.partition("::")
            if not sep:
                names, text = "", line
            params = tuple(p.strip() for p in names.split(",") if p.strip())
            try:
                out.append((parse_formula(text, S.signature, params), params))
            except FormulaSyntaxError as e:
                raise UsageError(f"{path}:{lineno}: {e}") from None
    return out


def cmd_axioms(args):
    S = _structure(args.structure)
    axioms = [a.upper() for a in (args.axiom or AXIOMS)]
    formulas = _read_formula_file(args.formulas, S) if args.formulas else None
    reports = []
    for ax in axioms:
        reports.append(check_axiom(ax, S, args.arity, formulas, args.max_checks).to_dict())
    violations = [dict(v, axiom=r["axiom"]) for r in reports for v in r["violations"]]
    results = {r["axiom"]: {k: r[k] for k in ("verdict", "checked", "note")} for r in reports}
    report = _report("axioms", {"structure": S.name, "axioms": axioms},
                     results, budgets={"arity": args.arity, "max_checks": args.max_checks},
                     violations=violations)
    return report, 1 if violations else 0


def cmd_search(args):
    family = StructureFamilySpec.parse(args.family)
    res = search_counterexample(args.axiom, family, args.arity, args.jobs).to_dict()
    violations = [res["witness"]] if "witness" in res else []
    certificates = [] if violations else [{"exhaustive": True, "examined": res["examined"],
                                           "labeled": res["labeled"], "per_size": res["per_size"]}]
    results = {k: res[k] for k in ("axiom", "family", "verdict", "examined", "labeled")}
    report = _report("search", {"axiom": args.axiom.upper(), "family": family.render()},
                     results, budgets={"arity": args.arity},
                     violations=violations, certificates=certificates)
    return report, 1 if violations else 0


def cmd_filter_closure(args):
    S = _structure(args.structure)
    fixed = _elements(args.fixed)
    modes = ("raw", "definable") if args.mode == "both" else (args.mode,)
    r = check_majority_filter_closure(S, fixed, modes)
    return _report("filter-closure", {"structure": S.name, "fixed": list(fixed), "modes": list(modes)},
                   {"verdict": r.verdict, "pairs_checked": r.checked},
                   violations=r.violations), 0


def cmd_dlo(args):
    cfg = ParamConfig.parse(args.params or "")
    results = {}
    inputs = {"params": cfg.render()}
    if args.formula:
        phi = parse_order_formula(args.formula, cfg)
        inputs["formula"] = render_formula(phi)
        cls = classify_property_dlo(phi, cfg, args.mode)
        results["qf"] = cls.qf.render()
        results["verdict"] = cls.verdict
        results["extension"] = cls.extension.to_list()
        results["mode"] = args.mode
        if args.dichotomy:
            which, c = dichotomy(phi)
            results["dichotomy"] = {"typical": which, "extension": c.extension.to_list()}
    if args.typical_elements:
        results["typical_elements"] = typical_elements_dlo(cfg).to_list()
    if not results:
        raise UsageError("dlo needs --formula and/or --typical-elements")
    return _report("dlo", inputs, results), 0


def cmd_cantor(args):
    def stream(text, flag):
        if text is None:
            raise UsageError(f"--op {args.op} needs {flag}")
        return EPStream.parse(text)

    op = args.op
    inputs = {"op": op}
    if op == "join":
        a, b = stream(args.a, "--a"), stream(args.b, "--b")
        inputs.update(a=a.render(), b=b.render())
        results = {"join": join(a, b).render()}
    elif op == "split":
        x = stream(args.a, "--a")
        inputs["a"] = x.render()
        x0, x1 = split(x)
        results = {"even": x0.render(), "odd": x1.render()}
    elif op == "approx":
        a, b = stream(args.a, "--a"), stream(args.b, "--b")
        inputs.update(a=a.render(), b=b.render())
        results = {"approx_eq": approx_eq(a, b)}
    elif op == "tailset":
        x = stream(args.a, "--a")
        inputs.update(a=x.render(), bound=args.bound)
        results = {"closure": [s.render() for s in tailset_closure([x], args.bound)]}
    elif op == "code":
        if not args.sets:
            raise UsageError("--op code needs --sets")
        sets = [EPStream.parse(s).to_set() for s in args.sets.split(";")]
        inputs["sets"] = [sorted(s) for s in sets]
        results = {"code": sorted(code_family(sets))}
    elif op == "project":
        code = stream(args.a, "--a").to_set()
        inputs.update(code=sorted(code), index=args.index)
        results = {"projection": sorted(project(code, args.index))}
    else:  # capture
        x = stream(args.a, "--a")
        inputs.update(a=x.render(), depth=args.depth)
        results = {"captured": capture_check(x, args.depth), "join_with_empty": join(x, EPStream()).render()}
    return _report("cantor", inputs, results), 0


def cmd_schnorr(args):
    if args.level < 0:
        raise UsageError("--level must be a natural number")
    fam = schnorr_test_level(args.level)
    results = {"level": args.level, "count": len(fam), "word_length": 2 * args.level + 2}
    if args.measure:
        results["measure"] = str(measure_of(fam))
    if args.words:
        results["words"] = list(fam.words)
    if args.capture:
        x = EPStream.parse(args.capture)
        results["capture"] = {"stream": x.render(), "depth": args.depth,
                              "captured": capture_check(x, args.depth)}
    return _report("schnorr", {"level": args.level}, results), 0


# --- parser ----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="typicality", description="Typicality laboratory (JSON reports).")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="accepted for compatibility; reports are always JSON")
    common.add_argument("--no-timing", action="store_true", help="omit wall-clock timing from the report")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    def structure_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--structure", required=True, help="structure file or corpus name")
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, help_ in (("eval", cmd_eval, "truth of a formula"),
                            ("extension", cmd_extension, "extension of a property")):
        sp = structure_cmd(name, fn, help_)
        sp.add_argument("--formula", required=True)
        sp.add_argument("--param", action="append", metavar="NAME=ELEM")
        sp.add_argument("--assign", action="append", metavar="VAR=ELEM")
        if name == "extension":
            sp.add_argument("--var", default="x")
            sp.add_argument("--mode", choices=("majority", "frechet"), default="majority")

    sp = structure_cmd("orbits", cmd_orbits, "orbits of the pointwise stabilizer")
    sp.add_argument("--fixed", default="")
    sp.add_argument("--list", action="store_true", help="list the automorphisms")

    sp = structure_cmd("typical", cmd_typical, "typical elements with certificates")
    sp.add_argument("--fixed", default="")
    sp.add_argument("--witness", action="store_true", help="attach witness formulas")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = structure_cmd("witness", cmd_witness, "minority formula containing an element")
    sp.add_argument("--element", type=int, required=True)
    sp.add_argument("--fixed", default="")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = structure_cmd("axioms", cmd_axioms, "check axioms T1-T6")
    sp.add_argument("--axiom", action="append", choices=AXIOMS + tuple(a.lower() for a in AXIOMS))
    sp.add_argument("--arity", type=int, default=DEFAULT_ARITY)
    sp.add_argument("--formulas", help="T6 formula file: lines 'a1,a2 :: formula'")
    sp.add_argument("--max-checks", type=int, default=2_000_000)

    sp = sub.add_parser("search", help="counterexample search over a structure family")
    sp.add_argument("--axiom", required=True, choices=AXIOMS + tuple(a.lower() for a in AXIOMS))
    sp.add_argument("--family", required=True, help="e.g. graph:1-5, digraph:1-3, empty:2")
    sp.add_argument("--arity", type=int, default=DEFAULT_ARITY)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_search)

    sp = structure_cmd("filter-closure", cmd_filter_closure, "majority-filter intersection closure")
    sp.add_argument("--fixed", default="")
    sp.add_argument("--mode", choices=("raw", "definable", "both"), default="both")

    sp = sub.add_parser("dlo", help="dense linear order: elimination and typicality")
    sp.add_argument("--params", default="", help="declared order, e.g. a1<a2<a3")
    sp.add_argument("--formula")
    sp.add_argument("--mode", choices=("majority", "frechet"), default="majority")
    sp.add_argument("--typical-elements", action="store_true")
    sp.add_argument("--dichotomy", action="store_true")
    sp.set_defaults(fn=cmd_dlo)

    sp = sub.add_parser("cantor", help="Cantor-space constructions on eventually periodic streams")
    sp.add_argument("--op", required=True,
                    choices=("join", "split", "approx", "tailset", "code", "project", "capture"))
    sp.add_argument("--a", help="stream literal: '{0,3,4}' or 'pre=101,per=0'")
    sp.add_argument("--b")
    sp.add_argument("--sets", help="';'-separated finite sets for --op code")
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--bound", type=int, default=2)
    sp.add_argument("--depth", type=int, default=20)
    sp.set_defaults(fn=cmd_cantor)

    sp = sub.add_parser("schnorr", help="levels of the explicit Schnorr test")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--measure", action="store_true")
    sp.add_argument("--words", action="store_true")
    sp.add_argument("--capture", help="stream a; checks join(a, empty) against levels 0..depth")
    sp.add_argument("--depth", type=int, default=20)
    sp.set_defaults(fn=cmd_schnorr)
    return p


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.fn(args)
    except (UsageError, FormulaSyntaxError, StructureError, EvaluationError, DLOError,
            BudgetExceeded, ValueError) as e:
        print(f"typicality {args.command}: error: {e}", file=sys.stderr)
        if isinstance(e, FormulaSyntaxError):
            print(f"grammar: {GRAMMAR}", file=sys.stderr)
        return 2
    timing = {"seconds": None if args.no_timing else round(time.perf_counter() - start, 6)}
    if args.command == "search":
        timing["jobs"] = args.jobs
    report["timing"] = timing
    stdout.write(dumps(report) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
