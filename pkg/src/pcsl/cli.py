"""Command-line front door.

Subcommands: build (construct an algebra from an expression), check
(evaluate a sentence on an algebra), enumerate (produce a catalog), sweep
(classify a catalog and assert the global invariants), report (summarize a
classification file), chain (run the extension chain builders).

Exit codes: 0 success or property-true, 1 property-false or failed
verification or violated invariant, 2 usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import catalog as cat
from . import chains, closure, core
from .axioms import AXIOM_NAMES, SENTENCE_NAMES, axiom
from .core import CapError, ElementSet, FinPSL, InvalidAlgebraError
from .logic import ParseError, eval_sentence, parse, print_formula
from .morphisms import canonical_form

OK, FALSE, ERROR = 0, 1, 2


@dataclass
class RunConfig:
    fmt: str = "text"
    jobs: int = 1
    seed: int = 0
    cap: int = core.SIZE_CAP


def _config_from(args) -> RunConfig:
    def pick(flag, env, default, conv):
        if flag is not None:
            return flag
        raw = os.environ.get(env)
        return conv(raw) if raw is not None else default

    return RunConfig(
        fmt=pick(args.format, "PCSL_FORMAT", "text", str),
        jobs=pick(args.jobs, "PCSL_JOBS", 1, int),
        seed=pick(args.seed, "PCSL_SEED", 0, int),
        cap=pick(args.cap, "PCSL_CAP", core.SIZE_CAP, int),
    )


# --- algebra expressions -------------------------------------------------------


class ExprError(ValueError):
    pass


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def build_expression(expr: str, cap: int) -> FinPSL:
    """Grammar: B(t) | F(t) | 2 | 3 | hat(X) | quot(X, elem) | X * Y.

    Products are flattened so the result keeps one coordinate per named
    factor; quot elements are written as coordinate tuples like (0,1) or as
    integer indices.
    """
    expr = expr.strip()
    factors = [_build_atom(part.strip(), cap) for part in _split_top(expr, "*")]
    if len(factors) == 1:
        return factors[0]
    return core.product(factors, cap)


def _build_atom(expr: str, cap: int) -> FinPSL:
    if expr == "2":
        return core.boolean_algebra(1, cap)
    if expr == "3":
        return core.f_hat(1, cap)
    if expr.startswith("(") and expr.endswith(")"):
        return build_expression(expr[1:-1], cap)
    for name in ("hat", "quot", "B", "F"):
        if expr.startswith(name + "(") and expr.endswith(")"):
            inner = expr[len(name) + 1 : -1]
            if name == "B":
                return core.boolean_algebra(_int(inner), cap)
            if name == "F":
                return core.f_hat(_int(inner), cap)
            if name == "hat":
                return core.hat(build_expression(inner, cap), cap)
            left, right = _split_top(inner, ",")[0], ",".join(_split_top(inner, ",")[1:])
            base = build_expression(left, cap)
            elem = resolve_element(base, right.strip())
            q, _ = core.theta_quotient(base, elem)
            return q
    raise ExprError(f"cannot parse algebra expression {expr!r}")


def _int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ExprError(f"expected an integer, found {text!r}") from exc


def resolve_element(p: FinPSL, spec: str) -> int:
    """An element given as an index, a label, or a coordinate tuple."""
    spec = spec.strip()
    if spec.isdigit() and p.labels and spec not in p.labels:
        return int(spec)
    if p.labels and spec in p.labels:
        return p.labels.index(spec)
    if spec.startswith("(") and spec.endswith(")") and p.factors is not None:
        coords = [c.strip() for c in _split_top(spec[1:-1], ",")]
        if len(coords) != len(p.factors):
            raise ExprError(f"{spec!r} has wrong arity for this product")
        idx = [resolve_element(f, c) for f, c in zip(p.factors, coords)]
        return p.coding.tuple_to_index(tuple(idx))
    if spec.isdigit():
        return int(spec)
    raise ExprError(f"cannot resolve element {spec!r}")


def _load_algebra_arg(arg: str, cap: int) -> FinPSL:
    if os.path.exists(arg):
        return core.load_algebra(arg)
    return build_expression(arg, cap)


# --- subcommands ----------------------------------------------------------------


def cmd_build(args, cfg: RunConfig) -> int:
    p = build_expression(args.expr, cfg.cap)
    if args.out:
        core.save_algebra(p, args.out)
    stats = {
        "n": p.n,
        "skeletal": len(p.skeleton),
        "dense": len(p.dense),
        "central": len(p.central),
    }
    if cfg.fmt == "json":
        out = dict(p.to_json_dict())
        out["stats"] = stats
        print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    else:
        print(
            f"built algebra with {stats['n']} elements: "
            f"|Sk|={stats['skeletal']} |D|={stats['dense']} |C|={stats['central']}"
        )
    return OK


def _load_sentence(arg: str):
    if arg in SENTENCE_NAMES:
        return arg, axiom(arg)
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return os.path.basename(arg), parse(fh.read())
    return "inline", parse(arg)


def cmd_check(args, cfg: RunConfig) -> int:
    p = _load_algebra_arg(args.algebra, cfg.cap)
    name, sentence = _load_sentence(args.sentence)
    result = eval_sentence(p, sentence)
    names = {k: p.label(v) for k, v in result.assignment.items()}
    if cfg.fmt == "json":
        print(
            json.dumps(
                {
                    "sentence": name,
                    "value": result.value,
                    "witness": names if result.value else None,
                    "counterexample": None if result.value else names,
                },
                sort_keys=True,
                separators=(",", ":"),
            )
        )
    else:
        verdict = "true" if result.value else "false"
        extra = f" where {names}" if names else ""
        print(f"{name}: {verdict}{extra}")
    return OK if result.value else FALSE


def cmd_enumerate(args, cfg: RunConfig) -> int:
    entries = cat.enumerate_psl(args.n_max)
    cat.save_catalog(entries, args.out)
    counts = cat.counts_by_size(entries)
    if cfg.fmt == "json":
        print(json.dumps({"counts": counts, "total": len(entries)}, sort_keys=True))
    else:
        print(f"enumerated {len(entries)} algebras: " + ", ".join(f"n={k}: {v}" for k, v in sorted(counts.items())))
    return OK


def _classify_entry(entry):
    return closure.classify(entry.algebra)


def cmd_sweep(args, cfg: RunConfig) -> int:
    entries = cat.load_catalog(args.catalog)
    if args.axiom and args.axiom not in AXIOM_NAMES:
        print(f"unknown axiom {args.axiom}", file=sys.stderr)
        return ERROR
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            classes = list(pool.map(_classify_entry, entries))
    else:
        classes = [_classify_entry(e) for e in entries]
    for e, c in zip(entries, classes):
        e.classification = c

    lines = [
        closure.classification_json_line(e.algebra, e.canonical.hex(), e.classification)
        for e in entries
    ]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))

    axioms = [args.axiom] if args.axiom else list(AXIOM_NAMES)
    summary = {
        "entries": len(entries),
        "seed": cfg.seed,
        "true_counts": {
            name: sum(1 for e in entries if e.classification.axioms[name].value)
            for name in axioms
        },
        "boolean": sum(1 for e in entries if e.classification.is_boolean),
        "theorem1_finite": sum(1 for e in entries if e.classification.theorem1.holds),
    }

    violations = []
    if not args.axiom:
        for e in entries:
            c = e.classification
            ac_all = all(c.axioms[n].value for n in ("AC1", "AC2", "AC3", "AC4"))
            if not (ac_all == c.is_boolean == c.theorem1.holds):
                violations.append(f"AC/boolean mismatch at n={e.algebra.n} {e.canonical.hex()}")
            if e.algebra.n >= 2 and all(
                c.axioms[n].value for n in ("EC1", "EC3", "EC4")
            ):
                violations.append(f"finite EC model at n={e.algebra.n} {e.canonical.hex()}")

    transfer_failures = 0
    if args.pairs:
        records = closure.product_transfer_check(
            [e.algebra for e in entries], args.pairs, cfg.seed
        )
        transfer_failures = sum(1 for r in records if not r.ok)
        summary["transfer_pairs"] = args.pairs
        summary["transfer_failures"] = transfer_failures

    summary["invariant_violations"] = violations
    if cfg.fmt == "json":
        print(json.dumps(summary, sort_keys=True, separators=(",", ":")))
    else:
        print(f"classified {summary['entries']} algebras (seed {cfg.seed})")
        for name in axioms:
            print(f"  {name:>4}: {summary['true_counts'][name]} true")
        print(f"  boolean: {summary['boolean']}  theorem1_finite: {summary['theorem1_finite']}")
        for v in violations:
            print(f"  INVARIANT VIOLATED: {v}")
        if args.pairs:
            print(f"  product transfer: {args.pairs} pairs, {transfer_failures} failures")
    return FALSE if (violations or transfer_failures) else OK


def cmd_report(args, cfg: RunConfig) -> int:
    rows = []
    with open(args.classifications, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    summary = {
        "entries": len(rows),
        "true_counts": {
            name: sum(1 for r in rows if r["axioms"][name]["value"]) for name in AXIOM_NAMES
        },
        "boolean": sum(1 for r in rows if r["is_boolean"]),
        "theorem1_finite": sum(1 for r in rows if r["theorem1_finite"]),
    }
    if cfg.fmt == "json":
        print(json.dumps(summary, sort_keys=True, separators=(",", ":")))
    else:
        print(f"{summary['entries']} classified algebras")
        for name in AXIOM_NAMES:
            print(f"  {name:>4}: {summary['true_counts'][name]} true")
        print(f"  boolean: {summary['boolean']}  theorem1_finite: {summary['theorem1_finite']}")
    return OK


def resolve_subalgebra(t: FinPSL, spec: str) -> ElementSet:
    """--s specs: const | diag3 | eq7 | gen:(tuple),(tuple) | shape:EXPR."""
    if spec == "const":
        return core.sg(t, ())
    if spec == "diag3":
        if t.factors is None:
            raise ExprError("diag3 needs a coded product")
        coords = []
        for f in t.factors:
            if f.labels and "e" in f.labels:
                coords.append(f.labels.index("e"))
            else:
                raise ExprError("diag3 needs hatted factors with a proper dense element")
        return core.sg(t, [t.coding.tuple_to_index(tuple(coords))])
    if spec == "eq7":
        if t.factors is None or t.factors[0].n != 2:
            raise ExprError("eq7 needs a product with a leading two-element factor")
        fac_i = len(t.factors) - 1
        fac = t.factors[fac_i]
        a = min(fac.atoms)
        members = [
            x
            for x in range(t.n)
            if fac.le(a, t.coding.index_to_tuple(x)[fac_i])
            == (t.coding.index_to_tuple(x)[0] == 1)
        ]
        return ElementSet.of(t.n, members)
    if spec.startswith("gen:"):
        gens = [
            resolve_element(t, g.strip())
            for g in _split_top(spec[len("gen:") :], ",")
            if g.strip()
        ]
        return core.sg(t, gens)
    if spec.startswith("shape:"):
        from .morphisms import find_embedding_over

        shape = build_expression(spec[len("shape:") :], core.SIZE_CAP)
        emb = find_embedding_over(shape, t)
        if emb is None:
            raise ExprError("named shape does not embed into the ambient algebra")
        return ElementSet.of(t.n, emb.map)
    raise ExprError(f"cannot resolve subalgebra spec {spec!r}")


def cmd_chain(args, cfg: RunConfig) -> int:
    t = build_expression(args.expr, cfg.cap)
    if t.factors is None:
        t = core.product([t], cfg.cap)
    s = resolve_subalgebra(t, args.s)
    has_two = any(f.n == 2 for f in t.factors)
    try:
        report = chains.chain_ext2(t, s) if has_two else chains.chain_ext1(t, s)
    except chains.PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return ERROR

    case3 = None
    if args.case3:
        tshape = core.product(list(t.factors), cfg.cap)
        case3 = chains.case3_witness_and_iso(t, s, tshape)

    if cfg.fmt == "json":
        out = report.to_json_dict()
        out["case3"] = case3.to_json_dict(t) if case3 else None
        print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    else:
        amb = report.ambient
        if report.permutation:
            print(f"factors reordered by {report.permutation}")
        for st in report.steps:
            tick = "ok" if st.verified else "FAILED"
            added = " +" + ",".join(amb.label_all(st.added)) if st.added else ""
            print(f"  {st.name:>8}  |{len(st.carrier):>3}|  = {st.shape}  [{tick}]{added}")
        if case3 is not None:
            print(
                f"  witness b = {t.label(case3.b)}; piecewise map verified: "
                f"{all(case3.checks.values())}"
            )
        elif args.case3:
            print("  no two-element-coordinate witness exists")
        print("chain verified" if report.ok else "chain verification FAILED")
    return OK if report.ok else FALSE


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pcsl",
        description="workbench for finite pseudocomplemented semilattices",
    )
    parser.add_argument("--format", choices=["text", "json"], default=None)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--cap", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct an algebra from an expression")
    b.add_argument("expr")
    b.add_argument("--out", default=None)

    c = sub.add_parser("check", help="evaluate a sentence on an algebra")
    c.add_argument("algebra")
    c.add_argument("sentence")

    e = sub.add_parser("enumerate", help="write a catalog of small algebras")
    e.add_argument("--n-max", type=int, default=5)
    e.add_argument("--out", required=True)

    s = sub.add_parser("sweep", help="classify a catalog and assert invariants")
    s.add_argument("catalog")
    s.add_argument("--out", default=None)
    s.add_argument("--axiom", default=None)
    s.add_argument("--pairs", type=int, default=0)

    r = sub.add_parser("report", help="summarize a classification file")
    r.add_argument("classifications")

    ch = sub.add_parser("chain", help="run a verified extension chain")
    ch.add_argument("expr")
    ch.add_argument("--s", required=True, dest="s")
    ch.add_argument("--case3", action="store_true")

    args = parser.parse_args(argv)
    cfg = _config_from(args)
    try:
        handler = {
            "build": cmd_build,
            "check": cmd_check,
            "enumerate": cmd_enumerate,
            "sweep": cmd_sweep,
            "report": cmd_report,
            "chain": cmd_chain,
        }[args.command]
        return handler(args, cfg)
    except (ExprError, ParseError, InvalidAlgebraError, CapError, cat.CatalogFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
