"""Command-line entry points.

Exit codes: 0 success, 1 a property or classification failed, 2 the
input could not be read, parsed or validated.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fibered as fb
from .corpus.random_models import random_model, random_pseudofunctor
from .corpus.registry import corpus_dir, subject_context, write_corpus
from .families import mediator, sink
from .fincat import InputError, validate_category, validate_functor
from .grothendieck import (
    PreconditionError,
    check_topological_pseudofunctor,
    extract_pseudofunctor,
    isomorphic_over,
    pseudofunctor_isomorphism,
    round_trip_ok,
    total_category,
    validate_pseudofunctor,
)
from .modelfile import ModelFile, ParseError, parse_model, print_model
from .topological import (
    FLAG_NAMES,
    bot_object,
    classify,
    is_finset_truncation,
    self_duality_check,
    theorem_battery,
    top_object,
)

OK, FAILED, BAD_INPUT = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int = BAD_INPUT):
        super().__init__(message)
        self.code = code


def _b(v: bool) -> str:
    return "true" if v else "false"


def _load(path: str) -> ModelFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}") from None
    try:
        return parse_model(text)
    except ParseError as e:
        raise CliError(f"{path}:{e.line}:{e.col}: {e.message}") from None
    except InputError as e:
        raise CliError(f"{path}: {e}") from None


def _validation_lines(model: ModelFile) -> list[str]:
    """One line per section, then one indented line per violation."""
    lines = []
    reports = [(f"category {c.name!r}", validate_category(c)) for c in model.categories.values()]
    for u in model.functors.values():
        r = validate_functor(u) if validate_category(u.source).ok and validate_category(u.target).ok else None
        reports.append((f"functor {u.name!r}", r))
    for p in model.pseudofunctors.values():
        r = validate_pseudofunctor(p) if validate_category(p.base).ok else None
        reports.append((f"pseudofunctor {p.name!r}", r))
    for label, r in reports:
        if r is None:
            lines.append(f"{label}: not checked (a category it uses is invalid)")
        elif r.ok:
            lines.append(f"{label}: valid")
        else:
            lines.append(f"{label}: {len(r.violations)} violation(s)")
            lines += [f"  {v}" for v in r.violations]
    return lines


def _is_valid(model: ModelFile) -> bool:
    return all(validate_category(c).ok for c in model.categories.values()) and \
        all(validate_functor(u).ok for u in model.functors.values()) and \
        all(validate_pseudofunctor(p).ok for p in model.pseudofunctors.values())


def _require_valid(model: ModelFile, path: str):
    if not _is_valid(model):
        raise CliError(f"{path}: model does not validate; run validate for details")


def _subject(model: ModelFile, name: str | None, path: str):
    names = list(model.functors) + list(model.pseudofunctors)
    if name is None:
        if not names:
            raise CliError(f"{path}: no functor or pseudofunctor section")
        name = names[0]
    if name not in names:
        raise CliError(f"{path}: no functor or pseudofunctor named {name!r}")
    return name, subject_context(model, name)


# -- validate ------------------------------------------------------------------------


def cmd_validate(args) -> int:
    model = _load(args.path)
    for line in _validation_lines(model):
        print(line)
    return OK if _is_valid(model) else FAILED


# -- classify ------------------------------------------------------------------------


def summary(flags: dict[str, bool], routes: dict[str, dict[str, bool]]) -> str:
    if flags["topological"]:
        top = routes["topological"]
        if all(top[k] for k in "ABCD"):
            return "topological (routes A=B=C=D=true)"
        return "topological"
    if flags["pretopological"]:
        return "pretopological, not " + ("topological" if flags["fibration"] else "fibration")
    if flags["fibration"]:
        return "fibration, not pretopological"
    if flags["prefibration"]:
        return "prefibration, not fibration"
    return ("faithful" if flags["faithful"] else "not faithful") + ", not a prefibration"


def classification_report(name: str, c, show_routes: bool, fmt: str, bound: int | None) -> list[str]:
    mode = "EXACT" if c.exact else (f"BOUNDED (families up to size {bound})" if bound is not None
                                     else f"BOUNDED (non-faithful: repeated members up to {fb.NONFAITHFUL_BOUND})")
    text = summary(c.flags, c.routes)
    if fmt == "machine":
        lines = [f"subject={name}", f"mode={'EXACT' if c.exact else 'BOUNDED'}", f"summary={text}"]
        lines += [f"flag.{k}={_b(c.flags[k])}" for k in FLAG_NAMES]
        if show_routes:
            for group, routes in c.routes.items():
                lines += [f"route.{group}.{k}={_b(v)}" for k, v in routes.items()]
        lines += [f"witness.{k.replace(' ', '_')}={v}" for k, v in sorted(c.witnesses.items())]
        return lines
    lines = [f"== {mode} ==", f"{name}: {text}"]
    lines += [f"  {k}: {_b(c.flags[k])}" for k in FLAG_NAMES]
    if show_routes:
        for group, routes in c.routes.items():
            lines.append(f"  routes {group}: " + " ".join(f"{k}={_b(v)}" for k, v in routes.items()))
    lines += [f"  {k}: {v}" for k, v in sorted(c.witnesses.items())]
    return lines


def cmd_classify(args) -> int:
    model = _load(args.path)
    _require_valid(model, args.path)
    name, ctx = _subject(model, args.functor, args.path)
    try:
        c = classify(ctx, args.bound)
    except fb.RouteDisagreement as e:
        print(f"route agreement FAILED: {e}")
        return FAILED
    for line in classification_report(name, c, args.routes, args.format, args.bound):
        print(line)
    expected = model.expectations.get(name)
    if expected is not None:
        wrong = [k for k in FLAG_NAMES if k in expected and expected[k] != c.flags[k]]
        if wrong:
            print(f"expectation mismatch on {name}: " + ", ".join(
                f"{k} expected {_b(expected[k])}" for k in wrong))
            return FAILED
    return OK


# -- witness -------------------------------------------------------------------------


def _parse_pairs(items: list[str]) -> list[tuple[str, str]]:
    out = []
    for item in items:
        phi, sep, x = item.rpartition(":")
        if not sep:
            raise CliError(f"expected PHI:X, got {item!r}")
        out.append((phi, x))
    return out


def cmd_witness(args) -> int:
    model = _load(args.path)
    _require_valid(model, args.path)
    name, ctx = _subject(model, args.functor, args.path)
    q = args.query
    if q in ("top", "bot"):
        s = args.args[0] if args.args else None
        if s not in ctx.S.objects:
            raise CliError(f"{q} needs a base object, got {s!r}")
        x = (top_object if q == "top" else bot_object)(ctx, s)
        if x is None:
            print("no witness")
            return FAILED
        fibre = ctx.over(s)
        print(f"{q} over {s}: {x}")
        side = "into" if q == "top" else "out of"
        print(f"  verified: exactly one fibre arrow {side} {x} for each of {len(fibre)} objects over {s}")
        return OK
    if q in ("cartesian-family", "initial-family"):
        if len(args.args) < 1:
            raise CliError(f"{q} needs a base object and PHI:X pairs")
        s, pairs = args.args[0], _parse_pairs(args.args[1:])
        if s not in ctx.S.objects:
            raise CliError(f"unknown base object {s!r}")
        for phi, x in pairs:
            if phi not in ctx.S.arrows or x not in ctx.T.objects:
                raise CliError(f"unknown arrow or object in {phi}:{x}")
            if ctx.S.arrows[phi] != (s, ctx.u.ob(x)):
                raise CliError(f"{phi} does not run from {s} to u({x})")
        kind = q.split("-")[0]
        try:
            creation = fb.creates_families(ctx, kind, "all", args.bound)
            f = creation.witness(s, pairs)
        except InputError as e:
            raise CliError(str(e)) from None
        if f is None:
            print("no witness")
            return FAILED
        check = fb.is_u_cartesian if kind == "cartesian" else fb.is_u_initial
        print(f"{kind} family over {s}: apex {f.anchor}")
        for a in f.members:
            print(f"  {a}: {f.anchor} -> {ctx.T.tgt(a)} over {ctx.u.ar(a)}")
        print(f"  verified: u-{kind} = {_b(check(ctx, f))}")
        return OK if check(ctx, f) else FAILED
    if q == "mediator":
        if args.args.count("to") != 1:
            raise CliError("mediator needs two sink families: F1 F2 ... to G1 G2 ...")
        cut = args.args.index("to")
        try:
            f = _sink_family(ctx, args.args[:cut])
            g = _sink_family(ctx, args.args[cut + 1:])
            h = mediator(f, g)
        except InputError as e:
            raise CliError(str(e)) from None
        if h is None:
            print("no witness")
            return FAILED
        print(f"mediator: {h}: {f.anchor} -> {g.anchor}")
        for a, b in zip(f.members, g.members):
            print(f"  {h} . {a} = {ctx.T.comp(h, a)} (wanted {b})")
        return OK
    raise CliError(f"unknown query {q!r}")


def _sink_family(ctx, members: list[str]):
    if not members:
        raise InputError("empty family needs an anchor; give at least one arrow")
    for a in members:
        if a not in ctx.T.arrows:
            raise InputError(f"unknown arrow {a!r}")
    return sink(ctx.T, ctx.T.tgt(members[0]), members)


# -- verify --------------------------------------------------------------------------


class Checks:
    def __init__(self):
        self.lines: list[str] = []
        self.failures = 0
        self.count = 0

    def record(self, entry: str, anchor: str, ok: bool, detail: str = ""):
        self.count += 1
        if not ok:
            self.failures += 1
        tail = f": {detail}" if detail else ""
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {entry} [{anchor}]{tail}")

    def guarded(self, entry: str, anchor: str, fn):
        try:
            ok, detail = fn()
        except AssertionError as e:
            ok, detail = False, str(e)
        self.record(entry, anchor, ok, detail)
        return ok


def _verify_subject(checks: Checks, entry: str, ctx, expected: dict[str, bool] | None):
    state = {}

    def do_classify():
        state["c"] = classify(ctx)
        return True, ""

    if not checks.guarded(entry, "route agreement", do_classify):
        return
    c = state["c"]
    if expected is not None:
        wrong = [k for k in FLAG_NAMES if k in expected and expected[k] != c.flags[k]]
        checks.record(entry, "expected flags", not wrong,
                      ", ".join(f"{k} is {_b(c.flags[k])}" for k in wrong))
    checks.guarded(entry, "self-duality", lambda: (self_duality_check(ctx), "topological differs from its opposite"))
    checks.record(entry, "pretopological implies faithful", not c.flags["pretopological"] or c.flags["faithful"])
    if ctx.faithful:
        for orientation in ("sink", "source"):
            cmp = fb.strict_epi_equals_final_surjective(ctx, orientation)
            if cmp.hypothesis_holds:
                witness = ""
                if cmp.difference:
                    x, members = cmp.difference[0]
                    witness = f"{len(cmp.difference)} families differ, first at {x}: {{{', '.join(members)}}}"
                checks.record(entry, f"sE=FS {orientation}", cmp.equal, witness)
    if c.flags["topological"] and is_finset_truncation(ctx.S):
        report = theorem_battery(ctx)
        for item in report.items:
            checks.record(entry, f"battery item {item.number}", item.verdict != "FAIL",
                          item.detail if item.verdict != "PASS" else "")


def _verify_model(checks: Checks, entry: str, model: ModelFile):
    checks.record(entry, "validation", _is_valid(model))
    if not _is_valid(model):
        return
    for name, p in model.pseudofunctors.items():
        checks.guarded(f"{entry}/{name}", "lattice and adjoint criterion",
                       lambda p=p: (check_topological_pseudofunctor(p) in (True, False), ""))
        checks.record(f"{entry}/{name}", "round trip", round_trip_ok(p))
    for name in list(model.functors) + list(model.pseudofunctors):
        _verify_subject(checks, f"{entry}/{name}", subject_context(model, name), model.expectations.get(name))


def cmd_verify(args) -> int:
    checks = Checks()
    paths: list[Path] = []
    if args.corpus:
        paths = sorted(corpus_dir().glob("*.model"))
        if not paths:
            raise CliError(f"no model files in {corpus_dir()}")
    if args.path:
        paths.append(Path(args.path))
    for path in paths:
        _verify_model(checks, path.stem, _load(str(path)))
    for seed in range(args.seed, args.seed + args.seeds):
        _verify_subject(checks, f"seed {seed}", random_model(seed), None)
        p = random_pseudofunctor(seed)
        checks.guarded(f"seed {seed}/pseudofunctor", "lattice and adjoint criterion",
                       lambda p=p: (check_topological_pseudofunctor(p) in (True, False), ""))
    if not paths and not args.seeds:
        raise CliError("nothing to verify: give a path, --corpus or --seeds")
    for line in checks.lines:
        if args.verbose or line.startswith("FAIL"):
            print(line)
    print(f"verify: {checks.count} checks, {checks.failures} failures")
    return OK if checks.failures == 0 else FAILED


# -- groth ---------------------------------------------------------------------------


def cmd_groth(args) -> int:
    model = _load(args.path)
    _require_valid(model, args.path)
    out = ModelFile()
    if args.action == "build":
        if not model.pseudofunctors:
            raise CliError(f"{args.path}: no pseudofunctor section")
        name = args.name or next(iter(model.pseudofunctors))
        if name not in model.pseudofunctors:
            raise CliError(f"{args.path}: no pseudofunctor named {name!r}")
        p = model.pseudofunctors[name]
        tc = total_category(p)
        if not (validate_category(tc.total).ok and validate_functor(tc.projection).ok):
            print("built total category does not validate")
            return FAILED
        if not round_trip_ok(p):
            print("round trip failed")
            return FAILED
        out.add_functor(tc.projection)
    else:
        if not model.functors:
            raise CliError(f"{args.path}: no functor section")
        name = args.name or next(iter(model.functors))
        if name not in model.functors:
            raise CliError(f"{args.path}: no functor named {name!r}")
        ctx = fb.OverContext(model.functors[name])
        try:
            p = extract_pseudofunctor(ctx, name)
        except PreconditionError as e:
            raise CliError(f"{args.path}: {e}") from None
        if not validate_pseudofunctor(p).ok:
            print("extracted pseudofunctor does not validate")
            return FAILED
        rebuilt = total_category(p)
        if isomorphic_over(rebuilt.context(), ctx) is None or \
                pseudofunctor_isomorphism(extract_pseudofunctor(rebuilt.context(), name), p) is None:
            print("round trip failed")
            return FAILED
        out.add_pseudofunctor(p)
    sys.stdout.write(print_model(out))
    return OK


# -- gen -----------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.seed is not None:
        ctx = random_model(args.seed, args.budget)
        m = ModelFile()
        m.add_functor(ctx.u)
        sys.stdout.write(print_model(m))
        return OK
    target = Path(args.out) if args.out else corpus_dir()
    for path in write_corpus(target):
        print(path.name)
    return OK


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topofam", description="Finite fibred and topological functors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every section of a model file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="classify a functor")
    p.add_argument("path")
    p.add_argument("--functor", help="functor or pseudofunctor name (default: the first)")
    p.add_argument("--bound", type=int, help="only check families up to this size")
    p.add_argument("--routes", action="store_true", help="print every route verdict")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("witness", help="print a created family, top/bottom object or mediator")
    p.add_argument("path")
    p.add_argument("query", choices=("top", "bot", "cartesian-family", "initial-family", "mediator"))
    p.add_argument("args", nargs="*", help="base object and PHI:X pairs, or F1 F2 ... to G1 G2 ... for mediator")
    p.add_argument("--functor")
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", help="run every property check")
    p.add_argument("path", nargs="?")
    p.add_argument("--corpus", action="store_true", help="check every model in the corpus directory")
    p.add_argument("--seeds", type=int, default=0, help="number of random models")
    p.add_argument("--seed", type=int, default=0, help="first random seed")
    p.add_argument("--verbose", "-v", action="store_true", help="print passing checks too")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("groth", help="Grothendieck construction and its inverse")
    p.add_argument("action", choices=("build", "extract"))
    p.add_argument("path")
    p.add_argument("--name")
    p.set_defaults(func=cmd_groth)

    p = sub.add_parser("gen", help="write the corpus, or print a random model")
    p.add_argument("--out", help="output directory (default: the corpus directory)")
    p.add_argument("--seed", type=int, help="print the random model for this seed instead")
    p.add_argument("--budget", type=int, default=8)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
