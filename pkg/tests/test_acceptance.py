"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the terminal summary; ``python3 tests/test_acceptance.py``
runs just this file.
"""
import contextlib
import io
import itertools
import sys
import time

import numpy as np
import pytest

from topofam import cli
from topofam.corpus import counterexamples as cx
from topofam.corpus import small
from topofam.corpus.builders import build_finfilt, build_finset, build_fintop
from topofam.corpus.random_models import random_model, random_pseudofunctor
from topofam.corpus.registry import corpus_dir, subject_context
from topofam.families import check_collection_properties, epi_masks, strict_epi_collection, strict_epi_masks
from topofam.fibered import (
    OverContext,
    RouteDisagreement,
    double_diagram_check,
    is_fibration,
    strict_epi_equals_final_surjective,
)
from topofam.fincat import FinCat, FunctorMap, identity_functor, validate_category, validate_functor
from topofam.grothendieck import (
    PosetPseudofunctor,
    PreconditionError,
    check_topological_pseudofunctor,
    extract_pseudofunctor,
    isomorphic_over,
    left_adjoint_of_transition,
    pseudofunctor_isomorphism,
    round_trip_ok,
    total_category,
)
from topofam.modelfile import load_model
from topofam.topological import (
    bot_object,
    classify,
    is_topological,
    pretopological_routes,
    representability,
    theorem_battery,
    top_object,
    topological_routes,
)

RESULTS: dict[int, str] = {}
N_RANDOM = 200


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def corpus_models():
    return [(path.stem, load_model(path)) for path in sorted(corpus_dir().glob("*.model"))]


def corpus_subjects():
    return [(f"{stem}/{name}", subject_context(m, name))
            for stem, m in corpus_models() for name in list(m.functors) + list(m.pseudofunctors)]


@pytest.fixture(scope="module")
def models():
    subjects = corpus_subjects()
    return subjects + [(f"seed {s}", random_model(s)) for s in range(N_RANDOM)]


# -- criterion 1: validators ------------------------------------------------------------


def _cat(c: FinCat, **changes) -> FinCat:
    parts = {"objects": c.objects, "arrows": dict(c.arrows), "identities": dict(c.identities),
             "compose": dict(c.compose)}
    for key, fn in changes.items():
        parts[key] = fn(parts[key])
    return FinCat(parts["objects"], parts["arrows"], parts["identities"], parts["compose"], c.name + "'")


def _set(d: dict, key, value):
    out = dict(d)
    out[key] = value
    return out


def _drop(d: dict, key):
    return {k: v for k, v in d.items() if k != key}


def _non_associative_monoid() -> FinCat:
    """First identity-respecting table on ``{1, a, b}`` that is not associative."""
    elems = ("1", "a", "b")
    for prods in itertools.product(elems, repeat=4):
        comp = {("1", x): x for x in elems} | {(x, "1"): x for x in elems}
        comp.update(zip([("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")], prods))
        c = FinCat(("m",), {x: ("m", "m") for x in elems}, {"m": "1"}, comp, "M")
        if any(comp[(h, comp[(g, f)])] != comp[(comp[(h, g)], f)] for h in elems for g in elems for f in elems):
            return c
    raise AssertionError("unreachable")


def _triangle_with_extra() -> FinCat:
    """``r → s → t`` plus a second arrow ``k: r → t`` besides the composite."""
    arrows = {"1r": ("r", "r"), "1s": ("s", "s"), "1t": ("t", "t"),
              "a": ("r", "s"), "b": ("s", "t"), "ba": ("r", "t"), "k": ("r", "t")}
    ids = {"r": "1r", "s": "1s", "t": "1t"}
    comp = {("b", "a"): "ba"}
    for a, (s, t) in arrows.items():
        comp[(a, ids[s])] = a
        comp[(ids[t], a)] = a
    return FinCat(("r", "s", "t"), arrows, ids, comp, "Tri")


def mutations() -> list[tuple[str, str, object]]:
    """``(label, violation kind, broken category or functor)``: one axiom each."""
    par = small.parallel_pair()
    chain3 = small.chain(("r", "s", "t"), "Chain3")
    tri = _triangle_with_extra()
    out: list[tuple[str, str, object]] = [
        ("duplicate object", "duplicate object", _cat(par, objects=lambda o: o + ("a",))),
        ("dangling arrow", "arrow endpoint not an object", _cat(par, arrows=lambda a: _set(a, "h", ("a", "z")))),
        ("no identity", "missing identity", _cat(par, identities=lambda i: _drop(i, "b"))),
        ("identity off its object", "identity has wrong endpoints", _cat(par, identities=lambda i: _set(i, "a", "f"))),
        ("composite names unknown arrow", "composite refers to unknown arrow",
         _cat(par, compose=lambda c: _set(c, ("f", "ida"), "zz"))),
        ("composite on non-composable pair", "composite defined on non-composable pair",
         _cat(par, compose=lambda c: _set(c, ("f", "g"), "f"))),
        ("composite with wrong ends", "composite has wrong endpoints",
         _cat(chain3, compose=lambda c: _set(c, ("s<=t", "r<=s"), "r<=s"))),
        ("composite missing", "missing composite", _cat(chain3, compose=lambda c: _drop(c, ("s<=t", "r<=s")))),
        ("right unit", "identity law", _cat(par, compose=lambda c: _set(c, ("f", "ida"), "g"))),
        ("left unit", "identity law", _cat(par, compose=lambda c: _set(c, ("idb", "g"), "f"))),
        ("identity composes to a non-identity", "identity law",
         _cat(small.idempotent_monoid(), compose=lambda c: _set(c, ("1", "1"), "e"))),
        ("associativity", "associativity", _non_associative_monoid()),
    ]
    ident = identity_functor(chain3)
    into_tri = FunctorMap(chain3, tri, {"r": "r", "s": "s", "t": "t"},
                          {"r<=r": "1r", "s<=s": "1s", "t<=t": "1t", "r<=s": "a", "s<=t": "b", "r<=t": "ba"}, "v")

    def fmut(u: FunctorMap, obj=None, arr=None) -> FunctorMap:
        om, am = dict(u.obj_map), dict(u.arr_map)
        if obj:
            om = obj(om)
        if arr:
            am = arr(am)
        return FunctorMap(u.source, u.target, om, am, u.name + "'")

    out += [
        ("object unmapped", "object not mapped", fmut(ident, obj=lambda m: _drop(m, "t"))),
        ("object sent nowhere", "object image unknown", fmut(ident, obj=lambda m: _set(m, "t", "q"))),
        ("arrow unmapped", "arrow not mapped", fmut(ident, arr=lambda m: _drop(m, "r<=t"))),
        ("arrow sent nowhere", "arrow image unknown", fmut(ident, arr=lambda m: _set(m, "r<=t", "q"))),
        ("arrow ends ignored", "endpoints not respected", fmut(ident, arr=lambda m: _set(m, "r<=t", "r<=s"))),
        ("arrow sent to a later arrow", "endpoints not respected",
         fmut(into_tri, arr=lambda m: _set(m, "r<=s", "b"))),
        ("identity not preserved", "identity not preserved",
         fmut(identity_functor(small.idempotent_monoid()), arr=lambda m: _set(m, "1", "e"))),
        ("composite sent to the other parallel arrow", "composition not preserved",
         fmut(into_tri, arr=lambda m: _set(m, "r<=t", "k"))),
    ]
    return out


def test_criterion_01_validators():
    cases = mutations()
    subjects = []
    for _, m in corpus_models():
        subjects += [("category", c) for c in m.categories.values()]
        subjects += [("functor", u) for u in m.functors.values()]
        subjects += [("category", total_category(p).total) for p in m.pseudofunctors.values()]
    start = time.perf_counter()
    accepted = all((validate_category(x) if k == "category" else validate_functor(x)).ok for k, x in subjects)
    wrong = []
    for label, kind, broken in cases:
        report = validate_category(broken) if isinstance(broken, FinCat) else validate_functor(broken)
        kinds = {v.kind for v in report.violations}
        if report.ok or kinds != {kind}:
            wrong.append(f"{label}: {sorted(kinds)}")
    elapsed = time.perf_counter() - start
    distinct = len({label for label, _, _ in cases})
    ok = accepted and not wrong and len(cases) == distinct == 20 and elapsed < 1.0
    record(1, ok, f"{len(subjects)} corpus sections accepted={accepted}; "
                  f"{len(cases) - len(wrong)}/{len(cases)} mutants rejected for their axiom; {elapsed:.3f}s"
                  + (f"; {wrong}" if wrong else ""))


# -- criterion 2: FinSet strict epis ----------------------------------------------------


def test_criterion_02_finset_strict_epis():
    start = time.perf_counter()
    c = build_finset(2)
    same = all(np.array_equal(epi_masks(c, x), strict_epi_masks(c, x)) for x in c.objects)
    counts = {x: int(strict_epi_masks(c, x).sum()) for x in c.objects}
    props = check_collection_properties(strict_epi_collection(), c)
    elapsed = time.perf_counter() - start
    ok = same and props.exact and all(props.flags().values()) and elapsed < 30
    record(2, ok, f"epi == strict epi: {same} (counts {counts}); properties {props.flags()}; {elapsed:.2f}s")


# -- criterion 3: strict epi = final surjective ------------------------------------------


def test_criterion_03_strict_epi_is_final_surjective():
    start = time.perf_counter()
    parts = []
    ok = True
    for name, ctx in (("FinTop", build_fintop(2)), ("FinFilt", build_finfilt(2))):
        for orientation in ("sink", "source"):
            cmp = strict_epi_equals_final_surjective(ctx, orientation)
            ok &= cmp.hypothesis_holds and cmp.equal
            parts.append(f"{name} {orientation} {sum(cmp.strict.values())}={sum(cmp.final_surjective.values())}"
                         f" diff {len(cmp.difference)}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    record(3, ok, "; ".join(parts) + f"; {elapsed:.1f}s")


# -- criterion 4: double diagrams ---------------------------------------------------------


def test_criterion_04_double_diagrams():
    ctx = build_fintop(2)
    reports = [double_diagram_check(ctx, part) for part in ("cartesian", "initial")]
    ok = all(r.ok and r.diagrams > 0 for r in reports)
    record(4, ok, "; ".join(f"{r.part}: {r.diagrams} diagrams, {len(r.counterexamples)} counterexamples"
                            for r in reports))


# -- criteria 5-7: routes, faithfulness, self-duality -------------------------------------


def _routes_agree(ctx) -> bool:
    try:
        pre = pretopological_routes(ctx)
        top = topological_routes(ctx)
    except RouteDisagreement:
        return False
    top = {k: v for k, v in top.items() if k != "C_literal"}
    return len(set(pre.values())) == 1 and len(set(top.values())) == 1


def test_criterion_05_route_agreement(models):
    bad = [name for name, ctx in models if not _routes_agree(ctx)]
    record(5, not bad and len(models) - N_RANDOM > 0,
           f"{len(models) - N_RANDOM} corpus + {N_RANDOM} random subjects, {len(bad)} disagreements {bad[:3]}")


def test_criterion_06_pretopological_is_faithful(models):
    pretop = [(name, ctx) for name, ctx in models if classify(ctx).flags["pretopological"]]
    bad = [name for name, ctx in pretop if not ctx.faithful]
    record(6, not bad, f"{len(pretop)}/{len(models)} pretopological, {len(bad)} not faithful {bad[:3]}")


def test_criterion_07_self_duality(models):
    bad = [name for name, ctx in models if is_topological(ctx) != is_topological(ctx.op)]
    tops = sum(is_topological(ctx) for _, ctx in models)
    record(7, not bad, f"{tops}/{len(models)} topological, {len(bad)} differ from their opposite {bad[:3]}")


# -- criterion 8: lattice and adjoint criterion -------------------------------------------


def _no_adjoint_transition() -> PosetPseudofunctor:
    c2 = small.fiber_poset("chain2")
    ident = {"0": "0", "1": "1"}
    return PosetPseudofunctor(small.chain(("s", "t"), "I"), {"s": c2, "t": c2},
                              {"s<=s": ident, "t<=t": ident, "s<=t": {"0": "0", "1": "0"}}, "NoAdjoint")


def _sides(p: PosetPseudofunctor) -> tuple[bool, bool]:
    lhs = is_topological(total_category(p).context())
    rhs = all(p.fiber_poset[s].is_complete_lattice() for s in p.base.objects) and \
        all(left_adjoint_of_transition(p.pullback(phi)) is not None for phi in p.base.arrow_ids)
    return lhs, rhs


def test_criterion_08_topological_pseudofunctors():
    pfs = [random_pseudofunctor(seed) for seed in range(60)]
    pfs += [p for _, m in corpus_models() for p in m.pseudofunctors.values()]
    designed = [cx.antichain_fiber_pseudofunctor(), _no_adjoint_transition()]
    pfs += designed
    verdicts, bad = [], []
    for p in pfs:
        try:
            v = check_topological_pseudofunctor(p)
        except AssertionError as e:
            bad.append(str(e))
            continue
        if _sides(p) != (v, v):
            bad.append(p.name)
        verdicts.append(v)
    designed_false = all(_sides(p) == (False, False) for p in designed)
    ok = not bad and len(pfs) >= 50 and {True, False} <= set(verdicts) and designed_false
    record(8, ok, f"{len(pfs)} pseudofunctors, {sum(verdicts)} true / {len(verdicts) - sum(verdicts)} false, "
                  f"{len(bad)} side disagreements; designed failures false on both sides: {designed_false}")


# -- criterion 9: battery ------------------------------------------------------------------


def test_criterion_09_battery():
    parts, ok = [], True
    for name, ctx in (("FinTop", build_fintop(2)), ("FinFilt", build_finfilt(2))):
        report = theorem_battery(ctx)
        verdicts = [i.verdict for i in report.items]
        rep_ok, sizes = representability(ctx)
        points_ok = all(sizes[x] == int(x.split("[")[0]) for x in ctx.T.objects)
        ok &= verdicts == ["PASS"] * 8 and rep_ok and points_ok
        parts.append(f"{name} items {''.join(v[0] for v in verdicts)}, Hom(1_bot,-) sizes match points: {points_ok}")
    fintop, finfilt = build_fintop(2), build_finfilt(2)
    top_eq = top_object(fintop, "1") == bot_object(fintop, "1")
    filt_ne = top_object(finfilt, "1") != bot_object(finfilt, "1")
    ok &= top_eq and filt_ne
    parts.append(f"FinTop 1_top = 1_bot: {top_eq}; FinFilt 1_top != 1_bot: {filt_ne}")
    record(9, ok, "; ".join(parts))


# -- criterion 10: Grothendieck round trip --------------------------------------------------


def test_criterion_10_round_trip():
    pf_ok, fib_ok, total_fib, n_pf, n_fib = True, True, True, 0, 0
    for stem, m in corpus_models():
        for p in m.pseudofunctors.values():
            n_pf += 1
            ctx = total_category(p).context()
            total_fib &= is_fibration(ctx)
            q = extract_pseudofunctor(ctx, p.name)
            pf_ok &= round_trip_ok(p) and pseudofunctor_isomorphism(p, q) is not None
        for u in m.functors.values():
            ctx = OverContext(u)
            try:
                p = extract_pseudofunctor(ctx)
            except PreconditionError:
                continue
            n_fib += 1
            rebuilt = total_category(p).context()
            total_fib &= is_fibration(rebuilt)
            fib_ok &= isomorphic_over(rebuilt, ctx) is not None
    ok = pf_ok and fib_ok and total_fib and n_pf > 0 and n_fib > 0
    record(10, ok, f"{n_pf} pseudofunctors extract(build(p)) ~ p: {pf_ok}; "
                   f"{n_fib} faithful fibrations build(extract(u)) ~ u: {fib_ok}; total categories fibrations: {total_fib}")


# -- criterion 11: determinism --------------------------------------------------------------


def _run(argv: list[str]) -> tuple[int, bytes]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue().encode()


def test_criterion_11_determinism():
    runs = {
        "classify": ["classify", str(corpus_dir() / "fintop2.model"), "--routes"],
        "classify machine": ["classify", str(corpus_dir() / "pretop_not_top.model"), "--format", "machine"],
        "verify": ["verify", "--corpus", "--seeds", "10", "--seed", "7", "--verbose"],
    }
    same = {}
    for label, argv in runs.items():
        first, second = _run(argv), _run(argv)
        same[label] = first == second and len(first[1]) > 0
    record(11, all(same.values()), ", ".join(f"{k} identical: {v}" for k, v in same.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
