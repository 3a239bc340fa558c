"""Pretopological and topological functors.

Each notion is decided along several independent characterisations and
the verdicts are compared; a disagreement raises
:class:`~topofam.fibered.RouteDisagreement`.

Topological routes:

* A: creates cartesian families, and cartesian families compose.
* B: creates initial families.
* C: fibration, creates initial families over strict monomorphic
  families, and every fibre has a top ``S_⊤``.  The last clause is needed
  for the empty family when the base lacks a terminal object; without
  it (``C_literal``) the route can hold while B fails.
* D: fibration whose fibres are complete lattices with stable products.
* E: faithful M-functor with a ``⊤`` section right adjoint.
* F: faithful E-functor with a ``⊥`` section left adjoint.
"""
from __future__ import annotations

from dataclasses import dataclass, field


from . import fibered as fb
from .families import epi_masks, strict_epi_masks
from .fibered import OverContext, RouteDisagreement
from .fincat import (
    Cocone,
    FinCat,
    FunctorMap,
    ValidationReport,
    Violation,
    colimit_cocones,
    default_shapes,
    diagrams,
    is_colimit_cocone,
    is_faithful,
    is_full,
    validate_functor,
    verify_adjunction,
)

# -- pretopological ------------------------------------------------------------------


def pretopological_routes(ctx: OverContext, bound: int | None = None) -> dict[str, bool]:
    def compute():
        pre = fb.is_prefibration(ctx)
        routes = {
            "A": fb.creates_families(ctx, "cartesian", "all", bound).holds,
            "B": pre and fb.fibers_have_all_products(ctx, bound)[0],
        }
        if ctx.faithful:
            routes["B_lattice"] = pre and fb.fibers_are_complete_lattices(ctx)
        if len(set(routes.values())) != 1:
            raise RouteDisagreement(f"pretopological routes disagree on {ctx}: {routes}")
        return routes
    return ctx.memo(("pretop-routes", bound), compute)


def is_pretopological(ctx: OverContext, bound: int | None = None) -> bool:
    return pretopological_routes(ctx, bound)["A"]


# -- top and bottom objects --------------------------------------------------------


def _least(xs) -> str | None:
    xs = sorted(xs)
    return xs[0] if xs else None


def top_object(ctx: OverContext, s: str) -> str | None:
    """``S_⊤``: apex of an initial family over the empty family at ``s``."""
    found = _least(x for x in ctx.over(s) if fb.initial_masks(ctx, x)[0])
    if found is not None:
        assert all(len(ctx.fiber_hom(y, found)) == 1 for y in ctx.over(s)), "S_top is not terminal in its fibre"
    return found


def bot_object(ctx: OverContext, s: str) -> str | None:
    """``S_⊥``: apex of a final family over the empty family at ``s``."""
    found = _least(x for x in ctx.over(s) if fb.final_masks(ctx, x)[0])
    if found is not None:
        assert all(len(ctx.fiber_hom(found, y)) == 1 for y in ctx.over(s)), "S_bot is not initial in its fibre"
    return found


def bot_via_initial_family(ctx: OverContext, s: str) -> str | None:
    """Apex of an initial family over every arrow out of ``s`` (faithful ``u``),
    an independent construction of ``S_⊥``."""
    if not ctx.faithful:
        return None
    pairs = fb._base_pairs(ctx, s)
    if len(pairs) > fb.mk.MAX_BITS:
        return None
    creation = fb.creates_families(ctx, "initial", "all")
    w = creation.witness(s, pairs)
    return None if w is None else w.anchor


def _section(ctx: OverContext, assignment: dict[str, str], name: str) -> FunctorMap | None:
    arr = {}
    for phi in ctx.S.arrow_ids:
        s, t = ctx.S.arrows[phi]
        lifts = ctx.lifts(assignment[s], assignment[t], phi)
        if len(lifts) != 1:
            return None
        arr[phi] = lifts[0]
    return FunctorMap(ctx.S, ctx.T, dict(assignment), arr, name)


@dataclass
class AdjointPair:
    top_assignment: dict[str, str] | None
    bot_assignment: dict[str, str] | None
    top_report: ValidationReport = field(default_factory=ValidationReport)
    bot_report: ValidationReport = field(default_factory=ValidationReport)

    @property
    def top_ok(self) -> bool:
        return self.top_assignment is not None and self.top_report.ok

    @property
    def bot_ok(self) -> bool:
        return self.bot_assignment is not None and self.bot_report.ok

    @property
    def partial(self) -> bool:
        return self.top_assignment is None or self.bot_assignment is None


def _verify_section(ctx: OverContext, r: FunctorMap | None, side: str) -> ValidationReport:
    if r is None:
        return ValidationReport((Violation("section not functorial", (side,)),))
    out = list(validate_functor(r).violations)
    if out:
        return ValidationReport(tuple(out))
    u, T, S = ctx.u, ctx.T, ctx.S
    if any(u.ob(r.ob(s)) != s for s in S.objects) or any(u.ar(r.ar(a)) != a for a in S.arrow_ids):
        out.append(Violation("u after section is not the identity", (side,)))
    if not (is_full(r) and is_faithful(r)):
        out.append(Violation("section not full and faithful", (side,)))
    if side == "top":
        # u ⊣ R: unit X → R(uX) over the identity, counit the identity
        unit = {}
        for x in T.objects:
            hs = ctx.fiber_hom(x, r.ob(u.ob(x)))
            if len(hs) != 1:
                return ValidationReport(tuple(out) + (Violation("no unit component", (x,)),))
            unit[x] = hs[0]
        counit = {s: S.id(s) for s in S.objects}
        out.extend(verify_adjunction(u, r, unit, counit).violations)
    else:
        # L ⊣ u: unit the identity, counit L(uX) → X over the identity
        counit = {}
        for x in T.objects:
            hs = ctx.fiber_hom(r.ob(u.ob(x)), x)
            if len(hs) != 1:
                return ValidationReport(tuple(out) + (Violation("no counit component", (x,)),))
            counit[x] = hs[0]
        unit = {s: S.id(s) for s in S.objects}
        out.extend(verify_adjunction(r, u, unit, counit).violations)
    return ValidationReport(tuple(out))


def adjoint_witness(ctx: OverContext) -> AdjointPair:
    def compute():
        tops = {s: top_object(ctx, s) for s in ctx.S.objects}
        bots = {s: bot_object(ctx, s) for s in ctx.S.objects}
        top = tops if all(v is not None for v in tops.values()) else None
        bot = bots if all(v is not None for v in bots.values()) else None
        pair = AdjointPair(top, bot)
        if top is not None:
            pair.top_report = _verify_section(ctx, _section(ctx, top, "top"), "top")
        if bot is not None:
            pair.bot_report = _verify_section(ctx, _section(ctx, bot, "bot"), "bot")
        return pair
    return ctx.memo("adjoints", compute)


# -- topological ---------------------------------------------------------------------


def topological_routes(ctx: OverContext, bound: int | None = None) -> dict[str, bool]:
    def compute():
        fibration = fb.is_fibration(ctx)
        pretop = is_pretopological(ctx, bound)
        adj = adjoint_witness(ctx)
        tops = all(top_object(ctx, s) is not None for s in ctx.S.objects)
        c_literal = fibration and fb.creates_families(ctx, "initial", "strict-mono", bound).holds
        routes = {
            "A": pretop and fb.cartesian_families_compose(ctx, bound),
            "B": fb.creates_families(ctx, "initial", "all", bound).holds,
            "C": c_literal and tops,
            "D": fibration and fb.fibers_are_complete_lattices(ctx) and fb.products_stable(ctx, bound),
            "E": ctx.faithful and fb.is_M_functor(ctx, bound) and adj.top_ok,
            "F": ctx.faithful and fb.is_E_functor(ctx, bound) and adj.bot_ok,
        }
        if len(set(routes.values())) != 1:
            raise RouteDisagreement(f"topological routes disagree on {ctx}: {routes}")
        routes["C_literal"] = c_literal
        return routes
    return ctx.memo(("top-routes", bound), compute)


def is_topological(ctx: OverContext, bound: int | None = None) -> bool:
    return topological_routes(ctx, bound)["A"]


def self_duality_check(ctx: OverContext, bound: int | None = None) -> bool:
    return is_topological(ctx, bound) == is_topological(ctx.op, bound)


# -- classification ------------------------------------------------------------------

FLAG_NAMES = ("faithful", "prefibration", "fibration", "pretopological", "topological", "E_functor", "M_functor")


@dataclass
class Classification:
    flags: dict[str, bool]
    routes: dict[str, dict[str, bool]]
    exact: bool
    witnesses: dict[str, str] = field(default_factory=dict)


def classify(ctx: OverContext, bound: int | None = None) -> Classification:
    fv = fb.fibration_verdict(ctx)
    pre_routes = pretopological_routes(ctx, bound)
    top_routes = topological_routes(ctx, bound)
    flags = {
        "faithful": ctx.faithful,
        "prefibration": fv.prefibration,
        "fibration": fv.fibration,
        "pretopological": pre_routes["A"],
        "topological": top_routes["A"],
        "E_functor": fb.is_E_functor(ctx, bound),
        "M_functor": fb.is_M_functor(ctx, bound),
    }
    implications = [
        ("topological", "pretopological"), ("pretopological", "prefibration"),
        ("topological", "fibration"), ("fibration", "prefibration"), ("pretopological", "faithful"),
    ]
    for a, b in implications:
        if flags[a] and not flags[b]:
            raise AssertionError(f"{a} without {b} on {ctx}")
    exact = ctx.faithful and bound is None
    witnesses = {}
    creation = fb.creates_families(ctx, "cartesian", "all", bound)
    if not creation.holds and creation.failure is not None:
        witnesses["uncreated cartesian family"] = _describe_failure(creation.failure)
    fibration_failure = fb.creates_families(ctx, "initial", "arrows").failure
    if fibration_failure is not None:
        witnesses["uncreated initial arrow"] = _describe_failure(fibration_failure)
    if flags["pretopological"] and not flags["topological"]:
        pair = fb.cartesian_composition_failure(ctx, bound)
        if pair is not None:
            f, family = pair
            witnesses["non-composing cartesian pair"] = f"{f} then [{', '.join(family)}]"
    return Classification(flags, {"fibration": {"a": fv.route_a, "b": fv.route_b},
                                  "pretopological": pre_routes, "topological": top_routes}, exact, witnesses)


def _describe_failure(failure) -> str:
    s, data = failure
    body = ", ".join(f"{phi} at {x}" for phi, x in data)
    return f"over {s}: [{body}]"


# -- theorem battery -----------------------------------------------------------------


@dataclass
class BatteryItem:
    number: int
    verdict: str  # PASS, FAIL, SKIPPED
    detail: str = ""


@dataclass
class BatteryReport:
    items: list[BatteryItem]

    @property
    def ok(self) -> bool:
        return all(i.verdict != "FAIL" for i in self.items)

    def verdict(self, n: int) -> str:
        return self.items[n - 1].verdict


def _item(n, ok, detail=""):
    return BatteryItem(n, "PASS" if ok else "FAIL", detail)


def _item3(ctx: OverContext) -> BatteryItem:
    from .grothendieck import extract_pseudofunctor, left_adjoint_of_transition

    if not (fb.is_fibration(ctx) and fb.is_fibration(ctx.op) and fb.fibers_are_complete_lattices(ctx)):
        return _item(3, False, "not a fibration and cofibration with lattice fibres")
    p = extract_pseudofunctor(ctx)
    cocart = fb.cartesian_arrows(ctx.op)
    for phi in ctx.S.arrow_ids:
        s, t = ctx.S.arrows[phi]
        g = left_adjoint_of_transition(p.pullback(phi))
        if g is None:
            return _item(3, False, f"no left adjoint for the transition of {phi}")
        for x in ctx.over(s):
            ys = [y for y in ctx.over(t) for a in ctx.lifts(x, y, phi) if a in cocart]
            if ys != [g(x)]:
                return _item(3, False, f"left adjoint of {phi} at {x} differs from the cocartesian lift")
    return _item(3, True, "transitions have left adjoints given by cocartesian lifts")


def _creates_colimits(ctx: OverContext, max_nodes: int) -> tuple[bool, str]:
    """Preservation and creation of colimits of diagrams with small shapes."""
    T, S, u = ctx.T, ctx.S, ctx.u
    for shape in default_shapes(max_nodes):
        for d in diagrams(shape, T):
            ud = FunctorMap(shape, S, {j: u.ob(d.ob(j)) for j in shape.objects},
                            {a: u.ar(d.ar(a)) for a in shape.arrow_ids}, "uD")
            for k in colimit_cocones(T, d):
                image = Cocone(u.ob(k.apex), {j: u.ar(a) for j, a in k.legs.items()})
                if not is_colimit_cocone(S, ud, image):
                    return False, f"colimit over {shape.name} not preserved"
            for k in colimit_cocones(S, ud):
                if not _lifted_colimit(ctx, d, k):
                    return False, f"colimit over {shape.name} with apex {k.apex} not created"
    return True, ""


def _lifted_colimit(ctx: OverContext, d: FunctorMap, k: Cocone) -> bool:
    import itertools
    nodes = d.source.objects
    for x in ctx.over(k.apex):
        choices = [ctx.lifts(d.ob(j), x, k.legs[j]) for j in nodes]
        for legs in itertools.product(*choices):
            if is_colimit_cocone(ctx.T, d, Cocone(x, dict(zip(nodes, legs)))):
                return True
    return False


def _all_strict(c: FinCat) -> bool:
    return all((epi_masks(c, x) == strict_epi_masks(c, x)).all() for x in c.objects)


def _item7(ctx: OverContext) -> BatteryItem:
    halves = []
    for side, work, base in (("epi", ctx, ctx.S), ("mono", ctx.op, ctx.S.op)):
        if not _all_strict(base):
            halves.append((side, "SKIPPED"))
            continue
        ok = all((epi_masks(work.T, x) == fb.surjective_masks(work, x)).all() for x in work.T.objects)
        halves.append((side, "PASS" if ok else "FAIL"))
    verdicts = {v for _, v in halves}
    verdict = "FAIL" if "FAIL" in verdicts else "PASS" if "PASS" in verdicts else "SKIPPED"
    return BatteryItem(7, verdict, "; ".join(f"{side}: {v}" for side, v in halves))


def is_finset_truncation(c: FinCat) -> bool:
    from .corpus.builders import build_finset

    n = len(c.objects) - 1
    if not 1 <= n <= 3:
        return False
    ref = build_finset(n)
    return set(c.objects) == set(ref.objects) and dict(c.arrows) == dict(ref.arrows) and dict(c.compose) == dict(ref.compose)


def representability(ctx: OverContext) -> tuple[bool, dict[str, int]]:
    """``a ↦ u(a)`` is a bijection ``Hom(1_⊥, X) ≅ Hom_S(1, uX)`` for each X,
    natural in X."""
    T, S, u = ctx.T, ctx.S, ctx.u
    one_bot = bot_object(ctx, "1")
    if one_bot is None:
        return False, {}
    sizes = {}
    for x in T.objects:
        image = [u.ar(a) for a in T.hom(one_bot, x)]
        if sorted(image) != list(S.hom("1", u.ob(x))):
            return False, sizes
        sizes[x] = len(image)
    for f in T.arrow_ids:
        x, y = T.arrows[f]
        for a in T.hom(one_bot, x):
            if u.ar(T.comp(f, a)) != S.comp(u.ar(f), u.ar(a)):
                return False, sizes
    return True, sizes


def theorem_battery(ctx: OverContext, max_nodes: int = 4) -> BatteryReport:
    items = [_item(1, ctx.faithful)]
    final = fb.creates_families(ctx, "final", "all")
    initial = fb.creates_families(ctx, "initial", "all")
    items.append(_item(2, final.holds and initial.holds and final.exact and initial.exact))
    items.append(_item3(ctx))
    adj = adjoint_witness(ctx)
    items.append(_item(4, adj.top_ok and adj.bot_ok))
    sink = fb.strict_epi_equals_final_surjective(ctx, "sink")
    src = fb.strict_epi_equals_final_surjective(ctx, "source")
    items.append(_item(5, sink.equal and src.equal,
                       f"{len(sink.difference)} sink and {len(src.difference)} source families differ"))
    ok, detail = _creates_colimits(ctx, max_nodes)
    if ok:
        ok, detail = _creates_colimits(ctx.op, max_nodes)
        detail = detail.replace("colimit", "limit")
    items.append(_item(6, ok, detail))
    items.append(_item7(ctx))
    if is_finset_truncation(ctx.S):
        ok, sizes = representability(ctx)
        items.append(_item(8, ok, f"|Hom(1_bot, X)| = {sizes}"))
    else:
        items.append(BatteryItem(8, "SKIPPED", "base is not a finite-set truncation"))
    return BatteryReport(items)
