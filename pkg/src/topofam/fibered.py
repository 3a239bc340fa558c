"""Notions relative to a functor ``u: 𝕋 → 𝕊``.

Sink-side notions (final, cocartesian, surjective) are implemented once;
source-side ones (initial, cartesian, injective) run the same code on the
opposite functor.  The u-initial test also has a direct implementation
used as a cross-check.

Families are indexed: with a non-faithful ``u`` a repeated member can
change u-finality (two distinct lifts over the same composite), so the
definitional predicates never drop repeats.  For faithful ``u`` indexed
and set semantics agree, and the bitmask tables (``*_masks``), which work
on sets of arrows, are exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import masks as mk
from .families import (
    SINK,
    SOURCE,
    Family,
    image_masks,
    is_strict_epi_family,
    is_strict_mono_family,
    source,
    space,
    strict_epi_masks,
    strict_mono_masks,
)
from .fincat import (
    FinCat,
    FunctorMap,
    InputError,
    is_faithful,
    is_product,
    is_thin,
    left_adjoint,
    products,
    right_adjoint,
)

NONFAITHFUL_BOUND = 2


class RouteDisagreement(AssertionError):
    """Two characterisations of the same notion returned different verdicts."""


class OverContext:
    """A functor ``u`` with lazily built lift tables and per-object caches."""

    def __init__(self, u: FunctorMap, _op: OverContext | None = None):
        self.u = u
        self.T: FinCat = u.source
        self.S: FinCat = u.target
        self._op = _op
        self.cache: dict = {}

    def __repr__(self):
        return f"OverContext({self.u.name}: {self.T.name} -> {self.S.name})"

    @property
    def op(self) -> OverContext:
        if self._op is None:
            self._op = OverContext(self.u.op, _op=self)
        return self._op

    @cached_property
    def faithful(self) -> bool:
        return is_faithful(self.u)

    @cached_property
    def _over(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {s: [] for s in self.S.objects}
        for x in self.T.objects:
            out[self.u.ob(x)].append(x)
        return {s: tuple(v) for s, v in out.items()}

    def over(self, s: str) -> tuple[str, ...]:
        """Objects of 𝕋 sitting over ``s``."""
        self.S._check_object(s)
        return self._over[s]

    @cached_property
    def _lifts(self) -> dict[tuple[str, str, str], tuple[str, ...]]:
        out: dict[tuple[str, str, str], list[str]] = {}
        for a in self.T.arrow_ids:
            x, y = self.T.arrows[a]
            out.setdefault((x, y, self.u.ar(a)), []).append(a)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    def lifts(self, x: str, y: str, phi: str) -> tuple[str, ...]:
        """Arrows ``x → y`` sitting over ``phi``."""
        return self._lifts.get((x, y, phi), ())

    def fiber_hom(self, x: str, y: str) -> tuple[str, ...]:
        s = self.u.ob(x)
        if self.u.ob(y) != s:
            return ()
        return self.lifts(x, y, self.S.id(s))

    def base_family(self, f: Family) -> Family:
        return Family(self.S, self.u.ob(f.anchor), tuple(self.u.ar(a) for a in f.members), f.orientation)

    def memo(self, key, compute):
        if key not in self.cache:
            self.cache[key] = compute()
        return self.cache[key]


def context(u: FunctorMap) -> OverContext:
    return OverContext(u)


@dataclass(frozen=True)
class Fiber:
    base_object: str
    subcat: FinCat

    @property
    def objects(self) -> tuple[str, ...]:
        return self.subcat.objects


def fiber(ctx: OverContext, s: str) -> Fiber:
    objs = ctx.over(s)
    ident = ctx.S.id(s)
    arrows = [a for a in ctx.T.arrow_ids if ctx.u.ar(a) == ident and ctx.T.src(a) in objs]
    return Fiber(s, ctx.T.subcategory(objs, arrows, f"{ctx.T.name}_{s}"))


# -- definitional predicates -------------------------------------------------------


def _require(f: Family, orientation: str):
    if f.orientation != orientation:
        raise InputError(f"{f} must be {orientation}-oriented")


def _bijective(meds: Sequence[str], images: Iterable[tuple], choices: Sequence[Sequence[str]]) -> bool:
    return len(set(images)) == len(meds) == math.prod(len(c) for c in choices)


def is_u_final(ctx: OverContext, f: Family) -> bool:
    """Every lift family over ``φ ∘ u(f_α)`` factors uniquely through ``f`` over ``φ``."""
    _require(f, SINK)
    T, S, u = ctx.T, ctx.S, ctx.u
    x, ms = f.anchor, f.members
    for y in T.objects:
        for phi in S.hom(u.ob(x), u.ob(y)):
            meds = ctx.lifts(x, y, phi)
            choices = [ctx.lifts(T.src(a), y, S.comp(phi, u.ar(a))) for a in ms]
            if not _bijective(meds, (tuple(T.comp(h, a) for a in ms) for h in meds), choices):
                return False
    return True


def is_u_cocartesian(ctx: OverContext, f: Family) -> bool:
    """As :func:`is_u_final` with ``φ`` restricted to the identity."""
    _require(f, SINK)
    T, u = ctx.T, ctx.u
    x, ms = f.anchor, f.members
    s = u.ob(x)
    for y in ctx.over(s):
        meds = ctx.fiber_hom(x, y)
        choices = [ctx.lifts(T.src(a), y, u.ar(a)) for a in ms]
        if not _bijective(meds, (tuple(T.comp(h, a) for a in ms) for h in meds), choices):
            return False
    return True


def _is_u_initial_direct(ctx: OverContext, f: Family) -> bool:
    T, S, u = ctx.T, ctx.S, ctx.u
    x, ms = f.anchor, f.members
    for y in T.objects:
        for psi in S.hom(u.ob(y), u.ob(x)):
            meds = ctx.lifts(y, x, psi)
            choices = [ctx.lifts(y, T.tgt(a), S.comp(u.ar(a), psi)) for a in ms]
            if not _bijective(meds, (tuple(T.comp(a, h) for a in ms) for h in meds), choices):
                return False
    return True


def is_u_initial(ctx: OverContext, f: Family, route: str = "direct") -> bool:
    """``route="direct"`` checks the definition; ``"dual"`` asks whether
    ``f`` is final for the opposite functor."""
    _require(f, SOURCE)
    if route == "direct":
        return _is_u_initial_direct(ctx, f)
    if route == "dual":
        return is_u_final(ctx.op, f.op())
    raise InputError(f"unknown route {route!r}")


def is_u_cartesian(ctx: OverContext, f: Family) -> bool:
    _require(f, SOURCE)
    return is_u_cocartesian(ctx.op, f.op())


def is_u_surjective(ctx: OverContext, f: Family) -> bool:
    _require(f, SINK)
    return is_strict_epi_family(ctx.base_family(f))


def is_u_injective(ctx: OverContext, f: Family) -> bool:
    _require(f, SOURCE)
    return is_strict_mono_family(ctx.base_family(f))


def is_cartesian_arrow(ctx: OverContext, a: str) -> bool:
    return is_u_cartesian(ctx, source(ctx.T, ctx.T.src(a), (a,)))


def is_initial_arrow(ctx: OverContext, a: str) -> bool:
    return is_u_initial(ctx, source(ctx.T, ctx.T.src(a), (a,)))


def u_isomorphic(ctx: OverContext, f: Family, g: Family) -> str | None:
    """Least isomorphism ``θ: f.anchor → g.anchor`` over an identity with
    ``θ∘f_α = g_α`` (sink) or ``g_α∘θ = f_α`` (source)."""
    if f.orientation != g.orientation or len(f) != len(g):
        raise InputError("families must have the same orientation and index set")
    if f.domains != g.domains or ctx.base_family(f).members != ctx.base_family(g).members \
            or ctx.u.ob(f.anchor) != ctx.u.ob(g.anchor):
        raise InputError("families do not sit over the same base family")
    T = ctx.T
    for theta in ctx.fiber_hom(f.anchor, g.anchor):
        if not T.is_iso(theta):
            continue
        if f.orientation == SINK:
            ok = all(T.comp(theta, a) == b for a, b in zip(f.members, g.members))
        else:
            ok = all(T.comp(b, theta) == a for a, b in zip(f.members, g.members))
        if ok:
            return theta
    return None


# -- class-level tables ------------------------------------------------------------
#
# Sink tables are indexed by masks over ``T.arrows_into(x)``; source tables
# by masks over ``T.arrows_from(x)`` (the sink space of the opposite).


def _sink_tests(ctx: OverContext, x: str, identity_only: bool):
    T, S, u = ctx.T, ctx.S, ctx.u
    sp = space(T, x)
    s = u.ob(x)
    ys = ctx.over(s) if identity_only else T.objects
    for y in ys:
        phis = (S.id(s),) if identity_only else S.hom(s, u.ob(y))
        for phi in phis:
            meds = ctx.lifts(x, y, phi)
            counts = [len(ctx.lifts(T.src(a), y, S.comp(phi, u.ar(a)))) for a in sp.members]
            agreements = [
                mk.mask_of(i for i, a in enumerate(sp.members) if T.comp(g, a) == T.comp(h, a))
                for g, h in itertools.combinations(meds, 2)
            ]
            yield counts, len(meds), agreements


def final_masks(ctx: OverContext, x: str) -> np.ndarray:
    return ctx.memo(("final", x), lambda: mk.bijection_masks(space(ctx.T, x).n, _sink_tests(ctx, x, False)))


def cocartesian_masks(ctx: OverContext, x: str) -> np.ndarray:
    return ctx.memo(("cocartesian", x), lambda: mk.bijection_masks(space(ctx.T, x).n, _sink_tests(ctx, x, True)))


def initial_masks(ctx: OverContext, x: str) -> np.ndarray:
    return final_masks(ctx.op, x)


def cartesian_masks(ctx: OverContext, x: str) -> np.ndarray:
    return cocartesian_masks(ctx.op, x)


def surjective_masks(ctx: OverContext, x: str) -> np.ndarray:
    return ctx.memo(("surjective", x), lambda: strict_epi_masks(ctx.S, ctx.u.ob(x))[image_masks(ctx.u, x)])


def injective_masks(ctx: OverContext, x: str) -> np.ndarray:
    return surjective_masks(ctx.op, x)


# -- creation ------------------------------------------------------------------------

_SOURCE_KINDS = ("cartesian", "initial", "strict-mono")
_DUAL_KIND = {"final": "initial", "cocartesian": "cartesian", "strict-epi": "strict-mono"}
_DUAL_OVER = {"all": "all", "arrows": "arrows", "empty": "empty",
              "strict-epi": "strict-mono", "strict-mono": "strict-epi"}


def _kind_table(ctx: OverContext, kind: str, x: str) -> np.ndarray:
    if kind == "cartesian":
        return cartesian_masks(ctx, x)
    if kind == "initial":
        return initial_masks(ctx, x)
    return strict_mono_masks(ctx.T, x)


def _kind_predicate(ctx: OverContext, kind: str, f: Family) -> bool:
    if kind == "cartesian":
        return is_u_cartesian(ctx, f)
    if kind == "initial":
        return is_u_initial(ctx, f)
    return is_strict_mono_family(f)


@dataclass
class Creation:
    """Outcome of a creation check, with a witness lookup.

    Base data are tuples of pairs ``(φ_α, X_α)`` with ``φ_α`` out of a
    common base object ``S`` (source kinds) or into it (sink kinds).
    """

    kind: str
    over: str
    holds: bool
    exact: bool
    failure: tuple | None = None
    _ctx: OverContext | None = field(default=None, repr=False)
    _witness: dict = field(default_factory=dict, repr=False)
    _dual: bool = field(default=False, repr=False)

    def witness(self, s: str, data: Sequence[tuple[str, str]]) -> Family | None:
        """A created family over ``data`` anchored over ``s``, if one was found."""
        if self._dual:
            f = self._dual_of.witness(s, data)
            return None if f is None else f.op()
        entry = self._witness.get(s)
        if entry is None:
            return None
        pairs, apex_of, general = entry
        ctx = self._ctx
        if general is not None:
            return general.get(tuple(sorted(data)))
        index = {p: i for i, p in enumerate(pairs)}
        try:
            m = mk.mask_of(index[tuple(p)] for p in data)
        except KeyError:
            raise InputError(f"{data} is not base data over {s}") from None
        k = int(apex_of[m])
        if k < 0:
            return None
        x = ctx.over(s)[k]
        members = tuple(sorted({ctx.lifts(x, xa, phi)[0] for phi, xa in data}))
        return source(ctx.T, x, members)


def _base_pairs(ctx: OverContext, s: str) -> list[tuple[str, str]]:
    S = ctx.S
    return [(phi, xa) for phi in S.arrows_from(s) for xa in ctx.over(S.tgt(phi))]


def _base_filter(ctx: OverContext, over: str, s: str, phis: Sequence[str]) -> bool:
    if over == "strict-mono":
        return is_strict_mono_family(source(ctx.S, s, phis))
    return True


def creates_families(ctx: OverContext, kind: str, over: str = "all", bound: int | None = None) -> Creation:
    """Does ``u`` create ``kind`` families over the base families ``over``?

    ``kind`` is one of cartesian, initial, strict-mono (source side) or
    cocartesian, final, strict-epi (sink side); ``over`` is one of all,
    arrows (single arrows), empty, strict-mono, strict-epi.  Faithful
    functors are decided exactly by bitmask over sets of base data;
    otherwise base data are multisets of size at most ``bound``
    (default 2) and the result is flagged inexact.
    """
    if over not in _DUAL_OVER:
        raise InputError(f"unknown base filter {over!r}")
    if kind in _DUAL_KIND:
        inner = creates_families(ctx.op, _DUAL_KIND[kind], _DUAL_OVER[over], bound)
        out = Creation(kind, over, inner.holds, inner.exact, inner.failure, ctx, _dual=True)
        out._dual_of = inner
        return out
    if kind not in _SOURCE_KINDS:
        raise InputError(f"unknown kind {kind!r}")
    if over == "strict-epi":
        raise InputError("source-side kinds are created over source families; use strict-mono")
    return ctx.memo(("creates", kind, over, bound), lambda: _creates(ctx, kind, over, bound))


def _creates(ctx: OverContext, kind: str, over: str, bound: int | None) -> Creation:
    result = Creation(kind, over, True, True, None, ctx)
    for s in ctx.S.objects:
        pairs = _base_pairs(ctx, s)
        if ctx.faithful and len(pairs) <= mk.MAX_BITS:
            failure, entry = _creates_faithful(ctx, kind, over, bound, s, pairs)
            if bound is not None and over not in ("arrows", "empty"):
                result.exact = False
        else:
            b = bound if bound is not None else NONFAITHFUL_BOUND
            failure, entry = _creates_general(ctx, kind, over, b, s, pairs)
            if over not in ("arrows", "empty"):
                result.exact = False
        result._witness[s] = entry
        if failure is not None and result.holds:
            result.holds = False
            result.failure = (s, failure)
    return result


def _creates_faithful(ctx, kind, over, bound, s, pairs):
    T, S = ctx.T, ctx.S
    n = len(pairs)
    masks = mk.all_masks(n)
    base_sp = space(S.op, s)
    base = mk.remap_table(n, [base_sp.bit[phi] for phi, _ in pairs])
    if over == "all":
        wanted = np.ones(masks.size, dtype=bool)
    elif over == "arrows":
        wanted = mk.popcount(masks) == 1
    elif over == "empty":
        wanted = masks == 0
    else:
        wanted = strict_mono_masks(S, s)[base]
    if bound is not None:
        wanted &= mk.popcount(masks) <= bound
    apex_of = np.full(masks.size, -1, dtype=np.int64)
    for k, x in enumerate(ctx.over(s)):
        sp = space(T.op, x)
        targets, missing = [], 0
        for i, (phi, xa) in enumerate(pairs):
            lift = ctx.lifts(x, xa, phi)
            if lift:
                targets.append(sp.bit[lift[0]])
            else:
                targets.append(None)
                missing |= 1 << i
        ok = ((masks & missing) == 0) & _kind_table(ctx, kind, x)[mk.remap_table(n, targets)]
        apex_of[ok & (apex_of < 0)] = k
    bad = np.flatnonzero(wanted & (apex_of < 0))
    failure = None
    if bad.size:
        failure = tuple(pairs[i] for i in mk.bits_of(int(bad[0])))
    return failure, (pairs, apex_of, None)


def _creates_general(ctx, kind, over, bound, s, pairs):
    T = ctx.T
    sizes = {"arrows": [1], "empty": [0]}.get(over, range(bound + 1))
    found: dict[tuple, Family] = {}
    failure = None
    for k in sizes:
        for data_idx in itertools.combinations_with_replacement(range(len(pairs)), k):
            data = tuple(pairs[i] for i in data_idx)
            if not _base_filter(ctx, over, s, [phi for phi, _ in data]):
                continue
            hit = None
            for x in ctx.over(s):
                choices = [ctx.lifts(x, xa, phi) for phi, xa in data]
                for members in itertools.product(*choices):
                    f = source(T, x, members)
                    if _kind_predicate(ctx, kind, f):
                        hit = f
                        break
                if hit is not None:
                    break
            if hit is None:
                if failure is None:
                    failure = data
            else:
                found.setdefault(tuple(sorted(data)), hit)
    return failure, (pairs, None, found)


# -- prefibrations and fibrations ---------------------------------------------------


def is_prefibration(ctx: OverContext) -> bool:
    return creates_families(ctx, "cartesian", "arrows").holds


def cartesian_arrows(ctx: OverContext) -> list[str]:
    T = ctx.T
    out = []
    for x in T.objects:
        table = cartesian_masks(ctx, x)
        sp = space(T.op, x)
        out.extend(a for a in sp.members if table[1 << sp.bit[a]])
    return sorted(out)


def cartesian_arrows_compose(ctx: OverContext) -> bool:
    T = ctx.T
    cart = set(cartesian_arrows(ctx))
    return all(T.comp(b, a) in cart for a in cart for b in T.arrows_from(T.tgt(a)) if b in cart)


@dataclass
class FibrationVerdict:
    prefibration: bool
    fibration: bool
    route_a: bool
    route_b: bool


def fibration_verdict(ctx: OverContext) -> FibrationVerdict:
    def compute():
        pre = is_prefibration(ctx)
        route_a = pre and cartesian_arrows_compose(ctx)
        route_b = creates_families(ctx, "initial", "arrows").holds
        if route_a != route_b:
            raise RouteDisagreement(f"fibration routes disagree on {ctx}: a={route_a} b={route_b}")
        return FibrationVerdict(pre, route_a, route_a, route_b)
    return ctx.memo("fibration", compute)


def is_fibration(ctx: OverContext) -> bool:
    return fibration_verdict(ctx).fibration


# -- fibre structure -------------------------------------------------------------------


def is_fiber_product(ctx: OverContext, s: str, apex: str, legs: Sequence[str]) -> bool:
    fb = fiber(ctx, s)
    if apex not in fb.objects or any(a not in fb.subcat.arrows for a in legs):
        return False
    return is_product(fb.subcat, apex, tuple(legs))


def _fiber_factor_families(ctx: OverContext, s: str, bound: int | None):
    objs = ctx.over(s)
    if ctx.faithful and bound is None:
        for k in range(len(objs) + 1):
            yield from itertools.combinations(objs, k)
    else:
        b = NONFAITHFUL_BOUND if bound is None else bound
        for k in range(b + 1):
            yield from itertools.combinations_with_replacement(objs, k)


def fibers_have_all_products(ctx: OverContext, bound: int | None = None) -> tuple[bool, bool]:
    """``(verdict, exact)``.  Faithful fibres are thin, so sets of factors
    suffice; otherwise factor multisets up to the bound are checked."""
    exact = ctx.faithful and bound is None
    for s in ctx.S.objects:
        fb = fiber(ctx, s).subcat
        for factors in _fiber_factor_families(ctx, s, bound):
            if next(products(fb, tuple(factors)), None) is None:
                return False, exact
    return True, exact


def fiber_order(ctx: OverContext, s: str) -> dict[str, set[str]]:
    """``x ↦ {y : x ≤ y}`` in the fibre over ``s``."""
    objs = ctx.over(s)
    return {x: {y for y in objs if ctx.fiber_hom(x, y)} for x in objs}


def fibers_are_complete_lattices(ctx: OverContext) -> bool:
    """Every fibre is thin, has a top, and has all binary meets."""
    for s in ctx.S.objects:
        fb = fiber(ctx, s).subcat
        if not is_thin(fb):
            return False
        objs = ctx.over(s)
        up = fiber_order(ctx, s)
        if not any(all(t in up[x] for x in objs) for t in objs):
            return False
        for a, b in itertools.combinations(objs, 2):
            lower = [z for z in objs if a in up[z] and b in up[z]]
            if not any(all(m in up[z] for z in lower) for m in lower):
                return False
    return True


def products_stable(ctx: OverContext, bound: int | None = None) -> bool:
    """Products in the fibres are carried to products by cartesian lifts."""
    T, S = ctx.T, ctx.S
    cart = set(cartesian_arrows(ctx))
    for phi in S.arrow_ids:
        s, t = S.arrows[phi]
        fb_t = fiber(ctx, t).subcat
        fb_s = fiber(ctx, s).subcat
        for factors in _fiber_factor_families(ctx, t, bound):
            cones = list(products(fb_t, tuple(factors)))
            if not cones:
                continue
            lift_choices = [[(y, g) for y in ctx.over(s) for g in ctx.lifts(y, xa, phi) if g in cart]
                            for xa in factors]
            for x, pis in cones:
                apex_lifts = [(y, g) for y in ctx.over(s) for g in ctx.lifts(y, x, phi) if g in cart]
                for y, g in apex_lifts:
                    for chosen in itertools.product(*lift_choices):
                        rhos = []
                        for (ya, ga), pi in zip(chosen, pis):
                            target = T.comp(pi, g)
                            hs = [h for h in ctx.fiber_hom(y, ya) if T.comp(ga, h) == target]
                            if len(hs) != 1:
                                raise AssertionError(f"cartesian lift {ga} did not mediate uniquely")
                            rhos.append(hs[0])
                        if not is_product(fb_s, y, tuple(rhos)):
                            return False
    return True


# -- composition of cartesian families -----------------------------------------------


def _bounded_source_tuples(ctx: OverContext, x: str, bound: int):
    arrows = ctx.T.arrows_from(x)
    for k in range(bound + 1):
        yield from itertools.combinations_with_replacement(arrows, k)


def _minimal(table: np.ndarray) -> list[int]:
    return [int(m) for m in np.flatnonzero(table & ~mk.proper_subset_exists(table))]


def _postcompose_remap(ctx: OverContext, x: str, a: str) -> np.ndarray:
    """For ``a: x → x'``: mask over arrows out of ``x'`` to the mask of composites with ``a``, out of ``x``."""
    T = ctx.T
    inner = space(T.op, T.tgt(a))
    outer = space(T.op, x)
    return mk.remap_table(inner.n, [outer.bit[T.comp(b, a)] for b in inner.members])


def cartesian_arrows_compose_with_families(ctx: OverContext, bound: int | None = None) -> bool:
    T = ctx.T
    cart = cartesian_arrows(ctx)
    if ctx.faithful and bound is None:
        for f in cart:
            y, x = T.arrows[f]
            remap = _postcompose_remap(ctx, y, f)
            fams = np.flatnonzero(cartesian_masks(ctx, x))
            if not cartesian_masks(ctx, y)[remap[fams]].all():
                return False
        return True
    b = NONFAITHFUL_BOUND if bound is None else bound
    for f in cart:
        y, x = T.arrows[f]
        for ms in _bounded_source_tuples(ctx, x, b):
            if is_u_cartesian(ctx, source(T, x, ms)) and \
                    not is_u_cartesian(ctx, source(T, y, tuple(T.comp(a, f) for a in ms))):
                return False
    return True


def cartesian_composition_failure(ctx: OverContext, bound: int | None = None) -> tuple[str, tuple[str, ...]] | None:
    """A cartesian arrow ``f: Y → X`` and a cartesian family out of ``X``
    whose composite with ``f`` is not cartesian, or ``None``."""
    T = ctx.T
    b = NONFAITHFUL_BOUND if bound is None else bound
    for f in cartesian_arrows(ctx):
        y, x = T.arrows[f]
        if ctx.faithful and bound is None:
            remap = _postcompose_remap(ctx, y, f)
            fams = np.flatnonzero(cartesian_masks(ctx, x))
            bad = fams[~cartesian_masks(ctx, y)[remap[fams]]]
            if bad.size:
                return f, space(T.op, x).family(int(bad[0])).members
            continue
        for ms in _bounded_source_tuples(ctx, x, b):
            if is_u_cartesian(ctx, source(T, x, ms)) and \
                    not is_u_cartesian(ctx, source(T, y, tuple(T.comp(a, f) for a in ms))):
                return f, ms
    return None


def cartesian_families_compose(ctx: OverContext, bound: int | None = None) -> bool:
    """Composites ``g_{αβ} ∘ f_α`` of cartesian families are cartesian.

    For faithful ``u`` a superset of a cartesian family is cartesian, so
    it suffices to compose minimal cartesian families; the search keeps
    an antichain of minimal partial composites that are not yet cartesian.
    """
    T = ctx.T
    if ctx.faithful and bound is None:
        minimal = {x: _minimal(cartesian_masks(ctx, x)) for x in T.objects}
        for x in T.objects:
            sp = space(T.op, x)
            table = cartesian_masks(ctx, x)
            per_member = []
            for a in sp.members:
                remap = _postcompose_remap(ctx, x, a)
                per_member.append(sorted({int(remap[m]) for m in minimal[T.tgt(a)]}))
            if table[0]:
                continue  # every family out of x is cartesian
            for outer in minimal[x]:
                partial = {0}
                for i in mk.bits_of(outer):
                    nxt = {p | q for p in partial for q in per_member[i]}
                    nxt = {p for p in nxt if not table[p]}
                    partial = {p for p in nxt if not any(q != p and (q & p) == q for q in nxt)}
                    if not partial:
                        break
                if partial:
                    return False
        return True
    b = NONFAITHFUL_BOUND if bound is None else bound
    for x in T.objects:
        for outer in _bounded_source_tuples(ctx, x, b):
            if not is_u_cartesian(ctx, source(T, x, outer)):
                continue
            inner_options = [[ms for ms in _bounded_source_tuples(ctx, T.tgt(a), b)
                              if is_u_cartesian(ctx, source(T, T.tgt(a), ms))] for a in outer]
            for inner in itertools.product(*inner_options):
                comp = tuple(T.comp(g, a) for a, ms in zip(outer, inner) for g in ms)
                if not is_u_cartesian(ctx, source(T, x, comp)):
                    return False
    return True


def cartesian_families_are_initial(ctx: OverContext, bound: int | None = None) -> bool:
    T = ctx.T
    if ctx.faithful and bound is None:
        return all(not (cartesian_masks(ctx, x) & ~initial_masks(ctx, x)).any() for x in T.objects)
    b = NONFAITHFUL_BOUND if bound is None else bound
    return all(is_u_initial(ctx, source(T, x, ms))
               for x in T.objects for ms in _bounded_source_tuples(ctx, x, b)
               if is_u_cartesian(ctx, source(T, x, ms)))


# -- E- and M-functors ---------------------------------------------------------------


def preserves_strict_mono(ctx: OverContext, bound: int | None = None) -> bool:
    T = ctx.T
    for x in T.objects:
        table = strict_mono_masks(T, x)
        if bound is not None:
            table = table & (mk.popcount(mk.all_masks(table.size.bit_length() - 1)) <= bound)
        image = image_masks(ctx.u.op, x)
        if not strict_mono_masks(ctx.S, ctx.u.ob(x))[image[table]].all():
            return False
    return True


def is_M_functor(ctx: OverContext, bound: int | None = None) -> bool:
    """Faithful, creates and preserves strict monomorphic families; a
    ``bound`` gives the finite-family variant."""
    if not ctx.faithful:
        return False
    return creates_families(ctx, "strict-mono", "strict-mono", bound).holds and preserves_strict_mono(ctx, bound)


def is_E_functor(ctx: OverContext, bound: int | None = None) -> bool:
    return is_M_functor(ctx.op, bound)


def preserves_strict_epi(ctx: OverContext, bound: int | None = None) -> bool:
    return preserves_strict_mono(ctx.op, bound)


# -- strict epi = final surjective ----------------------------------------------------


@dataclass
class ClassComparison:
    orientation: str
    hypotheses: dict[str, bool]
    strict: dict[str, int]
    final_surjective: dict[str, int]
    difference: list[tuple[str, tuple[str, ...]]]

    @property
    def hypothesis_holds(self) -> bool:
        h = self.hypotheses
        return (h["faithful"] and h["left_adjoint"] and h["right_adjoint"]) or h["E_functor"]

    @property
    def equal(self) -> bool:
        return not self.difference


def strict_epi_equals_final_surjective(ctx: OverContext, orientation: str = SINK) -> ClassComparison:
    """Compare strict epimorphic with final surjective families (``source``:
    strict monomorphic with initial injective) over every anchor."""
    work = ctx if orientation == SINK else ctx.op
    T = work.T
    hyp = {
        "faithful": ctx.faithful,
        "left_adjoint": left_adjoint(ctx.u) is not None,
        "right_adjoint": right_adjoint(ctx.u) is not None,
        "E_functor": is_E_functor(work),
    }
    strict, fs, diff = {}, {}, []
    for x in T.objects:
        a = strict_epi_masks(T, x)
        b = final_masks(work, x) & surjective_masks(work, x)
        strict[x] = int(a.sum())
        fs[x] = int(b.sum())
        sp = space(T, x)
        for m in np.flatnonzero(a != b):
            diff.append((x, sp.family(int(m)).members))
    return ClassComparison(orientation, hyp, strict, fs, diff)


# -- double diagrams --------------------------------------------------------------------


@dataclass
class DoubleDiagramReport:
    """Outcome of :func:`double_diagram_check`; ``diagrams`` counts distinct
    (legs, composite family) pairs reached."""

    part: str
    diagrams: int
    counterexamples: list[tuple[str, tuple[str, ...], tuple[str, ...]]]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def double_diagram_check(ctx: OverContext, part: str = "cartesian") -> DoubleDiagramReport:
    """Enumerate diagrams ``p_α = f_α ∘ π_α`` with ``π_α: X → Y_α`` in a fibre
    and every ``f_α`` cartesian (``part="cartesian"``) or initial
    (``part="initial"``), and compare the two sides:

    * cartesian: ``π`` is a product in the fibre iff ``p`` is cartesian;
    * initial: ``π`` is initial iff ``p`` is initial.

    Needs faithful ``u``: fibres are then thin, ``π`` is determined by its
    set of codomains, and every index set reduces to a set of pairs
    ``(π_α, f_α)``.  All subsets of those pairs are reached by a closure
    over a bitmask of (codomain set, composite family).
    """
    if part not in ("cartesian", "initial"):
        raise InputError(f"unknown part {part!r}")
    if not ctx.faithful:
        raise InputError("double diagrams are enumerated for faithful functors only")
    T = ctx.T
    if part == "cartesian":
        legs_ok = set(cartesian_arrows(ctx))
    else:
        legs_ok = {a for a in T.arrow_ids if is_initial_arrow(ctx, a)}
    diagrams, bad = 0, []
    for x in T.objects:
        s = ctx.u.ob(x)
        ups = [y for y in ctx.over(s) if ctx.fiber_hom(x, y)]
        pis = [ctx.fiber_hom(x, y)[0] for y in ups]
        sp = space(T.op, x)
        k, n = len(ups), sp.n
        mk.check_width(k + n)
        reach = np.zeros(1 << (k + n), dtype=bool)
        reach[0] = True
        for i, y in enumerate(ups):
            for f in T.arrows_from(y):
                if f in legs_ok:
                    code = (1 << i) | (1 << (k + sp.bit[T.comp(f, pis[i])]))
                    reach[np.flatnonzero(reach) | code] = True
        combos = np.flatnonzero(reach)
        diagrams += combos.size
        if part == "cartesian":
            left = np.array([is_fiber_product(ctx, s, x, [pis[i] for i in mk.bits_of(m)])
                             for m in range(1 << k)])
            right = cartesian_masks(ctx, x)
        else:
            pi_mask = [mk.mask_of(sp.bit[pis[i]] for i in mk.bits_of(m)) for m in range(1 << k)]
            left = initial_masks(ctx, x)[np.array(pi_mask, dtype=np.int64)]
            right = initial_masks(ctx, x)
        ys, ps = combos & ((1 << k) - 1), combos >> k
        for c in np.flatnonzero(left[ys] != right[ps]):
            legs = tuple(ups[i] for i in mk.bits_of(int(ys[c])))
            bad.append((x, legs, sp.family(int(ps[c])).members))
    return DoubleDiagramReport(part, diagrams, bad)
