"""Seeded random models for fuzzing.

Every model is built from a ``random.Random(seed)`` stream only, so the
same seed always yields the same functor.  Generated categories and
functors are validated before they are returned.
"""
from __future__ import annotations

import itertools
import random

from ..fibered import OverContext
from ..fincat import FinCat, FunctorMap, poset_category, validate_category, validate_functor
from ..grothendieck import MonotoneMap, Poset, PosetPseudofunctor, left_adjoint_of_transition, total_category
from . import small

BASES = ("chain2", "chain3", "vee", "discrete2", "idempotent")


def _base(kind: str) -> FinCat:
    if kind == "chain2":
        return small.chain(("s", "t"), "I")
    if kind == "chain3":
        return small.chain(("r", "s", "t"), "Chain3")
    if kind == "vee":
        return poset_category(("p", "l", "r"), [("p", "l"), ("p", "r")], "Vee")
    if kind == "discrete2":
        return small.discrete(("s", "t"), "D2")
    return small.idempotent_monoid()


def monotone_maps(p: Poset, q: Poset) -> list[dict[str, str]]:
    """All monotone maps ``p → q`` in a fixed order."""
    out = []
    for images in itertools.product(q.elements, repeat=len(p.elements)):
        table = dict(zip(p.elements, images))
        if all(q.leq(table[a], table[b]) for a, b in p.le):
            out.append(table)
    return out


def _pick_map(rng: random.Random, p: Poset, q: Poset, prefer_adjoint: bool, idempotent: bool = False) -> dict[str, str]:
    maps = monotone_maps(p, q)
    if idempotent:
        maps = [m for m in maps if all(m[m[x]] == m[x] for x in p.elements)]
    if prefer_adjoint:
        good = [m for m in maps if left_adjoint_of_transition(MonotoneMap(p, q, m)) is not None]
        maps = good or maps
    return rng.choice(maps)


def random_pseudofunctor(seed: int, size_budget: int = 8, base: str | None = None) -> PosetPseudofunctor:
    rng = random.Random(seed)
    return _random_pseudofunctor(rng, size_budget, base)


def _random_pseudofunctor(rng: random.Random, size_budget: int, base_kind: str | None = None) -> PosetPseudofunctor:
    base_kind = base_kind or rng.choice(BASES)
    b = _base(base_kind)
    kinds = {}
    remaining = max(size_budget, len(b.objects))
    for i, s in enumerate(b.objects):
        left = len(b.objects) - i - 1
        options = [k for k, (els, _) in small.FIBERS.items() if len(els) <= remaining - left]
        kinds[s] = rng.choice(options)
        remaining -= len(small.FIBERS[kinds[s]][0])
    posets = {s: small.fiber_poset(k) for s, k in kinds.items()}
    # transitions run contravariantly: φ: S → T gives P(T) → P(S)
    prefer = rng.random() < 0.5
    trans: dict[str, dict[str, str]] = {}
    for s in b.objects:
        trans[b.id(s)] = {x: x for x in posets[s].elements}
    if base_kind == "idempotent":
        trans["e"] = _pick_map(rng, posets["m"], posets["m"], prefer, idempotent=True)
    elif base_kind == "chain3":
        f_rs = _pick_map(rng, posets["s"], posets["r"], prefer)
        f_st = _pick_map(rng, posets["t"], posets["s"], prefer)
        trans["r<=s"], trans["s<=t"] = f_rs, f_st
        trans["r<=t"] = {y: f_rs[f_st[y]] for y in posets["t"].elements}
    else:
        for phi in b.arrow_ids:
            s, t = b.arrows[phi]
            if s != t:
                trans[phi] = _pick_map(rng, posets[t], posets[s], prefer)
    return PosetPseudofunctor(b, posets, trans, f"P_{base_kind}")


def _random_poset(rng: random.Random, n: int, prefix: str) -> Poset:
    elems = [f"{prefix}{i}" for i in range(n)]
    edges = [(a, b) for a, b in itertools.combinations(elems, 2) if rng.random() < 0.4]
    return Poset.from_hasse(elems, edges)


def _random_small(rng: random.Random, budget: int) -> FinCat:
    kind = rng.choice(("parallel", "idempotent", "poset", "discrete"))
    if kind == "parallel":
        return small.parallel_pair()
    if kind == "idempotent":
        return small.idempotent_monoid()
    if kind == "poset":
        return _random_poset(rng, rng.randint(1, min(budget, 4)), "c").category("C")
    return small.discrete([f"d{i}" for i in range(rng.randint(1, min(budget, 3)))], "D")


STRATEGIES = ("grothendieck", "full_subcategory", "poset_map", "projection", "collapse")


def random_model(seed: int, size_budget: int = 8) -> OverContext:
    """A random functor, possibly replaced by its opposite."""
    rng = random.Random(seed)
    strategy = rng.choice(STRATEGIES)
    name = f"rand{seed}"
    if strategy in ("grothendieck", "full_subcategory"):
        tc = total_category(_random_pseudofunctor(rng, size_budget))
        u = tc.projection
        if strategy == "full_subcategory":
            keep = [x for x in u.source.objects if rng.random() < 0.7] or [u.source.objects[0]]
            sub = u.source.full_subcategory(keep, f"Sub({u.source.name})")
            u = FunctorMap(sub, u.target, {x: u.ob(x) for x in sub.objects},
                           {a: u.ar(a) for a in sub.arrow_ids}, name)
        else:
            u = FunctorMap(u.source, u.target, u.obj_map, u.arr_map, name)
    elif strategy == "poset_map":
        t = _random_poset(rng, rng.randint(1, max(1, min(size_budget, 5))), "x")
        s = _random_poset(rng, rng.randint(1, 3), "s")
        table = rng.choice(monotone_maps(t, s))
        u = small.poset_functor(t, s, table, "T", "S", name)
    elif strategy == "projection":
        b = _base(rng.choice(("chain2", "discrete2")))
        m = small.idempotent_monoid() if rng.random() < 0.5 else small.chain(("0", "1"), "I2")
        u = small.first_projection(b, m, name)
    else:
        u = small.collapse(_random_small(rng, size_budget), name)
    for report in (validate_category(u.source), validate_category(u.target), validate_functor(u)):
        if not report.ok:
            raise AssertionError(f"generator produced an invalid model for seed {seed}: {report}")
    ctx = OverContext(u)
    return ctx.op if rng.random() < 0.5 else ctx
