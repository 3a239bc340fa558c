"""Poset-valued pseudofunctors and the Grothendieck construction.

A :class:`PosetPseudofunctor` over a base category assigns a finite
poset to every object and a monotone map ``φ*: P(T) → P(S)`` to every
arrow ``φ: S → T``, strictly functorially.  Its total category has an
arrow ``(S, x) → (T, y)`` over ``φ`` exactly when ``x ≤ φ*(y)``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .fibered import OverContext, cartesian_arrows, fiber_order, is_fibration
from .fincat import (
    FinCat,
    FunctorMap,
    InputError,
    ValidationReport,
    Violation,
    validate_category,
)


class PreconditionError(InputError):
    """The input does not satisfy the operation's precondition."""


@dataclass(frozen=True)
class Poset:
    elements: tuple[str, ...]
    le: frozenset[tuple[str, str]]

    @classmethod
    def from_hasse(cls, elements: Iterable[str], edges: Iterable[tuple[str, str]]) -> Poset:
        """Reflexive-transitive closure of the covering relation ``edges``."""
        elems = tuple(elements)
        known = set(elems)
        rel = {(x, x) for x in elems}
        for a, b in edges:
            if a not in known or b not in known:
                raise InputError(f"edge {a} <= {b} uses an unknown element")
            rel.add((a, b))
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        return cls(elems, frozenset(rel))

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.le

    def is_antisymmetric(self) -> bool:
        return all(a == b or (b, a) not in self.le for a, b in self.le)

    def hasse(self) -> list[tuple[str, str]]:
        """Covering pairs, sorted."""
        strict = {(a, b) for a, b in self.le if a != b}
        return sorted((a, b) for a, b in strict
                      if not any((a, c) in strict and (c, b) in strict for c in self.elements))

    def meet(self, subset: Iterable[str]) -> str | None:
        sub = list(subset)
        lower = [z for z in self.elements if all(self.leq(z, a) for a in sub)]
        tops = [m for m in lower if all(self.leq(z, m) for z in lower)]
        return tops[0] if tops else None

    def is_complete_lattice(self) -> bool:
        """Top exists and binary meets exist (so all finite meets do)."""
        if self.meet(()) is None:
            return False
        return all(self.meet((a, b)) is not None for a, b in itertools.combinations(self.elements, 2))

    def category(self, name: str = "P") -> FinCat:
        from .fincat import poset_category
        return poset_category(self.elements, self.le, name)


@dataclass(frozen=True)
class MonotoneMap:
    source: Poset
    target: Poset
    table: Mapping[str, str]

    def __call__(self, x: str) -> str:
        return self.table[x]

    def is_monotone(self) -> bool:
        return all(self.target.leq(self.table[a], self.table[b]) for a, b in self.source.le)


def left_adjoint_of_transition(f: MonotoneMap) -> MonotoneMap | None:
    """``g ⊣ f``: ``g(b) ≤ a`` iff ``b ≤ f(a)``, when such a ``g`` exists."""
    p, q = f.source, f.target
    table = {}
    for b in q.elements:
        above = [a for a in p.elements if q.leq(b, f(a))]
        least = [a for a in above if all(p.leq(a, c) for c in above)]
        if not least:
            return None
        table[b] = least[0]
    g = MonotoneMap(q, p, table)
    ok = all(p.leq(g(b), a) == q.leq(b, f(a)) for a in p.elements for b in q.elements)
    return g if ok else None


@dataclass(frozen=True, eq=False)
class PosetPseudofunctor:
    base: FinCat
    fiber_poset: Mapping[str, Poset]
    transition: Mapping[str, Mapping[str, str]]  # φ: S → T  ↦  {y ∈ P(T): φ*(y) ∈ P(S)}
    name: str = "P"

    def pullback(self, phi: str) -> MonotoneMap:
        s, t = self.base.arrows[phi]
        return MonotoneMap(self.fiber_poset[t], self.fiber_poset[s], self.transition[phi])


def validate_pseudofunctor(p: PosetPseudofunctor) -> ValidationReport:
    out: list[Violation] = []
    b = p.base
    for s in b.objects:
        if s not in p.fiber_poset:
            out.append(Violation("missing fibre", (s,)))
        elif not p.fiber_poset[s].is_antisymmetric():
            out.append(Violation("fibre not antisymmetric", (s,)))
    if out:
        return ValidationReport(tuple(out))
    for phi in b.arrow_ids:
        s, t = b.arrows[phi]
        tab = p.transition.get(phi)
        ps, pt = p.fiber_poset[s], p.fiber_poset[t]
        if tab is None or set(tab) != set(pt.elements) or any(v not in ps.elements for v in tab.values()):
            out.append(Violation("transition not a map between the fibres", (phi,)))
            continue
        if not p.pullback(phi).is_monotone():
            out.append(Violation("transition not monotone", (phi,)))
    if out:
        return ValidationReport(tuple(out))
    for s in b.objects:
        tab = p.transition[b.id(s)]
        for y in p.fiber_poset[s].elements:
            if tab[y] != y:
                out.append(Violation("identity transition moves an element", (b.id(s), y)))
    for (psi, phi), h in b.compose.items():
        for z in p.fiber_poset[b.tgt(psi)].elements:
            if p.transition[h][z] != p.transition[phi][p.transition[psi][z]]:
                out.append(Violation("transition of a composite", (psi, phi, z)))
                break
    return ValidationReport(tuple(out))


def total_object(s: str, x: str) -> str:
    return json.dumps([s, x], separators=(",", ":"), ensure_ascii=False)


def total_arrow(phi: str, x: str, y: str) -> str:
    return json.dumps([phi, x, y], separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class TotalCategory:
    total: FinCat
    projection: FunctorMap

    def context(self) -> OverContext:
        return OverContext(self.projection)


def total_category(p: PosetPseudofunctor) -> TotalCategory:
    report = validate_pseudofunctor(p)
    if not report.ok:
        raise PreconditionError(f"invalid pseudofunctor: {report}")
    b = p.base
    objs = [(s, x) for s in b.objects for x in p.fiber_poset[s].elements]
    arrows, info = {}, {}
    for phi in b.arrow_ids:
        s, t = b.arrows[phi]
        ps = p.fiber_poset[s]
        for x in ps.elements:
            for y in p.fiber_poset[t].elements:
                if ps.leq(x, p.transition[phi][y]):
                    a = total_arrow(phi, x, y)
                    arrows[a] = (total_object(s, x), total_object(t, y))
                    info[a] = (phi, x, y)
    by_src: dict[str, list[str]] = {}
    for a, (src, _) in arrows.items():
        by_src.setdefault(src, []).append(a)
    comp = {}
    for f, (phi, x, y) in info.items():
        for g in by_src.get(arrows[f][1], ()):
            psi, _, z = info[g]
            comp[(g, f)] = total_arrow(b.comp(psi, phi), x, z)
    ids = {total_object(s, x): total_arrow(b.id(s), x, x) for s, x in objs}
    total = FinCat(tuple(total_object(s, x) for s, x in objs), arrows, ids, comp, f"Groth({p.name})")
    proj = FunctorMap(total, b, {total_object(s, x): s for s, x in objs},
                      {a: phi for a, (phi, _, _) in info.items()}, "proj")
    return TotalCategory(total, proj)


def extract_pseudofunctor(ctx: OverContext, name: str = "P") -> PosetPseudofunctor:
    """Fibres and cartesian lifts of a faithful fibration with poset fibres."""
    if not ctx.faithful:
        raise PreconditionError("extraction needs a faithful functor")
    if not is_fibration(ctx):
        raise PreconditionError("extraction needs a fibration")
    T, S = ctx.T, ctx.S
    posets = {}
    for s in S.objects:
        up = fiber_order(ctx, s)
        poset = Poset(ctx.over(s), frozenset((x, y) for x in up for y in up[x]))
        if not poset.is_antisymmetric():
            raise PreconditionError(f"fibre over {s} is not a poset")
        posets[s] = poset
    cart = set(cartesian_arrows(ctx))
    transition: dict[str, dict[str, str]] = {}
    for phi in S.arrow_ids:
        s, t = S.arrows[phi]
        tab = {}
        for y in ctx.over(t):
            doms = sorted({T.src(a) for x in ctx.over(s) for a in ctx.lifts(x, y, phi) if a in cart})
            if len(doms) != 1:
                raise AssertionError(f"no unique cartesian lift of {phi} at {y}")
            tab[y] = doms[0]
        transition[phi] = tab
    return PosetPseudofunctor(S, posets, transition, name)


def check_topological_pseudofunctor(p: PosetPseudofunctor) -> bool:
    """The total projection is topological iff every fibre is a complete
    lattice and every transition has a left adjoint; both sides are
    computed and must agree."""
    from .topological import is_topological

    lhs = is_topological(total_category(p).context())
    rhs = all(p.fiber_poset[s].is_complete_lattice() for s in p.base.objects) and \
        all(left_adjoint_of_transition(p.pullback(phi)) is not None for phi in p.base.arrow_ids)
    if lhs != rhs:
        raise AssertionError(f"total projection topological={lhs} but lattice/adjoint condition={rhs}")
    return lhs


# -- isomorphism searches ----------------------------------------------------------


def _poset_isos(p: Poset, q: Poset):
    if len(p.elements) != len(q.elements) or len(p.le) != len(q.le):
        return
    for perm in itertools.permutations(q.elements):
        m = dict(zip(p.elements, perm))
        if all((m[a], m[b]) in q.le for a, b in p.le):
            yield m


def pseudofunctor_isomorphism(p: PosetPseudofunctor, q: PosetPseudofunctor) -> dict[str, dict[str, str]] | None:
    """Per-fibre order isomorphisms ``P(S) ≅ Q(S)`` conjugating every transition."""
    if p.base is not q.base and (set(p.base.objects) != set(q.base.objects) or set(p.base.arrows) != set(q.base.arrows)):
        return None
    objs = list(p.base.objects)
    chosen: dict[str, dict[str, str]] = {}

    def consistent() -> bool:
        for phi in p.base.arrow_ids:
            s, t = p.base.arrows[phi]
            if s in chosen and t in chosen:
                ms, mt = chosen[s], chosen[t]
                if any(ms[p.transition[phi][y]] != q.transition[phi][mt[y]] for y in p.fiber_poset[t].elements):
                    return False
        return True

    def go(i):
        if i == len(objs):
            return True
        s = objs[i]
        for m in _poset_isos(p.fiber_poset[s], q.fiber_poset[s]):
            chosen[s] = m
            if consistent() and go(i + 1):
                return True
            del chosen[s]
        return False

    return dict(chosen) if go(0) else None


def isomorphic_over(a: OverContext, b: OverContext) -> dict[str, str] | None:
    """An isomorphism ``F: a.T → b.T`` with ``b.u ∘ F = a.u``, for faithful
    functors into the same base (arrows are then fixed by the objects)."""
    if not (a.faithful and b.faithful):
        raise PreconditionError("isomorphism search over the base needs faithful functors")
    S = a.S
    if set(S.objects) != set(b.S.objects) or set(S.arrows) != set(b.S.arrows):
        return None
    xs = list(a.T.objects)
    if len(xs) != len(b.T.objects) or len(a.T.arrows) != len(b.T.arrows):
        return None
    m: dict[str, str] = {}
    used: set[str] = set()

    def hom_signature(x, y):
        return sorted(a.u.ar(h) for h in a.T.hom(x, y))

    def ok(x):
        for y in m:
            if hom_signature(x, y) != sorted(b.u.ar(h) for h in b.T.hom(m[x], m[y])):
                return False
            if hom_signature(y, x) != sorted(b.u.ar(h) for h in b.T.hom(m[y], m[x])):
                return False
        return True

    def go(i):
        if i == len(xs):
            return True
        x = xs[i]
        for y in b.over(a.u.ob(x)):
            if y in used:
                continue
            m[x] = y
            used.add(y)
            if ok(x) and go(i + 1):
                return True
            used.discard(y)
            del m[x]
        return False

    return dict(m) if go(0) else None


def round_trip_ok(p: PosetPseudofunctor) -> bool:
    """``extract(total(p)) ≅ p`` and ``total(extract(total(p))) ≅ total(p)``."""
    tc = total_category(p)
    ctx = tc.context()
    if not validate_category(tc.total).ok or not is_fibration(ctx):
        return False
    q = extract_pseudofunctor(ctx, p.name)
    if pseudofunctor_isomorphism(p, q) is None:
        return False
    return isomorphic_over(total_category(q).context(), ctx) is not None
