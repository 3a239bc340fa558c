"""Families of arrows, cribles, refinements and collections of families.

Families are indexed tuples of arrows sharing a codomain (``sink``) or a
domain (``source``).  Most predicates normalise a family to its set of
arrows first; a repeated member never changes epimorphy, strict epimorphy
or compatibility (take identities as test arrows).

Class-level tables (``*_masks``) evaluate a predicate on every subfamily
of ``𝕋(−, X)`` at once, indexed by bitmask over ``cat.arrows_into(X)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import masks as mk
from .fincat import FinCat, FunctorMap, InputError

SINK = "sink"
SOURCE = "source"


@dataclass(frozen=True)
class Family:
    cat: FinCat
    anchor: str
    members: tuple[str, ...]
    orientation: str = SINK
    index: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if self.orientation not in (SINK, SOURCE):
            raise InputError(f"bad orientation {self.orientation!r}")
        self.cat._check_object(self.anchor)
        end = 1 if self.orientation == SINK else 0
        for a in self.members:
            if a not in self.cat.arrows:
                raise InputError(f"unknown arrow {a!r}")
            if self.cat.arrows[a][end] != self.anchor:
                raise InputError(f"{a} is not anchored at {self.anchor} ({self.orientation})")

    def __len__(self):
        return len(self.members)

    @property
    def domains(self) -> tuple[str, ...]:
        """The non-anchor end of each member."""
        end = 0 if self.orientation == SINK else 1
        return tuple(self.cat.arrows[a][end] for a in self.members)

    def op(self) -> Family:
        flipped = SOURCE if self.orientation == SINK else SINK
        return Family(self.cat.op, self.anchor, self.members, flipped, self.index)

    def normalized(self) -> Family:
        return normalize_family(self)

    def arrowset(self) -> frozenset[str]:
        return frozenset(self.members)

    def __repr__(self):
        arrow = "->" if self.orientation == SINK else "<-"
        return f"Family({self.anchor} {arrow} [{', '.join(self.members)}])"


def sink(cat: FinCat, anchor: str, members: Iterable[str]) -> Family:
    return Family(cat, anchor, tuple(members), SINK)


def source(cat: FinCat, anchor: str, members: Iterable[str]) -> Family:
    return Family(cat, anchor, tuple(members), SOURCE)


def normalize_family(f: Family) -> Family:
    """Drop repeated members; canonical order is identifier order."""
    return Family(f.cat, f.anchor, tuple(sorted(set(f.members))), f.orientation)


def hom_family(c: FinCat, x: str) -> Family:
    """``𝕋(−, X)``: every arrow into ``x``."""
    return sink(c, x, c.arrows_into(x))


def _require_sink(*fams: Family):
    for f in fams:
        if f.orientation != SINK:
            raise InputError(f"{f} must be sink-oriented")


# -- refinement and cribles ------------------------------------------------------


@dataclass(frozen=True)
class Refinement:
    index_map: tuple[int, ...]
    connectors: tuple[str, ...]


def refines(g: Family, f: Family) -> Refinement | None:
    """Least witness that ``g`` refines ``f``: every ``g_λ`` factors as
    ``f_{α(λ)} ∘ connector(λ)``."""
    _require_sink(g, f)
    if g.anchor != f.anchor or g.cat is not f.cat:
        raise InputError("refinement needs families over the same anchor")
    c = f.cat
    index_map, connectors = [], []
    for gl in g.members:
        found = None
        for alpha, fa in enumerate(f.members):
            for k in c.hom(c.src(gl), c.src(fa)):
                if c.comp(fa, k) == gl:
                    found = (alpha, k)
                    break
            if found:
                break
        if found is None:
            return None
        index_map.append(found[0])
        connectors.append(found[1])
    return Refinement(tuple(index_map), tuple(connectors))


def _factors_through(c: FinCat, a: str, members: Iterable[str]) -> bool:
    z = c.src(a)
    for f in members:
        for k in c.hom(z, c.src(f)):
            if c.comp(f, k) == a:
                return True
    return False


def crible_of(f: Family) -> Family:
    """``P(f)``: arrows into the anchor factoring through some member."""
    _require_sink(f)
    c = f.cat
    members = tuple(a for a in c.arrows_into(f.anchor) if _factors_through(c, a, f.members))
    return sink(c, f.anchor, members)


def is_crible(f: Family) -> bool:
    _require_sink(f)
    c = f.cat
    ms = set(f.members)
    return all(c.comp(a, z) in ms for a in ms for z in c.arrows_into(c.src(a)))


def pullback_crible(y_to_x: str, f: Family) -> Family:
    """Largest r-pullback of ``f`` along ``y_to_x``: the arrows ``z`` into
    ``Y`` for which ``y_to_x ∘ z`` factors through a member."""
    _require_sink(f)
    c = f.cat
    if c.tgt(y_to_x) != f.anchor:
        raise InputError(f"{y_to_x} does not land on {f.anchor}")
    y = c.src(y_to_x)
    members = tuple(z for z in c.arrows_into(y) if _factors_through(c, c.comp(y_to_x, z), f.members))
    return sink(c, y, members)


def is_r_pullback(g: Family, y_to_x: str, f: Family) -> bool:
    _require_sink(g, f)
    c = f.cat
    if g.anchor != c.src(y_to_x) or c.tgt(y_to_x) != f.anchor:
        raise InputError("r-pullback endpoints mismatch")
    composite = sink(c, f.anchor, (c.comp(y_to_x, gl) for gl in g.members))
    return refines(composite, f) is not None


def compose_families(f: Family, inner: Sequence[Family] | Mapping[int, Family]) -> Family:
    """``{f_α ∘ g_{α,β}}`` indexed by pairs ``(α, β)``."""
    _require_sink(f)
    c = f.cat
    members, index = [], []
    for alpha, fa in enumerate(f.members):
        g = inner[alpha]
        _require_sink(g)
        if g.cat is not c or g.anchor != c.src(fa):
            raise InputError(f"inner family {alpha} is not anchored at the domain of {fa}")
        for beta, gb in enumerate(g.members):
            members.append(c.comp(fa, gb))
            index.append((alpha, beta))
    return Family(c, f.anchor, tuple(members), SINK, tuple(index))


def is_pullback_square(c: FinCat, top: str, left: str, right: str, bottom: str) -> bool:
    """Square ``right∘top == bottom∘left`` with the pullback property."""
    p, a = c.arrows[top]
    p2, b = c.arrows[left]
    a2, x = c.arrows[right]
    b2, x2 = c.arrows[bottom]
    if p != p2 or a != a2 or b != b2 or x != x2:
        return False
    if c.comp(right, top) != c.comp(bottom, left):
        return False
    for q in c.objects:
        for qa in c.hom(q, a):
            for qb in c.hom(q, b):
                if c.comp(right, qa) != c.comp(bottom, qb):
                    continue
                n = sum(1 for h in c.hom(q, p) if c.comp(top, h) == qa and c.comp(left, h) == qb)
                if n != 1:
                    return False
    return True


# -- (strict) epimorphic families and compatibility ------------------------------


def is_epi_family(f: Family) -> bool:
    _require_sink(f)
    c, x = f.cat, f.anchor
    ms = sorted(set(f.members))
    for y in c.objects:
        hs = c.hom(x, y)
        for g, h in itertools.combinations(hs, 2):
            if all(c.comp(g, a) == c.comp(h, a) for a in ms):
                return False
    return True


def is_mono_family(f: Family) -> bool:
    if f.orientation != SOURCE:
        raise InputError(f"{f} must be source-oriented")
    return is_epi_family(f.op())


def _spans(c: FinCat, members: Sequence[str]) -> list[tuple[int, int, str, str]]:
    """All ``(α, β, x_α, x_β)`` with ``α ≤ β`` and ``f_α x_α == f_β x_β``."""
    out = []
    doms = [c.src(a) for a in members]
    for z in c.objects:
        for i, fa in enumerate(members):
            for j in range(i, len(members)):
                fb = members[j]
                for xa in c.hom(z, doms[i]):
                    fxa = c.comp(fa, xa)
                    for xb in c.hom(z, doms[j]):
                        if c.comp(fb, xb) == fxa:
                            out.append((i, j, xa, xb))
    return out


def is_compatible(g: Family, f: Family) -> bool:
    """``g`` is compatible with ``f`` (same indices and domains)."""
    _require_sink(g, f)
    if len(g) != len(f) or g.domains != f.domains or g.cat is not f.cat:
        raise InputError("compatibility needs equally indexed families with equal domains")
    c = f.cat
    for i, j, xa, xb in _spans(c, f.members):
        if c.comp(g.members[i], xa) != c.comp(g.members[j], xb):
            return False
    return True


def compatible_families(f: Family, y: str) -> list[tuple[str, ...]]:
    """Every family into ``y`` compatible with ``f`` (backtracking search)."""
    _require_sink(f)
    c = f.cat
    members = list(f.members)
    spans = _spans(c, members)
    by_last: dict[int, list[tuple[int, int, str, str]]] = {}
    for s in spans:
        by_last.setdefault(s[1], []).append(s)
    domains = [c.hom(c.src(a), y) for a in members]
    out: list[tuple[str, ...]] = []
    chosen: list[str] = []

    def go(k):
        if k == len(members):
            out.append(tuple(chosen))
            return
        for g in domains[k]:
            chosen.append(g)
            if all(c.comp(chosen[i], xa) == c.comp(chosen[j], xb) for i, j, xa, xb in by_last.get(k, ())):
                go(k + 1)
            chosen.pop()

    go(0)
    return out


def _strict_epi(c: FinCat, x: str, members: Sequence[str]) -> bool:
    f = sink(c, x, members)
    for y in c.objects:
        hs = c.hom(x, y)
        for gs in compatible_families(f, y):
            n = sum(1 for h in hs if all(c.comp(h, a) == ga for a, ga in zip(members, gs)))
            if n != 1:
                return False
    return True


def is_strict_epi_family(f: Family) -> bool:
    """Every compatible family factors through ``f`` by a unique arrow."""
    _require_sink(f)
    return _strict_epi(f.cat, f.anchor, tuple(sorted(set(f.members))))


def is_strict_mono_family(f: Family) -> bool:
    if f.orientation != SOURCE:
        raise InputError(f"{f} must be source-oriented")
    return is_strict_epi_family(f.op())


def mediator(f: Family, g: Family) -> str | None:
    """Least ``h`` with ``h∘f_α == g_α`` for all α, when unique."""
    _require_sink(f, g)
    c = f.cat
    hs = [h for h in c.hom(f.anchor, g.anchor)
          if all(c.comp(h, a) == b for a, b in zip(f.members, g.members))]
    return hs[0] if len(hs) == 1 else None


# -- class-level tables ------------------------------------------------------------


class FamilySpace:
    """All subfamilies of the arrows into (sink) or out of (source) an anchor."""

    def __init__(self, cat: FinCat, anchor: str, orientation: str = SINK):
        self.cat, self.anchor, self.orientation = cat, anchor, orientation
        self.members = cat.arrows_into(anchor) if orientation == SINK else cat.arrows_from(anchor)
        self.bit = {a: i for i, a in enumerate(self.members)}

    @property
    def n(self) -> int:
        return len(self.members)

    def family(self, m: int) -> Family:
        return Family(self.cat, self.anchor, tuple(self.members[i] for i in mk.bits_of(int(m))), self.orientation)

    def mask(self, f: Family) -> int:
        return mk.mask_of(self.bit[a] for a in f.members)


@lru_cache(maxsize=None)
def space(cat: FinCat, anchor: str, orientation: str = SINK) -> FamilySpace:
    return FamilySpace(cat, anchor, orientation)


@lru_cache(maxsize=None)
def crible_masks(c: FinCat, x: str) -> np.ndarray:
    """``crible_masks(c, x)[m]`` is the mask of ``P(family m)``."""
    sp = space(c, x)
    principal = [mk.mask_of(sp.bit[b] for b in sp.members if _factors_through(c, b, (a,))) for a in sp.members]
    return mk.union_table(principal)


@lru_cache(maxsize=None)
def epi_masks(c: FinCat, x: str) -> np.ndarray:
    sp = space(c, x)
    tests = []
    for y in c.objects:
        agreements = [mk.mask_of(i for i, a in enumerate(sp.members) if c.comp(g, a) == c.comp(h, a))
                      for g, h in itertools.combinations(c.hom(x, y), 2)]
        tests.append((None, 0, agreements))
    return mk.bijection_masks(sp.n, tests)


@lru_cache(maxsize=None)
def strict_epi_masks(c: FinCat, x: str) -> np.ndarray:
    """Strict epimorphy of every subfamily of ``𝕋(−, x)``.

    Compatible families over ``f`` correspond to cocones on the crible
    ``P(f)``, so the verdict depends on ``P(f)`` alone; one generating
    family per distinct crible is checked directly.
    """
    sp = space(c, x)
    crib = crible_masks(c, x)
    uniq, first, inverse = np.unique(crib, return_index=True, return_inverse=True)
    verdicts = np.array([_strict_epi(c, x, sp.family(int(m)).members) for m in first], dtype=bool)
    return verdicts[inverse.reshape(-1)]


def mono_masks(c: FinCat, x: str) -> np.ndarray:
    return epi_masks(c.op, x)


def strict_mono_masks(c: FinCat, x: str) -> np.ndarray:
    return strict_epi_masks(c.op, x)


def image_masks(u: FunctorMap, x: str, orientation: str = SINK) -> np.ndarray:
    """Mask of the image family ``u(f)`` in the base, for each subfamily ``f``."""
    sp = space(u.source, x, orientation)
    base = space(u.target, u.ob(x), orientation)
    return mk.remap_table(sp.n, [base.bit[u.ar(a)] for a in sp.members])


# -- collections -------------------------------------------------------------------


@dataclass(frozen=True)
class Collection:
    """An object-indexed class of sink families, given by a membership test.

    Collections are closed under dropping repeated members; ``repeatable``
    says whether they are also closed under repeating one, which decides
    whether a member may carry several inner families in a composite.
    ``bound`` caps the family size used when a property quantifies over
    the collection; ``tables`` optionally evaluates membership on every
    subfamily of ``𝕋(−, X)`` at once.
    """

    name: str
    member: Callable[[Family], bool]
    bound: int | None = None
    tables: Callable[[FinCat, str], np.ndarray] | None = field(default=None, compare=False)
    repeatable: bool = True

    def __contains__(self, f: Family) -> bool:
        return self.member(f)


def iso_collection() -> Collection:
    def member(f):
        return len(set(f.members)) == 1 and f.cat.is_iso(f.members[0])
    # (i, i) is not an isomorphism family, so repeats are not allowed
    return Collection("Iso", member, repeatable=False)


def epi_collection() -> Collection:
    return Collection("Epi", is_epi_family, tables=epi_masks)


def strict_epi_collection() -> Collection:
    return Collection("sE", is_strict_epi_family, tables=strict_epi_masks)


def collection_intersection(a: Collection, b: Collection) -> Collection:
    tables = None
    if a.tables and b.tables:
        def tables(c, x):
            return a.tables(c, x) & b.tables(c, x)
    bound = min((v for v in (a.bound, b.bound) if v is not None), default=None)
    return Collection(f"({a.name} & {b.name})", lambda f: a.member(f) and b.member(f), bound, tables,
                      a.repeatable and b.repeatable)


def membership_table(a: Collection, c: FinCat, x: str) -> np.ndarray:
    if a.tables is not None:
        t = np.array(a.tables(c, x), dtype=bool)
    else:
        sp = space(c, x)
        t = np.array([a.member(sp.family(m)) for m in range(1 << sp.n)], dtype=bool)
    if a.bound is not None:
        t &= mk.popcount(mk.all_masks(space(c, x).n)) <= a.bound
    return t


def collection_s(a: Collection) -> Collection:
    """``s𝒜``: families refined by some 𝒜-family."""
    def member(f):
        _require_sink(f)
        crib = crible_of(f).members
        sizes = range(len(crib) + 1) if a.bound is None else range(min(a.bound, len(crib)) + 1)
        return any(a.member(sink(f.cat, f.anchor, sub)) for k in sizes for sub in itertools.combinations(crib, k))

    def tables(c, x):
        return mk.subset_closure(membership_table(a, c, x))[crible_masks(c, x)]

    return Collection(f"s{a.name}", member, a.bound, tables)


def _pullback_candidates(c: FinCat, y_to_x: str, fa: str) -> set[str]:
    """Arrows ``g`` into ``Y`` completing a pullback square with ``fa`` along ``y_to_x``."""
    out = set()
    y = c.src(y_to_x)
    for g in c.arrows_into(y):
        for top in c.hom(c.src(g), c.src(fa)):
            if is_pullback_square(c, top, g, fa, y_to_x):
                out.add(g)
                break
    return out


def collection_pi(a: Collection) -> Collection:
    """``π𝒜``: index-wise pullbacks of 𝒜-families along some ``Y → X``."""
    def member(g):
        _require_sink(g)
        c, y = g.cat, g.anchor
        gs = set(g.members)
        for x in c.objects:
            table = membership_table(a, c, x)
            sp = space(c, x)
            for y_to_x in c.hom(y, x):
                cand = {fa: _pullback_candidates(c, y_to_x, fa) for fa in sp.members}
                for m in np.flatnonzero(table):
                    fs = sp.family(int(m)).members
                    if all(cand[fa] & gs for fa in fs) and all(any(gl in cand[fa] for fa in fs) for gl in gs):
                        return True
        return False

    return Collection(f"pi{a.name}", member, a.bound)


def _union_closure(values: Iterable[int]) -> set[int]:
    out = set(values)
    frontier = set(out)
    while frontier:
        new = {p | q for p in frontier for q in out} - out
        out |= new
        frontier = new
    return out


def _composite_masks(a_table: np.ndarray, b_tables: Mapping[str, np.ndarray], c: FinCat, x: str,
                     repeatable: bool = True) -> dict[int, set[int]]:
    """For each 𝒜-family over ``x``: every mask of ``{f_α ∘ g}`` composites.
    When 𝒜 allows repeated members a member may carry any nonempty set of
    ℬ-families, otherwise exactly one."""
    sp = space(c, x)
    per_member = {}
    for i, fa in enumerate(sp.members):
        inner = space(c, c.src(fa))
        remap = mk.remap_table(inner.n, [sp.bit[c.comp(fa, z)] for z in inner.members])
        imgs = {int(remap[m]) for m in np.flatnonzero(b_tables[c.src(fa)])}
        per_member[i] = _union_closure(imgs) if repeatable else imgs
    out = {}
    for m in np.flatnonzero(a_table):
        reach = {0}
        for i in mk.bits_of(int(m)):
            reach = {r | s for r in reach for s in per_member[i]}
            if not reach:
                break
        out[int(m)] = reach
    return out


def collection_compose(a: Collection, b: Collection) -> Collection:
    """``𝒜∘ℬ``: composites of an 𝒜-family with ℬ-families on its domains."""
    def tables(c, x):
        a_table = membership_table(a, c, x)
        b_tables = {z: membership_table(b, c, z) for z in c.objects}
        t = np.zeros(1 << space(c, x).n, dtype=bool)
        for reach in _composite_masks(a_table, b_tables, c, x, a.repeatable).values():
            for r in reach:
                t[r] = True
        return t

    def member(f):
        _require_sink(f)
        return bool(tables(f.cat, f.anchor)[space(f.cat, f.anchor).mask(normalize_family(f))])

    return Collection(f"({a.name} o {b.name})", member, None, tables, a.repeatable)


@dataclass
class CollectionProperties:
    I: bool
    C: bool
    U: bool
    S: bool
    F: bool
    exact: bool
    witnesses: dict[str, tuple] = field(default_factory=dict)

    def flags(self) -> dict[str, bool]:
        return {"I": self.I, "C": self.C, "U": self.U, "S": self.S, "F": self.F}


def check_collection_properties(a: Collection, c: FinCat) -> CollectionProperties:
    """Decide (I), (C), (U), (S), (F) by exhaustive quantification."""
    tables = {x: membership_table(a, c, x) for x in c.objects}
    down = {x: mk.subset_closure(tables[x]) for x in c.objects}
    cribs = {x: crible_masks(c, x) for x in c.objects}
    wit: dict[str, tuple] = {}

    prop_i = True
    for x in c.objects:
        sp = space(c, x)
        for a_ in sp.members:
            if c.is_iso(a_) and not tables[x][1 << sp.bit[a_]]:
                prop_i = False
                wit.setdefault("I", (a_,))

    prop_c = True
    for x in c.objects:
        sp = space(c, x)
        for m, reach in _composite_masks(tables[x], tables, c, x, a.repeatable).items():
            bad = [r for r in reach if not tables[x][r]]
            if bad:
                prop_c = False
                wit.setdefault("C", (sp.family(m).members, sp.family(min(bad)).members))
                break

    prop_s = True
    for x in c.objects:
        s_table = down[x][cribs[x]]
        bad = np.flatnonzero(s_table & ~tables[x])
        if bad.size:
            prop_s = False
            wit.setdefault("S", space(c, x).family(int(bad[0])).members)

    prop_u = True
    for x in c.objects:
        sp = space(c, x)
        members = np.flatnonzero(tables[x])
        member_cribs = np.unique(cribs[x][members])
        for y_to_x in c.arrows_into(x):
            y = c.src(y_to_x)
            sy = space(c, y)
            # bit of y_to_x ∘ z in 𝕋(−, x), for each z into y
            shifts = [sp.bit[c.comp(y_to_x, z)] for z in sy.members]
            for crib in member_cribs:
                pb = mk.mask_of(k for k, s in enumerate(shifts) if (int(crib) >> s) & 1)
                if not down[y][pb]:
                    prop_u = False
                    wit.setdefault("U", (y_to_x, sp.family(int(crib)).members))
                    break

    prop_f = True
    for x in c.objects:
        member_cribs = np.unique(cribs[x][np.flatnonzero(tables[x])])
        for p, q in itertools.combinations_with_replacement(member_cribs.tolist(), 2):
            if not down[x][p & q]:
                prop_f = False
                wit.setdefault("F", (space(c, x).family(p).members, space(c, x).family(q).members))
                break

    return CollectionProperties(prop_i, prop_c, prop_u, prop_s, prop_f, a.bound is None, wit)
