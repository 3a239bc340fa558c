"""Finite categories and functors given by explicit tables.

A :class:`FinCat` stores its composition as a finite lookup table, so any
finite category can be written down, concrete or not.  Identifiers are
opaque strings and equality is identifier equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping


class InputError(ValueError):
    """Unknown identifiers, mismatched anchors, malformed input."""


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple[str, ...]

    def __str__(self):
        return f"{self.kind}: " + ", ".join(self.witness)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True, eq=False)
class FinCat:
    """A finite category.

    ``arrows`` maps arrow id to ``(source, target)``; ``compose`` maps
    ``(g, f)`` to ``g∘f`` for every pair with ``target(f) == source(g)``.
    """

    objects: tuple[str, ...]
    arrows: Mapping[str, tuple[str, str]]
    identities: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]
    name: str = "C"
    _op: FinCat | None = field(default=None, repr=False, compare=False)

    # -- basic accessors -------------------------------------------------

    def src(self, a: str) -> str:
        return self.arrows[a][0]

    def tgt(self, a: str) -> str:
        return self.arrows[a][1]

    def id(self, x: str) -> str:
        return self.identities[x]

    def comp(self, g: str, f: str) -> str:
        """``g∘f`` (apply ``f`` first)."""
        try:
            return self.compose[(g, f)]
        except KeyError:
            raise InputError(f"{g} and {f} are not composable in {self.name}") from None

    def comp_path(self, *arrows: str) -> str:
        """Compose right to left: ``comp_path(h, g, f) == h∘g∘f``."""
        out = arrows[-1]
        for a in reversed(arrows[:-1]):
            out = self.comp(a, out)
        return out

    @cached_property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(self.arrows)

    @cached_property
    def _object_set(self) -> frozenset[str]:
        return frozenset(self.objects)

    def _check_object(self, x: str):
        if x not in self._object_set:
            raise InputError(f"unknown object {x!r} in {self.name}")

    @cached_property
    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        homs: dict[tuple[str, str], list[str]] = {}
        for a, (s, t) in self.arrows.items():
            homs.setdefault((s, t), []).append(a)
        return {k: tuple(sorted(v)) for k, v in homs.items()}

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        """Arrows ``x → y``, sorted by identifier."""
        self._check_object(x)
        self._check_object(y)
        return self._homs.get((x, y), ())

    @cached_property
    def _into(self) -> dict[str, tuple[str, ...]]:
        into: dict[str, list[str]] = {x: [] for x in self.objects}
        for a, (_, t) in self.arrows.items():
            into[t].append(a)
        return {x: tuple(sorted(v)) for x, v in into.items()}

    @cached_property
    def _out(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {x: [] for x in self.objects}
        for a, (s, _) in self.arrows.items():
            out[s].append(a)
        return {x: tuple(sorted(v)) for x, v in out.items()}

    def arrows_into(self, x: str) -> tuple[str, ...]:
        self._check_object(x)
        return self._into[x]

    def arrows_from(self, x: str) -> tuple[str, ...]:
        self._check_object(x)
        return self._out[x]

    def is_identity(self, a: str) -> bool:
        s, t = self.arrows[a]
        return s == t and self.identities.get(s) == a

    def inverse(self, a: str) -> str | None:
        s, t = self.arrows[a]
        for b in self.hom(t, s):
            if self.comp(b, a) == self.id(s) and self.comp(a, b) == self.id(t):
                return b
        return None

    def is_iso(self, a: str) -> bool:
        return self.inverse(a) is not None

    def isos(self) -> tuple[str, ...]:
        return tuple(a for a in self.arrow_ids if self.is_iso(a))

    @property
    def op(self) -> FinCat:
        return opposite(self)

    def subcategory(self, objects: Iterable[str], arrows: Iterable[str], name: str | None = None) -> FinCat:
        objs = tuple(objects)
        keep = set(arrows)
        arr = {a: self.arrows[a] for a in self.arrow_ids if a in keep}
        comp = {(g, f): h for (g, f), h in self.compose.items() if g in keep and f in keep}
        return FinCat(objs, arr, {x: self.identities[x] for x in objs}, comp, name or self.name)

    def full_subcategory(self, objects: Iterable[str], name: str | None = None) -> FinCat:
        objs = tuple(x for x in self.objects if x in set(objects))
        keep = {a for a, (s, t) in self.arrows.items() if s in objs and t in objs}
        return self.subcategory(objs, keep, name)

    def __repr__(self):
        return f"FinCat({self.name!r}, {len(self.objects)} objects, {len(self.arrows)} arrows)"


def make_category(objects, arrows, identities, compose, name="C") -> FinCat:
    return FinCat(tuple(objects), dict(arrows), dict(identities), dict(compose), name)


def opposite(c: FinCat) -> FinCat:
    """Swap sources and targets; ``op.comp(g, f) == c.comp(f, g)``.

    Cached on the instance, and ``opposite(opposite(c)) is c``.
    """
    cached = c.__dict__.get("_op_cache")
    if cached is not None:
        return cached
    if c._op is not None:
        return c._op
    arrows = {a: (t, s) for a, (s, t) in c.arrows.items()}
    compose = {(f, g): h for (g, f), h in c.compose.items()}
    name = c.name[:-3] if c.name.endswith("^op") else c.name + "^op"
    d = FinCat(c.objects, arrows, dict(c.identities), compose, name, _op=c)
    object.__setattr__(c, "_op_cache", d)
    return d


def validate_category(c: FinCat) -> ValidationReport:
    out: list[Violation] = []
    objs = set(c.objects)
    if len(objs) != len(c.objects):
        dup = sorted(x for x in objs if c.objects.count(x) > 1)
        out.append(Violation("duplicate object", tuple(dup)))
    for a, (s, t) in c.arrows.items():
        if s not in objs or t not in objs:
            out.append(Violation("arrow endpoint not an object", (a, s, t)))
    for x in c.objects:
        i = c.identities.get(x)
        if i is None:
            out.append(Violation("missing identity", (x,)))
        elif c.arrows.get(i) != (x, x):
            out.append(Violation("identity has wrong endpoints", (x, i)))
    if out:
        return ValidationReport(tuple(out))

    for (g, f), h in c.compose.items():
        if g not in c.arrows or f not in c.arrows or h not in c.arrows:
            out.append(Violation("composite refers to unknown arrow", (g, f, h)))
        elif c.tgt(f) != c.src(g):
            out.append(Violation("composite defined on non-composable pair", (g, f)))
        elif c.arrows[h] != (c.src(f), c.tgt(g)):
            out.append(Violation("composite has wrong endpoints", (g, f, h)))
    if out:
        return ValidationReport(tuple(out))

    for f in c.arrow_ids:
        for g in c.arrows_from(c.tgt(f)):
            if (g, f) not in c.compose:
                out.append(Violation("missing composite", (g, f)))
    if out:
        return ValidationReport(tuple(out))

    for f in c.arrow_ids:
        s, t = c.arrows[f]
        if c.compose[(f, c.id(s))] != f:
            out.append(Violation("identity law", (f, c.id(s))))
        if c.compose[(c.id(t), f)] != f:
            out.append(Violation("identity law", (c.id(t), f)))
    for f in c.arrow_ids:
        for g in c.arrows_from(c.tgt(f)):
            gf = c.compose[(g, f)]
            for h in c.arrows_from(c.tgt(g)):
                if c.compose[(h, gf)] != c.compose[(c.compose[(h, g)], f)]:
                    out.append(Violation("associativity", (h, g, f)))
    return ValidationReport(tuple(out))


@dataclass(frozen=True, eq=False)
class FunctorMap:
    source: FinCat
    target: FinCat
    obj_map: Mapping[str, str]
    arr_map: Mapping[str, str]
    name: str = "u"
    _op: FunctorMap | None = field(default=None, repr=False, compare=False)

    def ob(self, x: str) -> str:
        return self.obj_map[x]

    def ar(self, a: str) -> str:
        return self.arr_map[a]

    @property
    def op(self) -> FunctorMap:
        return opposite_functor(self)

    def __repr__(self):
        return f"FunctorMap({self.name!r}: {self.source.name} -> {self.target.name})"


def opposite_functor(u: FunctorMap) -> FunctorMap:
    cached = u.__dict__.get("_op_cache")
    if cached is not None:
        return cached
    if u._op is not None:
        return u._op
    name = u.name[:-3] if u.name.endswith("^op") else u.name + "^op"
    v = FunctorMap(u.source.op, u.target.op, u.obj_map, u.arr_map, name, _op=u)
    object.__setattr__(u, "_op_cache", v)
    return v


def identity_functor(c: FinCat) -> FunctorMap:
    return FunctorMap(c, c, {x: x for x in c.objects}, {a: a for a in c.arrow_ids}, "id")


def compose_functors(v: FunctorMap, u: FunctorMap) -> FunctorMap:
    """``v∘u``."""
    return FunctorMap(
        u.source,
        v.target,
        {x: v.ob(u.ob(x)) for x in u.source.objects},
        {a: v.ar(u.ar(a)) for a in u.source.arrow_ids},
        f"{v.name}.{u.name}",
    )


def validate_functor(u: FunctorMap) -> ValidationReport:
    c, d = u.source, u.target
    out: list[Violation] = []
    for x in c.objects:
        if x not in u.obj_map:
            out.append(Violation("object not mapped", (x,)))
        elif u.obj_map[x] not in d._object_set:
            out.append(Violation("object image unknown", (x, u.obj_map[x])))
    for a in c.arrow_ids:
        if a not in u.arr_map:
            out.append(Violation("arrow not mapped", (a,)))
        elif u.arr_map[a] not in d.arrows:
            out.append(Violation("arrow image unknown", (a, u.arr_map[a])))
    if out:
        return ValidationReport(tuple(out))
    for a in c.arrow_ids:
        s, t = c.arrows[a]
        if d.arrows[u.ar(a)] != (u.ob(s), u.ob(t)):
            out.append(Violation("endpoints not respected", (a, u.ar(a))))
    for x in c.objects:
        if u.ar(c.id(x)) != d.id(u.ob(x)):
            out.append(Violation("identity not preserved", (x, c.id(x), u.ar(c.id(x)))))
    if out:
        return ValidationReport(tuple(out))
    for (g, f), h in c.compose.items():
        if d.compose.get((u.ar(g), u.ar(f))) != u.ar(h):
            out.append(Violation("composition not preserved", (g, f)))
    return ValidationReport(tuple(out))


def is_faithful(u: FunctorMap) -> bool:
    c = u.source
    for (x, y), arrows in c._homs.items():
        if len({u.ar(a) for a in arrows}) != len(arrows):
            return False
    return True


def is_full(u: FunctorMap) -> bool:
    c, d = u.source, u.target
    for x in c.objects:
        for y in c.objects:
            if {u.ar(a) for a in c.hom(x, y)} != set(d.hom(u.ob(x), u.ob(y))):
                return False
    return True


# -- universal arrows and adjunctions ---------------------------------------


def _universal_from(u: FunctorMap, s: str) -> tuple[str, str] | None:
    """Least ``(L, η: s → u(L))`` such that ``k ↦ u(k)∘η`` is a bijection
    ``hom(L, X) ≅ hom(s, u(X))`` for every X."""
    c, d = u.source, u.target
    for L in c.objects:
        for eta in d.hom(s, u.ob(L)):
            if all(
                sorted(d.comp(u.ar(k), eta) for k in c.hom(L, X)) == list(d.hom(s, u.ob(X)))
                for X in c.objects
            ):
                return L, eta
    return None


def left_adjoint(u: FunctorMap) -> tuple[FunctorMap, dict[str, str]] | None:
    """A left adjoint of ``u`` with its unit, found through universal arrows."""
    c, d = u.source, u.target
    objs, unit = {}, {}
    for s in d.objects:
        found = _universal_from(u, s)
        if found is None:
            return None
        objs[s], unit[s] = found
    arr = {}
    for phi in d.arrow_ids:
        s, t = d.arrows[phi]
        target = d.comp(unit[t], phi)
        (k,) = [k for k in c.hom(objs[s], objs[t]) if d.comp(u.ar(k), unit[s]) == target]
        arr[phi] = k
    return FunctorMap(d, c, objs, arr, f"L({u.name})"), unit


def right_adjoint(u: FunctorMap) -> tuple[FunctorMap, dict[str, str]] | None:
    """A right adjoint of ``u`` with its counit (dual of :func:`left_adjoint`)."""
    found = left_adjoint(u.op)
    if found is None:
        return None
    g, unit = found
    r = FunctorMap(u.target, u.source, g.obj_map, g.arr_map, f"R({u.name})")
    return r, unit


def verify_adjunction(left: FunctorMap, right: FunctorMap, unit: Mapping[str, str], counit: Mapping[str, str]) -> ValidationReport:
    """Check ``left ⊣ right``: naturality of unit/counit and both triangle identities."""
    c, d = left.source, left.target  # left: c -> d, right: d -> c
    out = []
    for x in c.objects:
        if c.arrows.get(unit.get(x)) != (x, right.ob(left.ob(x))):
            out.append(Violation("unit component ill-typed", (x,)))
    for y in d.objects:
        if d.arrows.get(counit.get(y)) != (left.ob(right.ob(y)), y):
            out.append(Violation("counit component ill-typed", (y,)))
    if out:
        return ValidationReport(tuple(out))
    for a in c.arrow_ids:
        x, y = c.arrows[a]
        if c.comp(unit[y], a) != c.comp(right.ar(left.ar(a)), unit[x]):
            out.append(Violation("unit not natural", (a,)))
    for b in d.arrow_ids:
        x, y = d.arrows[b]
        if d.comp(counit[y], left.ar(right.ar(b))) != d.comp(b, counit[x]):
            out.append(Violation("counit not natural", (b,)))
    for x in c.objects:
        if d.comp(counit[left.ob(x)], left.ar(unit[x])) != d.id(left.ob(x)):
            out.append(Violation("triangle identity (left)", (x,)))
    for y in d.objects:
        if c.comp(right.ar(counit[y]), unit[right.ob(y)]) != c.id(right.ob(y)):
            out.append(Violation("triangle identity (right)", (y,)))
    return ValidationReport(tuple(out))


# -- diagrams, cones and cocones ---------------------------------------------


@dataclass(frozen=True)
class Cocone:
    """Apex plus one leg per diagram node; read as a cone in the dual checks."""

    apex: str
    legs: Mapping[str, str]

    def key(self):
        return (self.apex, tuple(sorted(self.legs.items())))


Cone = Cocone


def _shape(name, objects, arrows) -> FinCat:
    """A shape with no composable pair of non-identity arrows."""
    arr = {f"id_{x}": (x, x) for x in objects}
    arr.update(arrows)
    ids = {x: f"id_{x}" for x in objects}
    comp = {}
    for a, (s, t) in arr.items():
        comp[(ids[t], a)] = a
        comp[(a, ids[s])] = a
    return FinCat(tuple(objects), arr, ids, comp, name)


def shape_discrete(n: int) -> FinCat:
    return _shape(f"discrete{n}", [f"j{i}" for i in range(n)], {})


def shape_arrow() -> FinCat:
    return _shape("arrow", ["j0", "j1"], {"a": ("j0", "j1")})


def shape_parallel_pair() -> FinCat:
    return _shape("parallel", ["j0", "j1"], {"a": ("j0", "j1"), "b": ("j0", "j1")})


def shape_span() -> FinCat:
    return _shape("span", ["j0", "j1", "j2"], {"a": ("j0", "j1"), "b": ("j0", "j2")})


def shape_cospan() -> FinCat:
    return _shape("cospan", ["j0", "j1", "j2"], {"a": ("j1", "j0"), "b": ("j2", "j0")})


def default_shapes(max_nodes: int = 4) -> list[FinCat]:
    shapes = [shape_discrete(0), shape_discrete(1), shape_discrete(2), shape_arrow(),
              shape_parallel_pair(), shape_span(), shape_cospan(), shape_discrete(3),
              shape_discrete(4)]
    return [j for j in shapes if len(j.objects) <= max_nodes]


def diagrams(shape: FinCat, c: FinCat) -> Iterator[FunctorMap]:
    """All functors ``shape → c`` (object assignment first, then arrows)."""
    nonid = [a for a in shape.arrow_ids if not shape.is_identity(a)]
    for objs in itertools.product(c.objects, repeat=len(shape.objects)):
        om = dict(zip(shape.objects, objs))
        choices = [c.hom(om[shape.src(a)], om[shape.tgt(a)]) for a in nonid]
        for arrs in itertools.product(*choices):
            am = {shape.id(j): c.id(om[j]) for j in shape.objects}
            am.update(zip(nonid, arrs))
            d = FunctorMap(shape, c, om, am, "D")
            if all(c.compose.get((am[g], am[f])) == am[h] for (g, f), h in shape.compose.items()):
                yield d


def _is_cocone(c: FinCat, diagram: FunctorMap, apex: str, legs: Mapping[str, str]) -> bool:
    shape = diagram.source
    for j in shape.objects:
        if c.arrows.get(legs.get(j)) != (diagram.ob(j), apex):
            return False
    return all(c.comp(legs[shape.tgt(a)], diagram.ar(a)) == legs[shape.src(a)] for a in shape.arrow_ids)


def _is_cone(c: FinCat, diagram: FunctorMap, apex: str, legs: Mapping[str, str]) -> bool:
    shape = diagram.source
    for j in shape.objects:
        if c.arrows.get(legs.get(j)) != (apex, diagram.ob(j)):
            return False
    return all(c.comp(diagram.ar(a), legs[shape.src(a)]) == legs[shape.tgt(a)] for a in shape.arrow_ids)


def cocones(c: FinCat, diagram: FunctorMap, apex: str) -> list[dict[str, str]]:
    """All cocone leg assignments with the given apex (backtracking)."""
    shape = diagram.source
    nodes = list(shape.objects)
    out: list[dict[str, str]] = []
    legs: dict[str, str] = {}

    def consistent(j):
        for a in shape.arrow_ids:
            s, t = shape.arrows[a]
            if s in legs and t in legs and (s == j or t == j):
                if c.comp(legs[t], diagram.ar(a)) != legs[s]:
                    return False
        return True

    def go(i):
        if i == len(nodes):
            out.append(dict(legs))
            return
        j = nodes[i]
        for leg in c.hom(diagram.ob(j), apex):
            legs[j] = leg
            if consistent(j):
                go(i + 1)
            del legs[j]

    go(0)
    return out


def cones(c: FinCat, diagram: FunctorMap, apex: str) -> list[dict[str, str]]:
    shape = diagram.source
    nodes = list(shape.objects)
    out: list[dict[str, str]] = []
    legs: dict[str, str] = {}

    def consistent(j):
        for a in shape.arrow_ids:
            s, t = shape.arrows[a]
            if s in legs and t in legs and (s == j or t == j):
                if c.comp(diagram.ar(a), legs[s]) != legs[t]:
                    return False
        return True

    def go(i):
        if i == len(nodes):
            out.append(dict(legs))
            return
        j = nodes[i]
        for leg in c.hom(apex, diagram.ob(j)):
            legs[j] = leg
            if consistent(j):
                go(i + 1)
            del legs[j]

    go(0)
    return out


def is_colimit_cocone(c: FinCat, diagram: FunctorMap, cocone: Cocone, _counts=None) -> bool:
    """Commutes, and every cocone factors through it uniquely."""
    if not _is_cocone(c, diagram, cocone.apex, cocone.legs):
        return False
    nodes = diagram.source.objects
    for y in c.objects:
        images = {tuple(c.comp(h, cocone.legs[j]) for j in nodes) for h in c.hom(cocone.apex, y)}
        if len(images) != len(c.hom(cocone.apex, y)):
            return False
        n = _counts[y] if _counts is not None else len(cocones(c, diagram, y))
        if len(images) != n:
            return False
    return True


def is_limit_cone(c: FinCat, diagram: FunctorMap, cone: Cone, _counts=None) -> bool:
    """Commutes, and every cone factors through it uniquely."""
    if not _is_cone(c, diagram, cone.apex, cone.legs):
        return False
    nodes = diagram.source.objects
    for y in c.objects:
        images = {tuple(c.comp(cone.legs[j], h) for j in nodes) for h in c.hom(y, cone.apex)}
        if len(images) != len(c.hom(y, cone.apex)):
            return False
        n = _counts[y] if _counts is not None else len(cones(c, diagram, y))
        if len(images) != n:
            return False
    return True


def colimit_cocones(c: FinCat, diagram: FunctorMap) -> list[Cocone]:
    counts = {y: len(cocones(c, diagram, y)) for y in c.objects}
    out = []
    for apex in c.objects:
        # hom(apex, -) must have the cardinality of the cocone functor
        if any(len(c.hom(apex, y)) != counts[y] for y in c.objects):
            continue
        for legs in cocones(c, diagram, apex):
            k = Cocone(apex, legs)
            if is_colimit_cocone(c, diagram, k, counts):
                out.append(k)
    return out


def limit_cones(c: FinCat, diagram: FunctorMap) -> list[Cone]:
    counts = {y: len(cones(c, diagram, y)) for y in c.objects}
    out = []
    for apex in c.objects:
        if any(len(c.hom(y, apex)) != counts[y] for y in c.objects):
            continue
        for legs in cones(c, diagram, apex):
            k = Cocone(apex, legs)
            if is_limit_cone(c, diagram, k, counts):
                out.append(k)
    return out


def is_product(c: FinCat, apex: str, legs: tuple[str, ...]) -> bool:
    """``legs`` (an indexed family out of ``apex``) is a product cone."""
    for z in c.objects:
        targets = [c.tgt(p) for p in legs]
        images = {tuple(c.comp(p, h) for p in legs) for h in c.hom(z, apex)}
        if len(images) != len(c.hom(z, apex)):
            return False
        n = 1
        for t in targets:
            n *= len(c.hom(z, t))
        if len(images) != n:
            return False
    return True


def products(c: FinCat, factors: tuple[str, ...]) -> Iterator[tuple[str, tuple[str, ...]]]:
    """All product cones over the indexed family of objects ``factors``."""
    for apex in c.objects:
        for legs in itertools.product(*(c.hom(apex, x) for x in factors)):
            if is_product(c, apex, legs):
                yield apex, legs


def terminal_objects(c: FinCat) -> list[str]:
    return [x for x in c.objects if all(len(c.hom(y, x)) == 1 for y in c.objects)]


def initial_objects(c: FinCat) -> list[str]:
    return [x for x in c.objects if all(len(c.hom(x, y)) == 1 for y in c.objects)]


def is_thin(c: FinCat) -> bool:
    return all(len(v) <= 1 for v in c._homs.values())


def poset_category(elements: Iterable[str], leq: Iterable[tuple[str, str]], name="P") -> FinCat:
    """The category of a preorder; ``leq`` is closed reflexively and transitively."""
    elems = tuple(elements)
    rel = set(leq) | {(x, x) for x in elems}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    arrows = {f"{x}<={y}": (x, y) for x in elems for y in elems if (x, y) in rel}
    ids = {x: f"{x}<={x}" for x in elems}
    comp = {}
    for g, (y, z) in arrows.items():
        for f, (x, y2) in arrows.items():
            if y2 == y:
                comp[(g, f)] = f"{x}<={z}"
    return FinCat(elems, arrows, ids, comp, name)
