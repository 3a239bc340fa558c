"""Small hand-sized categories, posets and functors used across the corpus."""
from __future__ import annotations

import itertools

from ..fincat import FinCat, FunctorMap, poset_category
from ..grothendieck import Poset


def terminal(name: str = "1") -> FinCat:
    return FinCat(("*",), {"id*": ("*", "*")}, {"*": "id*"}, {("id*", "id*"): "id*"}, name)


def discrete(objects, name: str = "D") -> FinCat:
    objs = tuple(objects)
    arrows = {f"id{x}": (x, x) for x in objs}
    return FinCat(objs, arrows, {x: f"id{x}" for x in objs}, {(f"id{x}", f"id{x}"): f"id{x}" for x in objs}, name)


def chain(objects, name: str = "Chain") -> FinCat:
    objs = tuple(objects)
    return poset_category(objs, [(a, b) for a, b in itertools.combinations(objs, 2)], name)


def parallel_pair(name: str = "Par") -> FinCat:
    arrows = {"ida": ("a", "a"), "idb": ("b", "b"), "f": ("a", "b"), "g": ("a", "b")}
    comp = {("ida", "ida"): "ida", ("idb", "idb"): "idb"}
    for h in ("f", "g"):
        comp[(h, "ida")] = h
        comp[("idb", h)] = h
    return FinCat(("a", "b"), arrows, {"a": "ida", "b": "idb"}, comp, name)


def idempotent_monoid(name: str = "Idem") -> FinCat:
    """One object, arrows ``1`` and ``e`` with ``e∘e = e``."""
    comp = {("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "e", ("e", "e"): "e"}
    return FinCat(("m",), {"1": ("m", "m"), "e": ("m", "m")}, {"m": "1"}, comp, name)


def product(c: FinCat, d: FinCat, name: str | None = None) -> FinCat:
    def pair(a, b):
        return f"({a},{b})"

    objs = tuple(pair(x, y) for x in c.objects for y in d.objects)
    arrows = {pair(f, g): (pair(c.src(f), d.src(g)), pair(c.tgt(f), d.tgt(g)))
              for f in c.arrow_ids for g in d.arrow_ids}
    ids = {pair(x, y): pair(c.id(x), d.id(y)) for x in c.objects for y in d.objects}
    comp = {(pair(f1, g1), pair(f2, g2)): pair(h1, h2)
            for (f1, f2), h1 in c.compose.items() for (g1, g2), h2 in d.compose.items()}
    return FinCat(objs, arrows, ids, comp, name or f"{c.name}x{d.name}")


def first_projection(c: FinCat, d: FinCat, name: str = "pr") -> FunctorMap:
    p = product(c, d)
    om = {f"({x},{y})": x for x in c.objects for y in d.objects}
    am = {f"({f},{g})": f for f in c.arrow_ids for g in d.arrow_ids}
    return FunctorMap(p, c, om, am, name)


def collapse(c: FinCat, name: str = "collapse") -> FunctorMap:
    one = terminal()
    return FunctorMap(c, one, {x: "*" for x in c.objects}, {a: "id*" for a in c.arrow_ids}, name)


def poset_functor(t: Poset, s: Poset, table: dict[str, str], tname: str, sname: str, name: str = "u") -> FunctorMap:
    """A monotone map viewed as a functor between poset categories."""
    tc, sc = t.category(tname), s.category(sname)
    am = {f"{a}<={b}": f"{table[a]}<={table[b]}" for a, b in t.le}
    return FunctorMap(tc, sc, dict(table), am, name)


# fibre pool: name -> (elements, covering pairs)
FIBERS: dict[str, tuple[tuple[str, ...], tuple[tuple[str, str], ...]]] = {
    "point": (("0",), ()),
    "chain2": (("0", "1"), (("0", "1"),)),
    "chain3": (("0", "1", "2"), (("0", "1"), ("1", "2"))),
    "antichain2": (("a", "b"), ()),
    "V": (("0", "a", "b"), (("0", "a"), ("0", "b"))),
    "Lambda": (("a", "b", "1"), (("a", "1"), ("b", "1"))),
    "square": (("0", "a", "b", "1"), (("0", "a"), ("0", "b"), ("a", "1"), ("b", "1"))),
}


def fiber_poset(kind: str) -> Poset:
    elems, edges = FIBERS[kind]
    return Poset.from_hasse(elems, edges)
