"""Finite truncations of Set, Top and Filt.

Sets are ``{0, …, n-1}`` for ``n ≤ max_size``.  A map ``n → m`` is named
``"n->m:"`` followed by its image digits, e.g. ``"2->2:10"`` swaps the
points.  Structured objects carry a family of subsets; a map is a
morphism when preimages of the target's members are members of the
source's family.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterable

from ..fibered import OverContext
from ..fincat import FinCat, FunctorMap, InputError

Subset = frozenset
Structure = frozenset  # a frozenset of subsets


def _check_size(max_size: int, hi: int):
    if not 1 <= max_size <= hi:
        raise InputError(f"max_size must be between 1 and {hi}, got {max_size}")


def _maps(n: int, m: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(m), repeat=n))


def _map_name(src: str, tgt: str, images: tuple[int, ...]) -> str:
    return f"{src}->{tgt}:" + "".join(str(i) for i in images)


def build_finset(max_size: int = 2) -> FinCat:
    """Skeleton of finite sets of size ``0..max_size`` with all functions."""
    _check_size(max_size, 3)
    objs = [str(n) for n in range(max_size + 1)]
    arrows, comp, ids = {}, {}, {}
    table = {}
    for n in range(max_size + 1):
        for m in range(max_size + 1):
            for f in _maps(n, m):
                a = _map_name(str(n), str(m), f)
                arrows[a] = (str(n), str(m))
                table[a] = (n, m, f)
        ids[str(n)] = _map_name(str(n), str(n), tuple(range(n)))
    for g, (m, k, gi) in table.items():
        for f, (n, m2, fi) in table.items():
            if m2 == m:
                comp[(g, f)] = _map_name(str(n), str(k), tuple(gi[i] for i in fi))
    return FinCat(tuple(objs), arrows, ids, comp, "FinSet")


def subsets(n: int) -> list[Subset]:
    return [Subset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]


def topologies(n: int) -> list[Structure]:
    full, empty = Subset(range(n)), Subset()
    middle = [s for s in subsets(n) if s not in (full, empty)]
    out = []
    for k in range(len(middle) + 1):
        for extra in itertools.combinations(middle, k):
            opens = {empty, full, *extra}
            if all(a | b in opens and a & b in opens for a in opens for b in opens):
                out.append(Structure(opens))
    return out


def filters(n: int) -> list[Structure]:
    """Nonempty, upward closed, intersection closed families of subsets
    (the improper filter of all subsets included)."""
    subs = subsets(n)
    out = []
    for k in range(1, len(subs) + 1):
        for fam in itertools.combinations(subs, k):
            fs = set(fam)
            if all(b in fs for a in fs for b in subs if a <= b) and all(a & b in fs for a in fs for b in fs):
                out.append(Structure(fs))
    return out


def structure_name(n: int, st: Structure) -> str:
    members = sorted(st, key=lambda s: (len(s), sorted(s)))
    body = ",".join("".join(str(i) for i in sorted(s)) or "-" for s in members)
    return f"{n}[{body}]"


def _preimage(f: tuple[int, ...], s: Subset) -> Subset:
    return Subset(i for i, v in enumerate(f) if v in s)


def build_structured(max_size: int, structures: Callable[[int], Iterable[Structure]], name: str) -> OverContext:
    """Sets with a family of subsets; morphisms pull members back to members."""
    base = build_finset(max_size)
    objs: list[tuple[str, int, Structure]] = []
    for n in range(max_size + 1):
        for st in sorted(structures(n), key=lambda s: structure_name(n, s)):
            objs.append((structure_name(n, st), n, st))
    arrows, table, ids, obj_map, arr_map = {}, {}, {}, {}, {}
    for x, n, sx in objs:
        obj_map[x] = str(n)
        for y, m, sy in objs:
            for f in _maps(n, m):
                if all(_preimage(f, v) in sx for v in sy):
                    a = _map_name(x, y, f)
                    arrows[a] = (x, y)
                    table[a] = (x, y, f)
                    arr_map[a] = _map_name(str(n), str(m), f)
        ids[x] = _map_name(x, x, tuple(range(n)))
    comp = {}
    for g, (y, z, gi) in table.items():
        for f, (x, y2, fi) in table.items():
            if y2 == y:
                comp[(g, f)] = _map_name(x, z, tuple(gi[i] for i in fi))
    total = FinCat(tuple(o for o, _, _ in objs), arrows, ids, comp, name)
    return OverContext(FunctorMap(total, base, obj_map, arr_map, "forget"))


def build_fintop(max_size: int = 2) -> OverContext:
    _check_size(max_size, 2)
    return build_structured(max_size, topologies, "FinTop")


def build_finfilt(max_size: int = 2) -> OverContext:
    _check_size(max_size, 2)
    return build_structured(max_size, filters, "FinFilt")
