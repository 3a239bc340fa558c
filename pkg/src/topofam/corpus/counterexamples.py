"""Hand-built and searched models separating the fibred notions.

The two searches enumerate candidates in a fixed order and return the
first hit, so a search always rediscovers the same model.  Their
results are frozen as golden files; the corpus loads those files and
the test suite checks that the searches still reproduce them.
"""
from __future__ import annotations

import itertools
from typing import Iterator

from ..fibered import OverContext, fibration_verdict
from ..fincat import FinCat, FunctorMap
from ..grothendieck import Poset, PosetPseudofunctor, total_category
from ..topological import is_pretopological, is_topological
from . import small
from .random_models import monotone_maps

# -- bounded searches ----------------------------------------------------------------


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Fibre sizes summing to ``n``, every part at least zero, in lexicographic order."""
    for cut in itertools.product(range(n + 1), repeat=parts):
        if sum(cut) == n:
            yield cut


def _labelled_posets(elements: list[str], allowed: list[tuple[str, str]]) -> Iterator[Poset]:
    """Posets whose strict part is a transitively closed subset of ``allowed``."""
    for k in range(len(allowed) + 1):
        for strict in itertools.combinations(allowed, k):
            rel = set(strict)
            if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
                continue
            if any((b, a) in rel for a, b in rel):
                continue
            yield Poset(tuple(elements), frozenset(rel | {(x, x) for x in elements}))


def search_prefibration_not_fibration(max_size: int = 5) -> tuple[FunctorMap, int] | None:
    """First poset over the chain ``r < s < t`` whose projection is a
    prefibration but not a fibration.  Returns the functor and the number
    of candidates examined, or ``None`` when the bound is exhausted."""
    base = Poset.from_hasse(("r", "s", "t"), [("r", "s"), ("s", "t")])
    level = {"r": 0, "s": 1, "t": 2}
    examined = 0
    for n in range(1, max_size + 1):
        for sizes in _compositions(n, 3):
            elements = [f"{b}{i}" for b, k in zip("rst", sizes) for i in range(k)]
            over = {x: x[0] for x in elements}
            allowed = [(a, b) for a in elements for b in elements
                       if a != b and level[over[a]] <= level[over[b]]]
            for poset in _labelled_posets(elements, allowed):
                examined += 1
                u = small.poset_functor(poset, base, over, "T", "Chain3", "u")
                verdict = fibration_verdict(OverContext(u))
                if verdict.prefibration and not verdict.fibration:
                    return u, examined
    return None


def search_pretopological_not_topological(max_size: int = 5) -> tuple[PosetPseudofunctor, int] | None:
    """First pseudofunctor over the interval ``s < t`` whose total projection
    is pretopological but not topological."""
    base = small.chain(("s", "t"), "I")
    examined = 0
    for n in range(2, max_size + 1):
        for ks, kt in ((a, n - a) for a in range(1, n)):
            es = [str(i) for i in range(ks)]
            et = [str(i) for i in range(kt)]
            for ps in _labelled_posets(es, [(a, b) for a, b in itertools.permutations(es, 2)]):
                for pt in _labelled_posets(et, [(a, b) for a, b in itertools.permutations(et, 2)]):
                    for table in monotone_maps(pt, ps):
                        examined += 1
                        p = PosetPseudofunctor(base, {"s": ps, "t": pt}, {
                            "s<=s": {x: x for x in es}, "t<=t": {y: y for y in et}, "s<=t": table}, "P")
                        ctx = total_category(p).context()
                        if is_pretopological(ctx) and not is_topological(ctx):
                            return p, examined
    return None


# -- hand-built models -------------------------------------------------------------


def antichain_over_point() -> FunctorMap:
    """Two objects with only identities, over the terminal category."""
    return small.collapse(small.discrete(("x", "y"), "Antichain"), "u")


def collapse_parallel_pair() -> FunctorMap:
    """Both arrows of a parallel pair sent to the single arrow of the interval."""
    par = small.parallel_pair()
    base = small.chain(("0", "1"), "I")
    return FunctorMap(par, base, {"a": "0", "b": "1"},
                      {"ida": "0<=0", "idb": "1<=1", "f": "0<=1", "g": "0<=1"}, "u")


def missing_lift() -> FunctorMap:
    """A single object over the top of the interval; nothing lies over the bottom."""
    base = small.chain(("0", "1"), "I")
    return FunctorMap(small.terminal("Pt"), base, {"*": "1"}, {"id*": "1<=1"}, "u")


def v_fiber_no_top() -> FunctorMap:
    """Discrete base ``{s, t}``; the fibre over ``s`` is the V-shaped poset
    ``0 < a, 0 < b`` (no top) and the fibre over ``t`` is a point."""
    fibres = {"s": small.fiber_poset("V"), "t": small.fiber_poset("point")}
    base = small.discrete(("s", "t"), "D2")
    trans = {"ids": {x: x for x in fibres["s"].elements}, "idt": {"0": "0"}}
    return _named_projection(PosetPseudofunctor(base, fibres, trans, "Vfib"))


def lambda_fiber() -> FunctorMap:
    """One fibre shaped ``a < 1, b < 1`` over the terminal category: a top
    exists but there is no bottom and no meet of ``a`` and ``b``."""
    lam = small.fiber_poset("Lambda")
    return small.poset_functor(lam, Poset(("*",), frozenset({("*", "*")})),
                               {x: "*" for x in lam.elements}, "Lambda", "1", "u")


def _named_projection(p: PosetPseudofunctor) -> FunctorMap:
    u = total_category(p).projection
    return FunctorMap(u.source, u.target, u.obj_map, u.arr_map, "u")


def lattice_pseudofunctor() -> PosetPseudofunctor:
    """2-chains over both ends of the interval, identity transition."""
    c2 = small.fiber_poset("chain2")
    base = small.chain(("s", "t"), "I")
    ident = {"0": "0", "1": "1"}
    return PosetPseudofunctor(base, {"s": c2, "t": c2}, {"s<=s": ident, "t<=t": ident, "s<=t": ident}, "LatticeChains")


def antichain_fiber_pseudofunctor() -> PosetPseudofunctor:
    """Like :func:`lattice_pseudofunctor` but the fibre over ``t`` is a two-element antichain."""
    base = small.chain(("s", "t"), "I")
    return PosetPseudofunctor(base, {"s": small.fiber_poset("chain2"), "t": small.fiber_poset("antichain2")},
                              {"s<=s": {"0": "0", "1": "1"}, "t<=t": {"a": "a", "b": "b"},
                               "s<=t": {"a": "1", "b": "1"}}, "AntichainFiber")


def opposite_context(u: FunctorMap) -> OverContext:
    return OverContext(u).op


def base_of(u: FunctorMap) -> FinCat:
    return u.target
