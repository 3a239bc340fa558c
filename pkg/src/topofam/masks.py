"""Bitmask tables over all subfamilies of a finite member list.

A family drawn from ``n`` candidate members is an integer mask in
``range(2**n)``; every table here is a numpy array indexed by that mask.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

MAX_BITS = 24


def check_width(n: int):
    if n > MAX_BITS:
        raise ValueError(f"{n} members exceed the {MAX_BITS}-bit enumeration limit")


def all_masks(n: int) -> np.ndarray:
    check_width(n)
    return np.arange(1 << n, dtype=np.int64)


def bits_of(m: int) -> list[int]:
    out, i = [], 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(masks: np.ndarray) -> np.ndarray:
    out = np.zeros(masks.shape, dtype=np.int64)
    m = masks.copy()
    while m.any():
        out += m & 1
        m >>= 1
    return out


def union_table(values: Sequence[int]) -> np.ndarray:
    """``t[m] = OR of values[i] for i in m``."""
    n = len(values)
    check_width(n)
    t = np.zeros(1 << n, dtype=np.int64)
    for i, v in enumerate(values):
        t[1 << i: 1 << (i + 1)] = t[: 1 << i] | int(v)
    return t


def product_table(values: Sequence[int], cap: int) -> np.ndarray:
    """``t[m] = min(cap, prod of values[i] for i in m)``."""
    n = len(values)
    check_width(n)
    t = np.ones(1 << n, dtype=np.int64)
    for i, v in enumerate(values):
        t[1 << i: 1 << (i + 1)] = np.minimum(t[: 1 << i] * int(v), cap)
    return t


def within(masks: np.ndarray, allowed: int) -> np.ndarray:
    """``masks ⊆ allowed``, elementwise."""
    return (masks & ~np.int64(allowed)) == 0


def subset_closure(flags: np.ndarray) -> np.ndarray:
    """``out[m] = any(flags[s] for s ⊆ m)`` (sum over subsets)."""
    f = flags.astype(bool).copy()
    n = int(f.size).bit_length() - 1
    for i in range(n):
        v = f.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    return f


def proper_subset_exists(flags: np.ndarray) -> np.ndarray:
    """``out[m] = any(flags[s] for s ⊊ m)``."""
    closed = subset_closure(flags)
    n = int(flags.size).bit_length() - 1
    masks = np.arange(flags.size, dtype=np.int64)
    out = np.zeros(flags.size, dtype=bool)
    for i in range(n):
        has = (masks >> i) & 1 == 1
        out[has] |= closed[masks[has] ^ (1 << i)]
    return out


def remap_table(n: int, targets: Sequence[int | None]) -> np.ndarray:
    """Mask over ``n`` members to mask over a second index space, bit by bit."""
    return union_table([0 if t is None else 1 << t for t in targets])


def bijection_masks(n: int, tests: Iterable[tuple[Sequence[int] | None, int, Iterable[int]]]) -> np.ndarray:
    """Families passing every test of a unique-factorisation property.

    Each test is ``(counts, mediators, agreements)``: the comparison map from
    the ``mediators`` candidate arrows to the product of ``counts[i]`` choices
    per member must be a bijection.  ``agreements`` lists, for each pair of
    distinct candidates, the mask of members on which the two agree; the map
    fails to be injective on a family contained in one of them.  ``counts``
    may be ``None`` when only injectivity is asked for.
    """
    masks = all_masks(n)
    ok = np.ones(masks.size, dtype=bool)
    for counts, mediators, agreements in tests:
        if counts is not None:
            prod = product_table(counts, mediators + 1)
            ok &= prod == mediators
        for e in agreements:
            ok &= ~within(masks, e)
    return ok
