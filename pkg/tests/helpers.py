"""Shared test utilities: group corpora and seeded randomness."""

from __future__ import annotations

import itertools
import os

from abeltiles.groups import Group, closure_mask, mask_indices

SEED = int(os.environ.get("ABELTILES_TEST_SEED", "94089"))


def _partitions(n: int) -> list[list[int]]:
    if n == 0:
        return [[]]
    out = []

    def rec(remaining, largest, acc):
        if remaining == 0:
            out.append(list(acc))
            return
        for part in range(min(remaining, largest), 0, -1):
            acc.append(part)
            rec(remaining - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return out


def all_abelian_groups(max_order: int, min_order: int = 1) -> list[Group]:
    """One Group per isomorphism type of each order in range, in primary form."""
    out = []
    for n in range(min_order, max_order + 1):
        fac = {}
        m, d = n, 2
        while d * d <= m:
            while m % d == 0:
                fac[d] = fac.get(d, 0) + 1
                m //= d
            d += 1
        if m > 1:
            fac[m] = fac.get(m, 0) + 1
        per_prime = [[tuple(p**e for e in part) for part in _partitions(k)] for p, k in fac.items()]
        for combo in itertools.product(*per_prime) if per_prime else [()]:
            factors = tuple(f for block in combo for f in block)
            out.append(Group(factors if factors else (1,)))
    return out


def all_subgroup_masks(group: Group) -> list[int]:
    """Every subgroup carrier, by closure growth over the lattice."""
    seen = {1}
    frontier = [1]
    while frontier:
        s = frontier.pop()
        for g in range(1, group.order):
            if not (s >> g) & 1:
                bigger = closure_mask(group, list(mask_indices(s)) + [g])
                if bigger not in seen:
                    seen.add(bigger)
                    frontier.append(bigger)
    return sorted(seen)


def subset_tuples(group: Group, mask_or_subset) -> frozenset:
    """Library subset -> coordinate-tuple set for the oracles."""
    bits = mask_or_subset if isinstance(mask_or_subset, int) else mask_or_subset.bits
    return frozenset(group.coords_of(i) for i in mask_indices(bits))
