"""Tiling verification and exhaustive enumeration.

A tiling pair is a factorization G = Omega + T (every element uniquely a sum).
Verification has three independent routes (difference sets, Fourier zero sets,
convolution); enumeration of complements is exact-cover backtracking over
translates, branching on the least-index uncovered element.

Search budgets are node counts, not wall time, for reproducibility.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceededError, InputError, MixedGroupError
from .groups import (
    Group,
    GroupSubset,
    Subgroup,
    mask_indices,
    subgroup_from_carrier,
)

DEFAULT_NODE_BUDGET = 10**8

ROUTES = ("difference", "zeroset", "convolution")


class NodeBudget:
    """Mutable node counter shared across the searches of one operation."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int = DEFAULT_NODE_BUDGET):
        self.limit = limit
        self.used = 0

    @staticmethod
    def ensure(budget: "NodeBudget | int | None") -> "NodeBudget":
        if budget is None:
            return NodeBudget()
        if isinstance(budget, int):
            return NodeBudget(budget)
        return budget

    def spend(self, count: int, what: str = "search") -> None:
        self.used += count
        if self.used > self.limit:
            raise BudgetExceededError(self.used, self.limit, what)

    def snapshot(self) -> dict:
        return {"nodes_used": self.used, "node_limit": self.limit}


# -- basic set operations -------------------------------------------------------


def difference_mask(group: Group, mask: int) -> int:
    out = 0
    neg = group.neg
    for a in mask_indices(mask):
        out |= group.translate(mask, neg(a))
    return out


def difference_set(a: GroupSubset) -> GroupSubset:
    """The set {x - y : x, y in A}; contains 0, closed under negation."""
    if a.bits == 0:
        raise InputError("difference set of the empty set")
    return GroupSubset(a.group, difference_mask(a.group, a.bits))


def periods_mask(group: Group, mask: int) -> int:
    out = 1
    ops = group.rotation_ops()
    for g in range(1, group.order):
        m = mask
        for low, up, down in ops[g]:
            m = ((m & low) << up) | ((m & ~low) >> down)
        if m == mask:
            out |= 1 << g
    return out


def periods(a: GroupSubset) -> Subgroup:
    """Stabilizer subgroup {g : A + g = A}, computed by direct scan."""
    if a.bits == 0:
        raise InputError("periods of the empty set")
    return subgroup_from_carrier(a.group, periods_mask(a.group, a.bits))


def is_periodic_mask(group: Group, mask: int) -> bool:
    ops = group.rotation_ops()
    for g in range(1, group.order):
        m = mask
        for low, up, down in ops[g]:
            m = ((m & low) << up) | ((m & ~low) >> down)
        if m == mask:
            return True
    return False


def dilate(a: GroupSubset, k: int) -> GroupSubset:
    """The set {k*x : x in A}; duplicates collapse."""
    return a.dilate(k)


# -- tiling pair verification ---------------------------------------------------


def _is_tiling_difference(group: Group, om: int, tm: int) -> bool:
    if om == 0 or tm == 0:
        return False
    if om.bit_count() * tm.bit_count() != group.order:
        return False
    return difference_mask(group, om) & difference_mask(group, tm) == 1


def _is_tiling_zeroset(group: Group, om: int, tm: int) -> bool:
    if om == 0 or tm == 0:
        return False
    if om.bit_count() * tm.bit_count() != group.order:
        return False
    from .fourier import zero_set_mask

    return zero_set_mask(group, om) | zero_set_mask(group, tm) == group.full_mask ^ 1


def _is_tiling_convolution(group: Group, om: int, tm: int) -> bool:
    n = group.order
    counts = [0] * n
    om_idx = list(mask_indices(om))
    add = group.add
    for t in mask_indices(tm):
        for w in om_idx:
            counts[add(w, t)] += 1
    return all(c == 1 for c in counts)


def is_tiling_pair(omega: GroupSubset, t: GroupSubset, route: str = "difference") -> bool:
    """Whether G = Omega + T is a factorization, by the chosen route.

    All routes give identical verdicts; 'difference' is the fastest.
    """
    if omega.group != t.group:
        raise MixedGroupError("tiling pair across different groups")
    group = omega.group
    if route == "difference":
        return _is_tiling_difference(group, omega.bits, t.bits)
    if route == "zeroset":
        return _is_tiling_zeroset(group, omega.bits, t.bits)
    if route == "convolution":
        return _is_tiling_convolution(group, omega.bits, t.bits)
    raise InputError(f"unknown route {route!r}; expected one of {ROUTES}")


def is_tiling_masks(group: Group, om: int, tm: int) -> bool:
    return _is_tiling_difference(group, om, tm)


@dataclass(frozen=True)
class TilingPair:
    """A verified factorization G = omega + t."""

    omega: GroupSubset
    t: GroupSubset
    normalized: bool

    @staticmethod
    def verified(omega: GroupSubset, t: GroupSubset) -> "TilingPair":
        if not is_tiling_pair(omega, t):
            raise InputError("not a tiling pair")
        normalized = 0 in omega and 0 in t
        return TilingPair(omega, t, normalized)

    @property
    def group(self) -> Group:
        return self.omega.group

    def to_dict(self) -> dict:
        return {"omega": list(self.omega.indices()), "t": list(self.t.indices())}


# -- exact-cover complement enumeration ----------------------------------------


def iter_complement_masks(
    group: Group,
    omega_bits: int,
    budget: NodeBudget | int | None = None,
) -> Iterator[int]:
    """Yield bitsets T with 0 in T and Omega + T an exact partition of G.

    Backtracking: pick the least-index uncovered element x, branch over the
    translates t in x - Omega whose copy of Omega is disjoint from the region
    covered so far.  The translate at 0 is forced first, so every solution is
    normalized.  Yield order follows the choice sequence, not subset order.
    """
    n = group.order
    full = group.full_mask
    k = omega_bits.bit_count()
    if k == 0 or n % k:
        return
    bud = NodeBudget.ensure(budget)
    if omega_bits == full:
        bud.spend(1, "complement enumeration")
        yield 1
        return

    translate = group.translate
    om_idx = list(mask_indices(omega_bits))
    sub_tab = group.sub_table()
    tmasks: list[int | None] = [None] * n
    tmasks[0] = omega_bits
    cands: list[tuple[int, ...] | None] = [None] * n

    def cands_for(x: int) -> tuple[int, ...]:
        if sub_tab is not None:
            row = x * n
            return tuple(sorted(sub_tab[row + w] for w in om_idx))
        return tuple(sorted(group.sub(x, w) for w in om_idx))

    covered = omega_bits
    u = ~covered & full
    x0 = (u & -u).bit_length() - 1
    c0 = cands[x0] = cands_for(x0)
    # frame: [candidates, next_candidate_position, covered_before, bit_of_choice_that_opened_frame]
    stack: list[list] = [[c0, 0, covered, 1]]
    nodes = 0
    try:
        while stack:
            frame = stack[-1]
            cl = frame[0]
            i = frame[1]
            cov = frame[2]
            descended = False
            while i < len(cl):
                t = cl[i]
                i += 1
                nodes += 1
                if nodes >= 4096:
                    pending, nodes = nodes, 0
                    bud.spend(pending, "complement enumeration")
                m = tmasks[t]
                if m is None:
                    m = translate(omega_bits, t)
                    tmasks[t] = m
                if m & cov:
                    continue
                newcov = cov | m
                if newcov == full:
                    frame[1] = i
                    acc = 1 << t
                    for fr in stack:
                        acc |= fr[3]
                    yield acc
                    continue
                frame[1] = i
                u = ~newcov & full
                x = (u & -u).bit_length() - 1
                cx = cands[x]
                if cx is None:
                    cx = cands[x] = cands_for(x)
                stack.append([cx, 0, newcov, 1 << t])
                descended = True
                break
            if not descended:
                stack.pop()
    finally:
        pending, nodes = nodes, 0
        if pending:
            bud.spend(pending, "complement enumeration")


def has_complement(group: Group, omega_bits: int, budget: NodeBudget | int | None = None) -> bool:
    """Feasibility-only exact cover; same branching as the enumerator."""
    n = group.order
    full = group.full_mask
    k = omega_bits.bit_count()
    if k == 0 or n % k:
        return False
    if omega_bits == full:
        return True
    bud = NodeBudget.ensure(budget)
    translate = group.translate
    om_idx = list(mask_indices(omega_bits))
    sub_tab = group.sub_table()
    tmasks: list[int | None] = [None] * n
    cands: list[tuple[int, ...] | None] = [None] * n
    nodes = 0

    def rec(cov: int) -> bool:
        nonlocal nodes
        u = ~cov & full
        x = (u & -u).bit_length() - 1
        cl = cands[x]
        if cl is None:
            if sub_tab is not None:
                row = x * n
                cl = tuple(sub_tab[row + w] for w in om_idx)
            else:
                cl = tuple(group.sub(x, w) for w in om_idx)
            cands[x] = cl
        for t in cl:
            nodes += 1
            m = tmasks[t]
            if m is None:
                m = translate(omega_bits, t)
                tmasks[t] = m
            if not (m & cov):
                newcov = cov | m
                if newcov == full or rec(newcov):
                    return True
        return False

    try:
        return rec(omega_bits)
    finally:
        if nodes:
            bud.spend(nodes, "cover feasibility")


def enumerate_complements(
    omega: GroupSubset,
    normalize: bool = True,
    budget: NodeBudget | int | None = None,
) -> list[GroupSubset]:
    """All tiling complements of a subset, sorted lexicographically.

    With normalize=True only complements containing 0 are returned; otherwise
    the translation closure of the normalized list, deduplicated.
    """
    group = omega.group
    if omega.cardinality == 0 or group.order % omega.cardinality:
        raise InputError("|G| must be divisible by |Omega|")
    masks = sorted(iter_complement_masks(group, omega.bits, budget))
    if not normalize:
        seen = set()
        for m in masks:
            for g in range(group.order):
                seen.add(group.translate(m, g))
        masks = sorted(seen)
    out = [GroupSubset(group, m) for m in masks]
    out.sort(key=GroupSubset.sort_key)
    return out


# -- exhaustive tile / tiling enumeration ---------------------------------------

# Caches keyed by (factors, size).  Masks are plain ints, so entries are
# group-presentation specific but instance independent.
_TILE_CACHE: dict[tuple[tuple[int, ...], int], list[int]] = {}
_PAIR_CACHE: dict[tuple[tuple[int, ...], int], dict[int, list[int]]] = {}


def clear_enumeration_caches() -> None:
    _TILE_CACHE.clear()
    _PAIR_CACHE.clear()


def _mask_sort_key(mask: int) -> tuple[int, ...]:
    return tuple(mask_indices(mask))


def _small_side_pairs(group: Group, size: int, budget: NodeBudget) -> dict[int, list[int]]:
    """Tiles of a size <= sqrt-side with their full normalized complement lists."""
    key = (group.factors, size)
    cached = _PAIR_CACHE.get(key)
    if cached is not None:
        return cached
    n = group.order
    pairs: dict[int, list[int]] = {}
    if size == 1:
        pairs[1] = [group.full_mask]
    elif size == n:
        pairs[group.full_mask] = [1]
    else:
        bits = [1 << c for c in range(n)]
        for combo in itertools.combinations(range(1, n), size - 1):
            mask = 1
            for c in combo:
                mask |= bits[c]
            budget.spend(1, "tile enumeration")
            if has_complement(group, mask, budget):
                pairs[mask] = sorted(iter_complement_masks(group, mask, budget))
    _PAIR_CACHE[key] = pairs
    return pairs


def tiling_pair_index(
    group: Group, size: int, budget: NodeBudget | int | None = None
) -> dict[int, list[int]]:
    """Map from every normalized tile of the given size to its normalized complements.

    The small side of the factorization is enumerated by brute candidates plus
    exact cover; the large side is obtained by inverting the small side's
    complement lists (every large tile is a complement of a small one).
    """
    n = group.order
    if size < 1 or n % size:
        raise InputError(f"size {size} does not divide |G| = {n}")
    key = (group.factors, size)
    cached = _PAIR_CACHE.get(key)
    if cached is not None:
        return cached
    bud = NodeBudget.ensure(budget)
    small = min(size, n // size)
    base = _small_side_pairs(group, small, bud)
    if size == small:
        return base
    inverted: dict[int, list[int]] = {}
    for tmask, sols in base.items():
        for om in sols:
            inverted.setdefault(om, []).append(tmask)
    for om in inverted:
        inverted[om].sort()
    _PAIR_CACHE[key] = inverted
    return inverted


def tiles_of_size(group: Group, size: int, budget: NodeBudget | int | None = None) -> list[int]:
    """All normalized tiles of one size, sorted by element tuple."""
    key = (group.factors, size)
    cached = _TILE_CACHE.get(key)
    if cached is None:
        index = tiling_pair_index(group, size, budget)
        cached = sorted(index, key=_mask_sort_key)
        _TILE_CACHE[key] = cached
    return cached


def all_tiles(group: Group, budget: NodeBudget | int | None = None) -> Iterator[tuple[int, int]]:
    """Every normalized tile as (size, mask), sizes ascending, lexicographic within."""
    bud = NodeBudget.ensure(budget)
    for size in _divisors(group.order):
        for mask in tiles_of_size(group, size, bud):
            yield size, mask


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def enumerate_tilings(
    group: Group,
    size_filter: int | None = None,
    budget: NodeBudget | int | None = None,
    exhaustive_bound: int = 40,
) -> Iterator[TilingPair]:
    """Stream every normalized factorization G = Omega + T as ordered pairs.

    Deterministic order: |Omega| ascending over divisors of |G| (or the single
    size_filter), then Omega lexicographic, then T lexicographic.
    """
    if group.order > exhaustive_bound:
        raise InputError(
            f"group order {group.order} exceeds the exhaustive enumeration bound "
            f"{exhaustive_bound}; raise it explicitly to proceed"
        )
    if size_filter is not None and (size_filter < 1 or group.order % size_filter):
        raise InputError(f"size filter {size_filter} does not divide |G| = {group.order}")
    bud = NodeBudget.ensure(budget)
    sizes = [size_filter] if size_filter is not None else _divisors(group.order)
    for size in sizes:
        index = tiling_pair_index(group, size, bud)
        for om in sorted(index, key=_mask_sort_key):
            omega = GroupSubset(group, om)
            for tm in sorted(index[om], key=_mask_sort_key):
                yield TilingPair(omega, GroupSubset(group, tm), True)
