"""Exhaustive deciders for group-level tiling properties and tile classification.

The deciders (periodic-tiling, uniform variants, everything-periodic,
proper-subgroup containment) sweep every normalized tile or pair within an
exhaustive bound.  A false verdict always carries a re-checkable
counterexample; a budget overrun yields the verdict None ("unknown"), never
a guess.  Alongside the sweeps, `known_classification` evaluates the shipped
closed-form classification tables, which separate published assertions from
machine-verified facts in reports.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExceededError, InputError
from .groups import Group, GroupElement, GroupSubset, mask_indices, _prime_factorization
from .tiling import (
    NodeBudget,
    difference_mask,
    is_periodic_mask,
    periods_mask,
    tiling_pair_index,
    _divisors,
    _mask_sort_key,
)

DEFAULT_EXHAUSTIVE_BOUND = 40


# -- tile classification ----------------------------------------------------------


@dataclass(frozen=True)
class TileClassification:
    """Periodicity flags of one tile against its full complement list."""

    periodic: bool
    uniformly_periodic: bool
    dual_uniformly_periodic: bool
    witness_period: GroupElement | None
    witness_replacement: GroupSubset | None
    complements_seen: int
    no_common_period_witnesses: tuple[GroupSubset, ...] = ()

    def to_dict(self) -> dict:
        return {
            "periodic": self.periodic,
            "uniformly_periodic": self.uniformly_periodic,
            "dual_uniformly_periodic": self.dual_uniformly_periodic,
            "witness_period": None if self.witness_period is None else self.witness_period.literal(),
            "witness_replacement": None
            if self.witness_replacement is None
            else list(self.witness_replacement.indices()),
            "complements_seen": self.complements_seen,
        }


# Periodic members of one complement list with their difference bitsets;
# keyed by the anchor complement so repeated classifications share the pool.
_DUAL_POOL_CACHE: dict[tuple[tuple[int, ...], int], tuple[tuple[int, int], ...]] = {}
_DIFF_CACHE: dict[tuple[tuple[int, ...], int], int] = {}


def clear_classification_caches() -> None:
    _DUAL_POOL_CACHE.clear()
    _DIFF_CACHE.clear()


def _difference_mask_cached(group: Group, mask: int) -> int:
    key = (group.factors, mask)
    d = _DIFF_CACHE.get(key)
    if d is None:
        d = difference_mask(group, mask)
        _DIFF_CACHE[key] = d
    return d


def _dual_candidate_pool(group: Group, t0: int, bud: NodeBudget) -> tuple[tuple[int, int], ...]:
    key = (group.factors, t0)
    pool = _DUAL_POOL_CACHE.get(key)
    if pool is None:
        members = tiling_pair_index(group, t0.bit_count(), bud)[t0]
        pool = tuple(
            (c, difference_mask(group, c))
            for c in members
            if periods_mask(group, c) != 1
        )
        _DUAL_POOL_CACHE[key] = pool
    return pool


def classify_tile(
    omega: GroupSubset,
    budget: NodeBudget | int | None = None,
    require: str = "both",
) -> TileClassification:
    """Classify a tile from its full normalized complement list.

    Uniform periodicity intersects the period groups of all complements
    incrementally (with early failure).  The dual flag starts from the
    periodic members of the first complement's own complement list and drops
    a candidate once its difference set meets the accumulated union of the
    complements' difference sets; a candidate tiles with every complement
    exactly when that intersection stays trivial.  With require="any" the
    scan stops as soon as both flags are settled false, which only ever
    truncates bookkeeping, not the verdict.
    """
    group = omega.group
    bud = NodeBudget.ensure(budget)
    om = omega.bits
    size = om.bit_count()
    if size == 0 or group.order % size:
        raise InputError("subset size does not divide the group order")
    index = tiling_pair_index(group, size, bud)
    comps = index.get(om)
    if not comps:
        raise InputError("the given set is not a tile (no complement exists)")

    translate = group.translate
    periodic = periods_mask(group, om) != 1

    t0 = comps[0]
    candidates = list(_dual_candidate_pool(group, t0, bud))

    common: int | None = None
    uniform_alive = True
    shrinkers: list[int] = []
    union_diffs = 1
    seen = 0
    for t in comps:
        seen += 1
        bud.spend(1, "tile classification")
        if uniform_alive:
            if common is None:
                common = periods_mask(group, t)
                shrinkers.append(t)
            else:
                kept = 1
                for p in mask_indices(common ^ 1):
                    if translate(t, p) == t:
                        kept |= 1 << p
                if kept != common:
                    shrinkers.append(t)
                common = kept
            if common == 1:
                uniform_alive = False
        if candidates and t != t0:
            # members of the pool tile with t0 by construction; filter the rest
            union_diffs |= _difference_mask_cached(group, t)
            candidates = [(c, d) for c, d in candidates if d & union_diffs == 1]
        if require == "any" and not uniform_alive and not candidates:
            break

    uniform = uniform_alive and common is not None and common != 1
    dual = bool(candidates)
    witness_period = None
    if uniform:
        nz = common ^ 1
        witness_period = GroupElement(group, (nz & -nz).bit_length() - 1)
    witness_replacement = GroupSubset(group, min(c for c, _ in candidates)) if dual else None
    return TileClassification(
        periodic=periodic,
        uniformly_periodic=uniform,
        dual_uniformly_periodic=dual,
        witness_period=witness_period,
        witness_replacement=witness_replacement,
        complements_seen=seen,
        no_common_period_witnesses=tuple(GroupSubset(group, s) for s in shrinkers),
    )


# -- property verdicts ------------------------------------------------------------


@dataclass(frozen=True)
class PropertyVerdict:
    property: str
    group: str
    holds: bool | None  # None = unknown (budget exhausted)
    certificate: dict | None
    budget: dict
    citation: str | None = None

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "property": self.property,
            "holds": self.holds,
            "certificate": self.certificate,
            "budget": self.budget,
            "citation": self.citation,
        }


def canonical_tile_mask(group: Group, mask: int) -> int:
    """Least translate of the set that contains 0 (class representative)."""
    best = None
    neg = group.neg
    for a in mask_indices(mask):
        t = group.translate(mask, neg(a))
        if best is None or t < best:
            best = t
    return best if best is not None else mask


def _check_exhaustive_bound(group: Group, bound: int) -> None:
    if group.order > bound:
        raise InputError(
            f"group order {group.order} exceeds the exhaustive bound {bound}; "
            "raise the bound explicitly for a longer run"
        )


def _trivial_group_verdict(group: Group, prop: str, bud: NodeBudget) -> PropertyVerdict | None:
    # the trivial group has every property vacuously: its only factorization
    # is ({0}, {0}) and there is no nonzero element to demand a period from
    if group.order == 1:
        return PropertyVerdict(prop, group.spec(), True, {"tiles_checked": 1}, bud.snapshot())
    return None


def _table_citation(group: Group, holds: bool | None) -> str | None:
    """Citation tag when the shipped tables agree with a computed verdict."""
    if holds is None:
        return None
    verdict = known_classification(group.invariant_factors())
    if verdict.status == "Unknown":
        return None
    if (verdict.status == "PT") == holds:
        return verdict.citation
    return None


def check_pt(
    group: Group,
    budget: NodeBudget | int | None = None,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> PropertyVerdict:
    """Periodic tiling property: every non-periodic tile has a periodic complement.

    Tiles are swept up to translation (the property is translation invariant).
    """
    _check_exhaustive_bound(group, exhaustive_bound)
    bud = NodeBudget.ensure(budget)
    spec = group.spec()
    trivial = _trivial_group_verdict(group, "PT", bud)
    if trivial is not None:
        return trivial
    periodic_cache: dict[int, bool] = {}

    def periodic(m: int) -> bool:
        v = periodic_cache.get(m)
        if v is None:
            v = is_periodic_mask(group, m)
            periodic_cache[m] = v
        return v

    tiles_checked = 0
    try:
        for size in _divisors(group.order):
            index = tiling_pair_index(group, size, bud)
            for om in sorted(index, key=_mask_sort_key):
                if canonical_tile_mask(group, om) != om:
                    continue
                tiles_checked += 1
                bud.spend(1, "PT sweep")
                if periodic(om):
                    continue
                comps = index[om]
                if not any(periodic(t) for t in comps):
                    cert = {
                        "omega": list(mask_indices(om)),
                        "t": list(mask_indices(comps[0])),
                        "complements_scanned": len(comps),
                    }
                    return PropertyVerdict(
                        "PT", spec, False, cert, bud.snapshot(), _table_citation(group, False)
                    )
    except BudgetExceededError:
        return PropertyVerdict("PT", spec, None, None, bud.snapshot())
    return PropertyVerdict(
        "PT", spec, True, {"tiles_checked": tiles_checked}, bud.snapshot(), _table_citation(group, True)
    )


def check_upt(
    group: Group,
    budget: NodeBudget | int | None = None,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> PropertyVerdict:
    """Uniform periodic tiling property: every tile is uniformly periodic or
    dual uniformly periodic."""
    _check_exhaustive_bound(group, exhaustive_bound)
    bud = NodeBudget.ensure(budget)
    spec = group.spec()
    trivial = _trivial_group_verdict(group, "UPT", bud)
    if trivial is not None:
        return trivial
    tiles_checked = 0
    try:
        for size in _divisors(group.order):
            index = tiling_pair_index(group, size, bud)
            for om in sorted(index, key=_mask_sort_key):
                if canonical_tile_mask(group, om) != om:
                    continue
                tiles_checked += 1
                cls = classify_tile(GroupSubset(group, om), bud, require="any")
                if not cls.uniformly_periodic and not cls.dual_uniformly_periodic:
                    cert = {
                        "omega": list(mask_indices(om)),
                        "no_common_period_witnesses": [
                            list(w.indices()) for w in cls.no_common_period_witnesses
                        ],
                        "complements_seen": cls.complements_seen,
                        "complements_total": len(index[om]),
                    }
                    return PropertyVerdict("UPT", spec, False, cert, bud.snapshot())
    except BudgetExceededError:
        return PropertyVerdict("UPT", spec, None, None, bud.snapshot())
    return PropertyVerdict("UPT", spec, True, {"tiles_checked": tiles_checked}, bud.snapshot())


def check_hajos(
    group: Group,
    budget: NodeBudget | int | None = None,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> PropertyVerdict:
    """Everything-periodic property: in every factorization a factor is periodic."""
    _check_exhaustive_bound(group, exhaustive_bound)
    bud = NodeBudget.ensure(budget)
    spec = group.spec()
    trivial = _trivial_group_verdict(group, "Hajos", bud)
    if trivial is not None:
        return trivial
    periodic_cache: dict[int, bool] = {}

    def periodic(m: int) -> bool:
        v = periodic_cache.get(m)
        if v is None:
            v = is_periodic_mask(group, m)
            periodic_cache[m] = v
        return v

    pairs_checked = 0
    try:
        for size in _divisors(group.order):
            index = tiling_pair_index(group, size, bud)
            for om in sorted(index, key=_mask_sort_key):
                if canonical_tile_mask(group, om) != om:
                    continue
                om_periodic = periodic(om)
                for t in index[om]:
                    pairs_checked += 1
                    bud.spend(1, "factor-periodicity sweep")
                    if not om_periodic and not periodic(t):
                        cert = {"omega": list(mask_indices(om)), "t": list(mask_indices(t))}
                        return PropertyVerdict("Hajos", spec, False, cert, bud.snapshot())
    except BudgetExceededError:
        return PropertyVerdict("Hajos", spec, None, None, bud.snapshot())
    return PropertyVerdict(
        "Hajos",
        spec,
        True,
        {"pairs_checked": pairs_checked},
        bud.snapshot(),
        hajos_list_member(group.invariant_factors()),
    )


def maximal_subgroup_masks(group: Group) -> list[int]:
    """Carriers of the subgroups of prime index (kernels of prime-order characters)."""
    out = set()
    n = group.order
    for g in range(1, n):
        o = group.order_of(g)
        if _is_prime(o):
            k = 0
            for x in range(n):
                if group.pairing_exponent(g, x) == 0:
                    k |= 1 << x
            out.add(k)
    return sorted(out)


def check_redei(
    group: Group,
    budget: NodeBudget | int | None = None,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> PropertyVerdict:
    """Containment property: in every normalized factorization, one factor lies
    in a proper subgroup (equivalently in some maximal subgroup)."""
    _check_exhaustive_bound(group, exhaustive_bound)
    bud = NodeBudget.ensure(budget)
    spec = group.spec()
    trivial = _trivial_group_verdict(group, "Redei", bud)
    if trivial is not None:
        return trivial
    maximal = maximal_subgroup_masks(group)
    pairs_checked = 0
    try:
        for size in _divisors(group.order):
            index = tiling_pair_index(group, size, bud)
            for om in sorted(index, key=_mask_sort_key):
                om_in = any(om & ~k == 0 for k in maximal)
                for t in index[om]:
                    pairs_checked += 1
                    bud.spend(1, "containment sweep")
                    if not om_in and not any(t & ~k == 0 for k in maximal):
                        cert = {"omega": list(mask_indices(om)), "t": list(mask_indices(t))}
                        return PropertyVerdict("Redei", spec, False, cert, bud.snapshot())
    except BudgetExceededError:
        return PropertyVerdict("Redei", spec, None, None, bud.snapshot())
    return PropertyVerdict("Redei", spec, True, {"pairs_checked": pairs_checked}, bud.snapshot())


# -- closed-form classification tables --------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _validate_chain(factors: tuple[int, ...]) -> tuple[int, ...]:
    chain = tuple(int(f) for f in factors if int(f) != 1)
    for a, b in zip(chain, chain[1:]):
        if b % a:
            raise InputError(f"invariant factors must form a divisibility chain, got {factors}")
    return chain


def _primary_partitions(chain: tuple[int, ...]) -> dict[int, list[int]]:
    """Per-prime exponent partitions, sorted descending."""
    parts: dict[int, list[int]] = {}
    for d in chain:
        for p, e in _prime_factorization(d).items():
            parts.setdefault(p, []).append(e)
    for p in parts:
        parts[p].sort(reverse=True)
    return parts


def _cyclic_pt_status(n: int) -> bool:
    """Cyclic classification: at most one squared prime, or exactly two primes
    both squared and nothing else."""
    exps = sorted(_prime_factorization(n).values(), reverse=True)
    squared = sum(1 for e in exps if e >= 2)
    if squared <= 1:
        return True
    return exps == [2, 2]


def _dominated(lam: list[int], mu: list[int]) -> bool:
    """Partition embedding: Z_{p^lam} is a subgroup of Z_{p^mu} coordinatewise."""
    if len(lam) > len(mu):
        return False
    return all(a <= b for a, b in zip(lam, mu))


_PT_FAMILY_TAG = "square-free extension of {Z_2^5, Z_p^3, Z_{p^n} x Z_p, Z_8 x Z_2^2, Z_4 x Z_2^3}"


def _in_pt_p_group_family(p: int, lam: list[int]) -> bool:
    if _dominated(lam, [1, 1, 1]):  # Z_p^3
        return True
    if len(lam) <= 2 and (len(lam) < 2 or lam[1] <= 1):  # Z_{p^n} x Z_p
        return True
    if p == 2:
        if _dominated(lam, [1, 1, 1, 1, 1]):  # Z_2^5
            return True
        if _dominated(lam, [3, 1, 1]):  # Z_8 x Z_2^2
            return True
        if _dominated(lam, [2, 1, 1, 1]):  # Z_4 x Z_2^3
            return True
    return False


@dataclass(frozen=True)
class ClassificationVerdict:
    status: str  # "PT" | "NotPT" | "Unknown"
    citation: str

    def to_dict(self) -> dict:
        return {"status": self.status, "citation": self.citation}


def known_classification(factors: tuple[int, ...] | list[int]) -> ClassificationVerdict:
    """Closed-form periodic-tiling classification from the shipped tables.

    Input is a canonical invariant-factor chain.  Cyclic groups are fully
    classified; non-cyclic groups fall back to the square-free-extension
    family (positive) and the known obstructions (negative), else Unknown.
    """
    chain = _validate_chain(tuple(factors))
    if len(chain) <= 1:
        n = chain[0] if chain else 1
        if _cyclic_pt_status(n):
            return ClassificationVerdict("PT", "cyclic: at most one squared prime, or exactly p^2 q^2")
        return ClassificationVerdict(
            "NotPT", "cyclic: divisible by p^3 q^2 or p^2 q^2 r"
        )

    parts = _primary_partitions(chain)
    exponent = chain[-1]
    exp_fac = _prime_factorization(exponent)
    squared_primes = [p for p, e in exp_fac.items() if e >= 2]
    if len(squared_primes) >= 2:
        if any(exp_fac[p] >= 3 for p in squared_primes) or len(exp_fac) >= 3:
            return ClassificationVerdict("NotPT", "cyclic subgroup divisible by p^3 q^2 or p^2 q^2 r")
    for q, lam in parts.items():
        if q % 2 == 1 and _dominated([3, 2], lam + [0] * 2):
            return ClassificationVerdict("NotPT", "contains a subgroup of type Z_{q^3} x Z_{q^2}, q odd")
        if q % 2 == 1 and _dominated([2, 2, 2], lam + [0] * 3):
            return ClassificationVerdict("NotPT", "contains a subgroup of type Z_{q^2}^3, q odd")
    for p, lam in parts.items():
        if _dominated([2, 2], lam + [0] * 2):
            if any(q != p and q % 2 == 1 for q in parts):
                return ClassificationVerdict(
                    "NotPT", "contains a subgroup of type Z_{p^2}^2 x Z_q, q odd"
                )

    non_plain = {p: lam for p, lam in parts.items() if lam != [1]}
    if not non_plain:
        # square-free means cyclic; unreachable for a non-cyclic chain
        return ClassificationVerdict("PT", "square-free")
    if len(non_plain) == 1:
        [(p, lam)] = non_plain.items()
        if _in_pt_p_group_family(p, lam):
            return ClassificationVerdict("PT", _PT_FAMILY_TAG)
    return ClassificationVerdict("Unknown", "not covered by the shipped classification tables")


# -- published everything-periodic list (report data, not ground truth) -----------

# Patterns from the published classification of groups in which every
# factorization has a periodic factor.  Letters stand for distinct primes,
# distinct from the literal constants; the final three entries are carried
# as explicitly asserted facts about small 2-groups.
_HAJOS_PATTERNS: tuple[tuple[str, tuple[tuple[object, tuple[int | None, ...]], ...]], ...] = (
    ("Z_{p^n q}", (("p", (None,)), ("q", (1,)))),
    ("Z_{p^2 q^2}", (("p", (2,)), ("q", (2,)))),
    ("Z_{p^2 q r}", (("p", (2,)), ("q", (1,)), ("r", (1,)))),
    ("Z_{p q r s}", (("p", (1,)), ("q", (1,)), ("r", (1,)), ("s", (1,)))),
    ("Z_{p^3} x Z_2^2", (("p", (3,)), (2, (1, 1)))),
    ("Z_{p^2} x Z_2^3", (("p", (2,)), (2, (1, 1, 1)))),
    ("Z_p x Z_4 x Z_2", (("p", (1,)), (2, (2, 1)))),
    ("Z_p x Z_2^2", (("p", (1,)), (2, (1, 1)))),
    ("Z_p x Z_q x Z_2^2", (("p", (1,)), ("q", (1,)), (2, (1, 1)))),
    ("Z_p x Z_3^2", (("p", (1,)), (3, (1, 1)))),
    ("Z_9 x Z_3", ((3, (2, 1)),)),
    ("Z_{2^n} x Z_2", ((2, (None, 1)),)),
    ("Z_4^2", ((2, (2, 2)),)),
    ("Z_p^2", (("p", (1, 1)),)),
    ("Z_2^n (n <= 5)", ((2, (1, 1, 1, 1, 1)),)),
    ("Z_4 x Z_2^3", ((2, (2, 1, 1, 1)),)),
    ("Z_8 x Z_2^2", ((2, (3, 1, 1)),)),
)


def _partition_fits(lam: list[int], mu: tuple[int | None, ...]) -> bool:
    if len(lam) > len(mu):
        return False
    return all(m is None or a <= m for a, m in zip(lam, mu))


def hajos_list_member(factors: tuple[int, ...] | list[int]) -> str | None:
    """Name of the published-list pattern covering the group, if any.

    Report data only: the exhaustive check is the ground truth.  Membership
    means the group embeds in an instance of the pattern (the listed property
    is inherited by subgroups).
    """
    chain = _validate_chain(tuple(factors))
    parts = _primary_partitions(chain)
    for name, slots in _HAJOS_PATTERNS:
        if _pattern_covers(parts, slots):
            return name
    return None


def _pattern_covers(parts: dict[int, list[int]], slots) -> bool:
    literal_primes = {s for s, _ in slots if isinstance(s, int)}
    letters = [s for s, _ in slots if isinstance(s, str)]
    slot_map = dict(slots)

    primes = sorted(parts)
    free = [p for p in primes if p not in literal_primes]
    # literals must fit directly
    for p in primes:
        if p in literal_primes and not _partition_fits(parts[p], slot_map[p]):
            return False
    # assign free primes injectively to letters
    return _assign(free, letters, parts, slot_map)


def _assign(free: list[int], letters: list[str], parts, slot_map) -> bool:
    if not free:
        return True
    p, rest = free[0], free[1:]
    for i, letter in enumerate(letters):
        if _partition_fits(parts[p], slot_map[letter]):
            if _assign(rest, letters[:i] + letters[i + 1 :], parts, slot_map):
                return True
    return False
