"""Fourier zero sets, periodicity deductions from zeros, and spectra.

The dual group is identified with the group itself through the standard
pairing, so zero sets and spectra are reported as ordinary subsets.  All
vanishing decisions are exact (integer cyclotomic arithmetic, never floats).
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclotomic import ExponentMultiset, cyclotomic_poly, is_vanishing_root_sum, mask_polynomial
from .errors import InputError, MixedGroupError, NoPeriodicComplementError
from .groups import (
    Group,
    GroupElement,
    GroupSubset,
    closure_mask,
    least_prime_order_member,
    mask_indices,
    prime_power,
)
from .quotient import quotient
from .tiling import NodeBudget, TilingPair, iter_complement_masks, periods_mask

_ZERO_CACHE: dict[tuple[tuple[int, ...], int], int] = {}


def clear_zero_set_cache() -> None:
    _ZERO_CACHE.clear()


def fourier_zero_at(group: Group, mask: int, g: int) -> bool:
    """Exact test of whether the transform of the indicator vanishes at g."""
    big_n = group.exponent
    counts = [0] * big_n
    pairing = group.pairing_exponent
    for x in mask_indices(mask):
        counts[pairing(g, x)] += 1
    return is_vanishing_root_sum(ExponentMultiset(big_n, tuple(counts)))


def zero_set_mask(group: Group, mask: int) -> int:
    """Bitset of the zero set of the Fourier transform of the indicator."""
    if mask == 0:
        raise InputError("zero set of the empty set")
    key = (group.factors, mask)
    cached = _ZERO_CACHE.get(key)
    if cached is not None:
        return cached
    n = group.order
    if group.rank == 1:
        # cyclic fast path: the transform at g is the mask polynomial at a
        # primitive root of order ord(g), so vanishing depends only on ord(g)
        poly = mask_polynomial(GroupSubset(group, mask))
        vanishing_order = {}
        for d in range(2, n + 1):
            if n % d == 0:
                vanishing_order[d] = poly.divisible_by(cyclotomic_poly(d))
        out = 0
        for g in range(1, n):
            if vanishing_order[group.order_of(g)]:
                out |= 1 << g
    else:
        out = 0
        for g in range(1, n):
            if fourier_zero_at(group, mask, g):
                out |= 1 << g
    _ZERO_CACHE[key] = out
    return out


def zero_set(a: GroupSubset) -> GroupSubset:
    """Exact zero set; symmetric under negation, never contains 0."""
    return GroupSubset(a.group, zero_set_mask(a.group, a.bits))


def deduce_period_from_line_zeros(a: GroupSubset) -> GroupElement | None:
    """Period forced by zeros along the line {(1, h)} of a Z_{p^n} x H group.

    If every dual element with first coordinate 1 is a zero of the transform,
    the set is invariant under adding p^(n-1) to the first coordinate; the
    period element is returned (None when some line element is not a zero).
    """
    group = a.group
    if a.bits == 0:
        raise InputError("empty set")
    pp = prime_power(group.factors[0])
    if pp is None:
        raise InputError(f"first factor {group.factors[0]} is not a prime power")
    p, k = pp
    rest = group.factors[1:]
    stride = group.order // group.factors[0]
    for h in range(stride):
        g = stride + h  # coordinates (1, h)
        if not fourier_zero_at(group, a.bits, g):
            return None
    period_index = group.index_of((p ** (k - 1),) + (0,) * len(rest))
    if group.translate(a.bits, period_index) != a.bits:
        raise ArithmeticError("line zeros present but the deduced period fails")
    return GroupElement(group, period_index)


@dataclass(frozen=True)
class SpectralPair:
    omega: GroupSubset
    lam: GroupSubset

    def to_dict(self) -> dict:
        return {"omega": list(self.omega.indices()), "lambda": list(self.lam.indices())}


def is_spectral_pair(omega: GroupSubset, lam: GroupSubset) -> bool:
    """|Lambda| = |Omega| and all differences of distinct members vanish on Omega.

    In a finite group, |Omega| mutually orthogonal characters on Omega span
    the whole function space, so this orthogonality condition is the
    Hilbert-basis requirement.
    """
    if omega.group != lam.group:
        raise MixedGroupError("spectral pair across different groups")
    if omega.bits == 0:
        return False
    if omega.cardinality != lam.cardinality:
        return False
    if lam.cardinality == 1:
        return True
    group = omega.group
    zmask = zero_set_mask(group, omega.bits)
    idx = lam.indices()
    sub = group.sub
    for i, x in enumerate(idx):
        for y in idx[i + 1 :]:
            if not (zmask >> sub(x, y)) & 1:
                return False
    return True


def find_spectrum(
    omega: GroupSubset,
    budget: NodeBudget | int | None = None,
) -> GroupSubset | None:
    """Lexicographically least spectrum through 0, by clique backtracking.

    Vertices are dual elements; two are adjacent when their difference lies
    in the zero set of omega.  Searches depth-first in ascending order, so
    the first complete clique is the lex-least one.  Returns None when no
    spectrum exists; a budget overrun raises instead.
    """
    if omega.bits == 0:
        raise InputError("empty set has no spectrum")
    group = omega.group
    k = omega.cardinality
    if k == 1:
        return GroupSubset(group, 1)
    bud = NodeBudget.ensure(budget)
    n = group.order
    zmask = zero_set_mask(group, omega.bits)
    adj = [group.translate(zmask, v) for v in range(n)]

    def dfs(clique_bits: int, size: int, cand: int) -> int | None:
        bud.spend(1, "spectrum search")
        if size == k:
            return clique_bits
        if size + cand.bit_count() < k:
            return None
        m = cand
        while m:
            b = m & -m
            v = b.bit_length() - 1
            m ^= b
            rest = cand & adj[v] & ~((b << 1) - 1)
            if size + 1 + rest.bit_count() >= k:
                got = dfs(clique_bits | b, size + 1, rest)
                if got is not None:
                    return got
        return None

    got = dfs(1, 1, zmask)
    if got is None:
        return None
    return GroupSubset(group, got)


def _first_periodic_complement(group: Group, om: int, bud: NodeBudget) -> int | None:
    for tm in iter_complement_masks(group, om, bud):
        if periods_mask(group, tm) != 1:
            return tm
    return None


def _spectrum_pt_rec(group: Group, om: int, tm: int, bud: NodeBudget) -> list[int]:
    if group.order == 1:
        return [0]
    pmask = periods_mask(group, om)
    if pmask != 1:
        # periodic tile: quotient by a prime-order period, recurse, then
        # inflate by p characters separating the period subgroup
        g0 = least_prime_order_member(group, pmask)
        p = group.order_of(g0)
        view = quotient(group, closure_mask(group, [g0]))
        om_q = view.project_mask(om)
        tm_q = view.project_mask(tm)
        if om_q.bit_count() * p != om.bit_count() or tm_q.bit_count() != tm.bit_count():
            raise ArithmeticError("projection did not preserve the tiling structure")
        gamma = [view.pullback_dual_index(q) for q in _spectrum_pt_rec(view.group, om_q, tm_q, bud)]
        big_n = group.exponent
        r0 = None
        for y in range(group.order):
            e = group.pairing_exponent(y, g0)
            if e and (e * p) % big_n == 0:
                r0 = y
                break
        if r0 is None:
            raise ArithmeticError("no character separates the period subgroup")
        out = set()
        add = group.add
        for s in range(p):
            shift = group.dilate_index(r0, s)
            for g in gamma:
                out.add(add(g, shift))
        if len(out) != p * len(gamma):
            raise ArithmeticError("inflated spectrum collided")
        return sorted(out)
    # non-periodic tile: move periodicity to the complement, fold into the
    # quotient (injective on omega), recurse, and pull characters back
    if periods_mask(group, tm) != 1:
        tper = tm
    else:
        tper = _first_periodic_complement(group, om, bud)
        if tper is None:
            raise NoPeriodicComplementError(
                f"no periodic complement in {group.spec()}; the group may lack "
                "the periodic-tiling property"
            )
    g0 = least_prime_order_member(group, periods_mask(group, tper))
    view = quotient(group, closure_mask(group, [g0]))
    om_q = view.project_mask(om)
    tm_q = view.project_mask(tper)
    if om_q.bit_count() != om.bit_count():
        raise ArithmeticError("projection collapsed a non-periodic tile")
    return sorted(view.pullback_dual_index(q) for q in _spectrum_pt_rec(view.group, om_q, tm_q, bud))


def spectrum_via_pt(
    omega: GroupSubset,
    tiling: TilingPair,
    budget: NodeBudget | int | None = None,
) -> GroupSubset:
    """Spectrum built by the periodic-tiling recursion.

    Either the tile is periodic (quotient by a period and inflate the lifted
    spectrum by one full set of characters on the period subgroup), or some
    complement is periodic (quotient by its period; the tile folds injectively
    and lifted characters form the spectrum).  Needs every quotient along the
    way to admit periodic complements, which holds in periodic-tiling groups.
    """
    if tiling.omega != omega:
        raise InputError("tiling pair does not belong to the given tile")
    bud = NodeBudget.ensure(budget)
    group = omega.group
    lam = GroupSubset(group, _indices_to_mask(_spectrum_pt_rec(group, omega.bits, tiling.t.bits, bud)))
    if not is_spectral_pair(omega, lam):
        raise ArithmeticError("constructed set failed spectral verification")
    return lam


def _indices_to_mask(indices: list[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out
