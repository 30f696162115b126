"""Tiling verification routes, periods, dilation, and exhaustive enumeration."""

import itertools
import random

import pytest

from abeltiles.errors import BudgetExceededError, InputError
from abeltiles.groups import GroupSubset, parse_group, parse_subset
from abeltiles.tiling import (
    ROUTES,
    TilingPair,
    difference_set,
    dilate,
    enumerate_complements,
    enumerate_tilings,
    is_tiling_pair,
    periods,
    periods_mask,
    tiling_pair_index,
)

from helpers import SEED, all_abelian_groups, subset_tuples
from oracles import o_complements, o_periods


def test_difference_set_examples():
    z8 = parse_group("Z8")
    assert difference_set(parse_subset(z8, "{0,1,2,3}")).indices() == (0, 1, 2, 3, 5, 6, 7)
    z36 = parse_group("Z36")
    sub = parse_subset(z36, "{0,6,12,18,24,30}")
    assert difference_set(sub).bits == sub.bits  # subgroups are difference-closed
    z42 = parse_group("Z4xZ2")
    d = difference_set(z42.subset([(0, 0), (1, 1)]))
    assert subset_tuples(z42, d) == {(0, 0), (1, 1), (3, 1)}


def test_is_tiling_pair_examples():
    z4 = parse_group("Z4")
    assert is_tiling_pair(parse_subset(z4, "{0,1}"), parse_subset(z4, "{0,2}"))
    assert not is_tiling_pair(parse_subset(z4, "{0,1}"), parse_subset(z4, "{0,1}"))
    z36 = parse_group("Z36")
    omega = parse_subset(z36, "{0,4,8,9,13,17}")
    t = parse_subset(z36, "{0,6,12,18,24,30}")
    for route in ROUTES:
        assert is_tiling_pair(omega, t, route)
    with pytest.raises(InputError):
        is_tiling_pair(omega, t, "guess")


def test_route_agreement_exhaustive_order_12():
    # all normalized subset pairs with matching cardinalities, all groups <= 12
    for g in all_abelian_groups(12, min_order=2):
        n = g.order
        for k in range(1, n + 1):
            if n % k:
                continue
            size_t = n // k
            omegas = [1 | _mask(c) for c in itertools.combinations(range(1, n), k - 1)]
            ts = [1 | _mask(c) for c in itertools.combinations(range(1, n), size_t - 1)]
            for om in omegas:
                a = GroupSubset(g, om)
                for tm in ts:
                    b = GroupSubset(g, tm)
                    verdicts = {r: is_tiling_pair(a, b, r) for r in ROUTES}
                    assert len(set(verdicts.values())) == 1, (g.spec(), om, tm, verdicts)


def _mask(indices):
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def test_route_agreement_random_large():
    rng = random.Random(SEED)
    specs = ["Z48", "Z72", "Z6xZ6", "Z4xZ4xZ2", "Z60"]
    for spec in specs:
        g = parse_group(spec)
        n = g.order
        divisors = [d for d in range(2, n) if n % d == 0]
        for _ in range(40):
            k = rng.choice(divisors)
            om = 1 | _mask(rng.sample(range(1, n), k - 1))
            tm = 1 | _mask(rng.sample(range(1, n), n // k - 1))
            a, b = GroupSubset(g, om), GroupSubset(g, tm)
            verdicts = {r: is_tiling_pair(a, b, r) for r in ROUTES}
            assert len(set(verdicts.values())) == 1


def test_symmetry_and_translation_invariance():
    rng = random.Random(SEED)
    g = parse_group("Z12")
    for pair in enumerate_tilings(g):
        assert is_tiling_pair(pair.t, pair.omega)
        sh = rng.randrange(g.order)
        th = rng.randrange(g.order)
        assert is_tiling_pair(pair.omega.translate(sh), pair.t.translate(th))


def test_periods_examples():
    z36 = parse_group("Z36")
    assert periods(parse_subset(z36, "{0,12,15,18,30,33}")).carrier.indices() == (0, 18)
    assert periods(parse_subset(z36, "{0,10,12,22,24,34}")).carrier.indices() == (0, 12, 24)
    z8 = parse_group("Z8")
    assert periods(parse_subset(z8, "{0,1,2,3}")).carrier.indices() == (0,)


def test_periods_against_oracle_and_closure():
    rng = random.Random(SEED)
    for g in all_abelian_groups(20, min_order=2):
        for _ in range(8):
            bits = rng.getrandbits(g.order) | 1
            per = periods(GroupSubset(g, bits))
            assert subset_tuples(g, per.carrier) == o_periods(g.factors, subset_tuples(g, bits))
            # structurally closed under addition
            for a in per.carrier.indices():
                for b in per.carrier.indices():
                    assert g.add(a, b) in per.carrier


def test_dilate_examples():
    z36 = parse_group("Z36")
    t = parse_subset(z36, "{0,6,12,18,24,30}")
    assert dilate(t, 5).bits == t.bits
    t1 = parse_subset(z36, "{0,12,15,18,30,33}")
    d = dilate(t1, 5)
    assert d.indices() == (0, 3, 6, 18, 21, 24)
    omega = parse_subset(z36, "{0,4,8,9,13,17}")
    assert is_tiling_pair(omega, d)
    z8 = parse_group("Z8")
    assert dilate(parse_subset(z8, "{0,1}"), 3).indices() == (0, 3)


def test_dilate_collapses_without_gcd():
    z8 = parse_group("Z8")
    assert dilate(parse_subset(z8, "{0,1,2,3}"), 2).indices() == (0, 2, 4, 6)
    assert dilate(parse_subset(z8, "{0,4}"), 2).indices() == (0,)


def test_dilation_preserves_tilings_small():
    # complement replacement by coprime multiples, over full pair streams
    for spec in ("Z8", "Z12", "Z2^2xZ3", "Z16", "Z4xZ2"):
        g = parse_group(spec)
        for pair in enumerate_tilings(g):
            size_t = pair.t.cardinality
            for k in range(2, g.order):
                if _gcd(k, size_t) == 1:
                    kt = dilate(pair.t, k)
                    assert is_tiling_pair(pair.omega, kt), (spec, pair.to_dict(), k)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def test_enumerate_complements_examples():
    z8 = parse_group("Z8")
    assert [c.indices() for c in enumerate_complements(parse_subset(z8, "{0,1}"))] == [(0, 2, 4, 6)]
    assert [c.indices() for c in enumerate_complements(parse_subset(z8, "{0,1,2,3}"))] == [(0, 4)]
    z36 = parse_group("Z36")
    comps = {c.indices() for c in enumerate_complements(parse_subset(z36, "{0,4,8,9,13,17}"))}
    assert (0, 6, 12, 18, 24, 30) in comps
    assert (0, 12, 15, 18, 30, 33) in comps
    assert (0, 10, 12, 22, 24, 34) in comps


def test_enumerate_complements_matches_brute_force():
    cases = [
        ("Z8", "{0,1}"),
        ("Z8", "{0,2}"),
        ("Z12", "{0,1,2}"),
        ("Z12", "{0,3,6,9}"),
        ("Z16", "{0,1,2,3}"),
        ("Z2^4", "{(0,0,0,0),(1,0,0,0),(0,1,0,0),(1,1,1,0)}"),
        ("Z4xZ2", "{(0,0),(1,1)}"),
        ("Z12", "{0,1,2,3,4}"),  # not a tile: both sides empty
    ]
    for spec, lit in cases:
        g = parse_group(spec)
        omega = parse_subset(g, lit)
        if g.order % omega.cardinality:
            with pytest.raises(InputError):
                enumerate_complements(omega)
            continue
        got = [subset_tuples(g, c) for c in enumerate_complements(omega)]
        expected = [frozenset(s) for s in o_complements(g.factors, subset_tuples(g, omega))]
        assert sorted(got, key=sorted) == sorted(expected, key=sorted)


def test_enumerate_complements_translation_closure():
    z8 = parse_group("Z8")
    omega = parse_subset(z8, "{0,1,2,3}")
    full = enumerate_complements(omega, normalize=False)
    assert {c.indices() for c in full} == {(0, 4), (1, 5), (2, 6), (3, 7)}


def test_enumerate_tilings_z4_exact():
    g = parse_group("Z4")
    got = [(p.omega.indices(), p.t.indices()) for p in enumerate_tilings(g)]
    assert got == [
        ((0,), (0, 1, 2, 3)),
        ((0, 1), (0, 2)),
        ((0, 2), (0, 1)),
        ((0, 2), (0, 3)),
        ((0, 3), (0, 2)),
        ((0, 1, 2, 3), (0,)),
    ]


def test_enumerate_tilings_z2z2_exact():
    g = parse_group("Z2^2")
    got = {(p.omega.indices(), p.t.indices()) for p in enumerate_tilings(g)}
    # brute force: two trivial pairs plus ordered pairs of distinct size-2 sets
    expected = {((0,), (0, 1, 2, 3)), ((0, 1, 2, 3), (0,))}
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            if a != b:
                expected.add(((0, a), (0, b)))
    assert got == expected


def test_enumerate_tilings_size_filter_and_routes():
    g = parse_group("Z8")
    got = [(p.omega.indices(), p.t.indices()) for p in enumerate_tilings(g, size_filter=4)]
    assert ((0, 1, 2, 3), (0, 4)) in got
    assert ((0, 1, 4, 5), (0, 2)) in got
    assert ((0, 2, 4, 6), (0, 1)) in got
    for p in enumerate_tilings(g, size_filter=4):
        for route in ROUTES:
            assert is_tiling_pair(p.omega, p.t, route)
    # brute-force cross-check of the full size-4 list
    brute = set()
    for combo in itertools.combinations(range(1, 8), 3):
        om = frozenset({0} | set(combo))
        for c in o_complements((8,), {(i,) for i in om}):
            brute.add((tuple(sorted(om)), tuple(sorted(x[0] for x in c))))
    assert set(got) == brute


def test_enumerate_tilings_bound_and_budget():
    with pytest.raises(InputError):
        list(enumerate_tilings(parse_group("Z48")))
    g = parse_group("Z16")
    with pytest.raises(BudgetExceededError):
        from abeltiles.tiling import clear_enumeration_caches

        clear_enumeration_caches()
        list(enumerate_tilings(g, budget=50))
    clear_and_warm = list(enumerate_tilings(g, budget=10**7))
    assert clear_and_warm


def test_all_complements_of_nonperiodic_tiles_share_prime_power_period():
    # cyclic prime powers: every complement of a non-periodic tile keeps the
    # canonical period (index p^(n-1)); exhaustive at orders 8 and 16
    for spec, period in (("Z8", 4), ("Z16", 8)):
        g = parse_group(spec)
        for size in (d for d in range(2, g.order) if g.order % d == 0):
            index = tiling_pair_index(g, size)
            for om, comps in index.items():
                if periods_mask(g, om) != 1:
                    continue
                for tm in comps:
                    assert g.translate(tm, period) == tm, (spec, om, tm)


def test_tiling_pair_type():
    z8 = parse_group("Z8")
    pair = TilingPair.verified(parse_subset(z8, "{0,1,2,3}"), parse_subset(z8, "{0,4}"))
    assert pair.normalized
    assert pair.to_dict() == {"omega": [0, 1, 2, 3], "t": [0, 4]}
    with pytest.raises(InputError):
        TilingPair.verified(parse_subset(z8, "{0,1}"), parse_subset(z8, "{0,1}"))
