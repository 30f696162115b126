"""Independent brute-force oracles.

Everything here works on factor tuples and coordinate tuples with plain
modular arithmetic, deliberately avoiding the library's representations, so
expected values frozen into tests come from a second route.
"""

from __future__ import annotations

import cmath
import itertools
from collections import Counter


def o_elements(factors):
    return [tuple(x) for x in itertools.product(*(range(f) for f in factors))]


def o_add(factors, x, y):
    return tuple((a + b) % f for a, b, f in zip(x, y, factors))


def o_neg(factors, x):
    return tuple((-a) % f for a, f in zip(x, factors))


def o_scale(factors, k, x):
    return tuple((k * a) % f for a, f in zip(x, factors))


def o_is_tiling(factors, a_set, b_set):
    """Every group element is a sum in exactly one way."""
    counts = Counter(o_add(factors, x, y) for x in a_set for y in b_set)
    n = 1
    for f in factors:
        n *= f
    return len(counts) == n and all(v == 1 for v in counts.values())


def o_complements(factors, a_set, normalized=True):
    """All complements of a set by brute force over subsets of the right size."""
    elems = o_elements(factors)
    n = len(elems)
    k = len(a_set)
    if k == 0 or n % k:
        return []
    size = n // k
    zero = tuple(0 for _ in factors)
    out = []
    rest = [e for e in elems if e != zero]
    for combo in itertools.combinations(rest, size - 1):
        cand = frozenset(combo) | {zero}
        if o_is_tiling(factors, a_set, cand):
            out.append(cand)
    if not normalized:
        closure = set()
        for t in out:
            for g in elems:
                closure.add(frozenset(o_add(factors, x, g) for x in t))
        return sorted(closure, key=sorted)
    return sorted(out, key=sorted)


def o_periods(factors, a_set):
    """All g with A + g = A, the identity included."""
    a = frozenset(a_set)
    out = set()
    for g in o_elements(factors):
        if frozenset(o_add(factors, x, g) for x in a) == a:
            out.add(g)
    return out


def o_character(factors, g, x):
    val = 0.0
    for gj, xj, nj in zip(g, x, factors):
        val += gj * xj / nj
    return cmath.exp(2j * cmath.pi * val)


def o_fourier(factors, a_set, g):
    return sum(o_character(factors, g, x) for x in a_set)


def o_zero_set(factors, a_set, tol=1e-9):
    zero = tuple(0 for _ in factors)
    return {g for g in o_elements(factors) if g != zero and abs(o_fourier(factors, a_set, g)) < tol}


def o_root_sum(modulus, counts):
    return sum(c * cmath.exp(2j * cmath.pi * e / modulus) for e, c in enumerate(counts))


def o_is_spectral_pair(factors, omega, lam, tol=1e-9):
    if len(omega) != len(lam):
        return False
    lam = sorted(lam)
    for i, x in enumerate(lam):
        for y in lam[i + 1 :]:
            diff = tuple((a - b) % f for a, b, f in zip(x, y, factors))
            if abs(o_fourier(factors, omega, diff)) >= tol:
                return False
    return True


def o_coset_order_histogram(factors, carrier):
    """Element-order histogram of the quotient by a subgroup, from coset tables.

    The histogram of element orders determines a finite abelian group up to
    isomorphism, so this is a full structural oracle for quotient shapes.
    """
    elems = o_elements(factors)
    h = frozenset(carrier)
    cosets = {}
    for x in elems:
        key = frozenset(o_add(factors, x, s) for s in h)
        cosets.setdefault(key, x)
    hist = Counter()
    n = len(elems) // len(h)
    for key, rep in cosets.items():
        order = 1
        acc = rep
        while frozenset(o_add(factors, acc, s) for s in h) != h:
            acc = o_add(factors, acc, rep)
            order += 1
        hist[order] += 1
    assert sum(hist.values()) == n
    return hist


def o_group_order_histogram(invariant_factors):
    """Element-order histogram of a product of cyclic groups."""
    import math

    hist = Counter()
    for x in itertools.product(*(range(d) for d in invariant_factors)):
        order = 1
        for xi, d in zip(x, invariant_factors):
            o = d // math.gcd(d, xi) if xi else 1
            order = order * o // math.gcd(order, o)
        hist[order] += 1
    return hist
