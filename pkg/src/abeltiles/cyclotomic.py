"""Exact cyclotomic-polynomial arithmetic and vanishing sums of roots of unity.

All arithmetic is over the integers.  Python ints are arbitrary precision, so
overflow cannot occur silently; divisibility tests by cyclotomic polynomials
use exact remainders (they are monic, so no rational arithmetic is needed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, NotCyclicError
from .groups import Group, GroupSubset, prime_power

DEFAULT_MAX_INDEX = 4096


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; coeffs[i] is the coefficient of X^i."""

    coeffs: tuple[int, ...]

    @staticmethod
    def of(*coeffs: int) -> "IntPolynomial":
        return IntPolynomial(_trim(coeffs))

    @staticmethod
    def from_coeffs(coeffs: Iterable[int]) -> "IntPolynomial":
        return IntPolynomial(_trim(tuple(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolynomial(_trim(tuple(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolynomial(_trim(tuple(
            (a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)
        )))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return IntPolynomial(_trim(tuple(out)))

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def rem_monic(self, divisor: "IntPolynomial") -> "IntPolynomial":
        """Remainder modulo a monic divisor, exactly over the integers."""
        d = divisor.coeffs
        if not d or d[-1] != 1:
            raise InputError("divisor must be monic")
        r = list(self.coeffs)
        dd = len(d) - 1
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c:
                r[i] = 0
                for j in range(dd):
                    r[i - dd + j] -= c * d[j]
        return IntPolynomial(_trim(tuple(r[:dd])))

    def divmod_exact(self, divisor: "IntPolynomial") -> "IntPolynomial":
        """Exact quotient by a monic divisor; raises if the remainder is nonzero."""
        d = divisor.coeffs
        if not d or d[-1] != 1:
            raise InputError("divisor must be monic")
        r = list(self.coeffs)
        dd = len(d) - 1
        q = [0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c:
                q[i - dd] = c
                r[i] = 0
                for j in range(dd):
                    r[i - dd + j] -= c * d[j]
        if any(r[:dd]):
            raise ArithmeticError("division is not exact")
        return IntPolynomial(_trim(tuple(q)))

    def divisible_by(self, divisor: "IntPolynomial") -> bool:
        return self.rem_monic(divisor).is_zero()

    def sparse_str(self, var: str = "X") -> str:
        """Sparse rendering like '1+X^4+X^8' used in reports."""
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                term = f"{mag}{var}" + (f"^{i}" if i > 1 else "")
                parts.append(term if c > 0 or not parts else term)
                if c < 0:
                    parts[-1] = "-" + parts[-1]
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self) -> str:
        return f"IntPolynomial({self.sparse_str()})"


def _trim(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


def _x_pow_minus_one(n: int) -> IntPolynomial:
    c = [0] * (n + 1)
    c[0] = -1
    c[n] = 1
    return IntPolynomial(tuple(c))


def divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


_CYCLOTOMIC_CACHE: dict[int, IntPolynomial] = {1: IntPolynomial((-1, 1))}


def cyclotomic_poly(n: int, max_index: int = DEFAULT_MAX_INDEX) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of X^n - 1.

    Results are memoized; inserts are idempotent so concurrent readers are
    safe under the GIL.
    """
    if n < 1 or n > max_index:
        raise InputError(f"cyclotomic index must be in [1, {max_index}], got {n}")
    cached = _CYCLOTOMIC_CACHE.get(n)
    if cached is not None:
        return cached
    quot = _x_pow_minus_one(n)
    for d in divisors(n):
        if d < n:
            quot = quot.divmod_exact(cyclotomic_poly(d, max_index=max_index))
    if quot.degree != _totient(n):
        raise ArithmeticError(f"cyclotomic degree mismatch at n={n}")
    _CYCLOTOMIC_CACHE[n] = quot
    return quot


def _totient(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


@dataclass(frozen=True)
class ExponentMultiset:
    """Integer combination sum(counts[e] * zeta_N^e) of N-th roots of unity."""

    modulus: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise InputError("modulus must be >= 1")
        if len(self.counts) != self.modulus:
            raise InputError("counts length must equal the modulus")

    @staticmethod
    def from_exponents(modulus: int, exponents: Iterable[int]) -> "ExponentMultiset":
        counts = [0] * modulus
        for e in exponents:
            counts[e % modulus] += 1
        return ExponentMultiset(modulus, tuple(counts))

    def polynomial(self) -> IntPolynomial:
        return IntPolynomial(_trim(self.counts))


def is_vanishing_root_sum(m: ExponentMultiset) -> bool:
    """Whether sum(c_e * zeta_N^e) = 0, decided exactly.

    Equivalent to divisibility of the counts polynomial by Phi_N.  For prime
    powers N = p^n the congruence-class criterion (all counts equal within
    each residue class mod p^(n-1)) is an O(N) fast path; the general case
    reduces modulo Phi_N over the integers.
    """
    n = m.modulus
    if n == 1:
        return m.counts[0] == 0
    pp = prime_power(n)
    if pp is not None:
        p, k = pp
        step = n // p
        counts = m.counts
        for r in range(step):
            c0 = counts[r]
            for j in range(1, p):
                if counts[r + j * step] != c0:
                    return False
        return True
    return m.polynomial().divisible_by(cyclotomic_poly(n))


def prime_power_vanishing_criterion(m: ExponentMultiset) -> bool:
    """Congruence-class criterion for prime-power modulus, as a named check.

    Usable only when the modulus is a prime power; kept separate so tests can
    cross-check it against the polynomial-reduction route.
    """
    pp = prime_power(m.modulus)
    if pp is None:
        raise InputError("criterion applies to prime-power moduli only")
    p, _ = pp
    step = m.modulus // p
    for r in range(step):
        c0 = m.counts[r]
        if any(m.counts[r + j * step] != c0 for j in range(1, p)):
            return False
    return True


def vanishing_by_reduction(m: ExponentMultiset) -> bool:
    """Vanishing decided only by exact reduction modulo Phi_N."""
    if m.modulus == 1:
        return m.counts[0] == 0
    return m.polynomial().divisible_by(cyclotomic_poly(m.modulus))


def mask_polynomial(a: GroupSubset) -> IntPolynomial:
    """0/1 mask polynomial with X^a for each member of a subset of Z_N."""
    if not a.group.is_cyclic:
        raise NotCyclicError("mask polynomials are defined for cyclic groups")
    n = a.group.order
    coeffs = [0] * n
    if a.group.rank == 1:
        for i in a.indices():
            coeffs[i] = 1
    else:
        # cyclic with several coprime factors: map to Z_N by the pairing
        # exponent against (1,...,1), which is the CRT isomorphism
        for i in a.indices():
            coeffs[cyclic_position(a.group, i)] = 1
    return IntPolynomial(_trim(tuple(coeffs)))


def cyclic_position(group: Group, index: int) -> int:
    """Image of an element of a cyclic group under the CRT map to Z_N."""
    if not group.is_cyclic:
        raise NotCyclicError("cyclic position needs a cyclic group")
    if group.rank == 1:
        return index
    ones = group.index_of([1] * group.rank)
    return group.pairing_exponent(index, ones)


@dataclass(frozen=True)
class MaskConditionReport:
    """Prime powers s | N with Phi_s | A(X), and the two mask-polynomial tests."""

    modulus: int
    prime_powers: tuple[int, ...]
    vanishing_prime_powers: tuple[int, ...]
    t1: bool
    t2: bool

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "prime_powers": list(self.prime_powers),
            "vanishing_prime_powers": list(self.vanishing_prime_powers),
            "T1": self.t1,
            "T2": self.t2,
        }


def check_T1_T2(a: GroupSubset) -> MaskConditionReport:
    """Evaluate the two mask-polynomial divisibility conditions for a subset of Z_N.

    T1: A(1) equals the product of Phi_s(1) over the vanishing prime powers.
    T2: for every choice of >= 2 vanishing prime powers of pairwise distinct
    primes, Phi of their product divides A(X).
    """
    if not a.group.is_cyclic:
        raise NotCyclicError("the mask-polynomial conditions apply to cyclic groups")
    n = a.group.order
    poly = mask_polynomial(a)
    s_n = tuple(d for d in divisors(n) if d > 1 and prime_power(d) is not None)
    s_a = tuple(s for s in s_n if poly.divisible_by(cyclotomic_poly(s)))
    prod = 1
    for s in s_a:
        prod *= cyclotomic_poly(s).evaluate(1)
    t1 = poly.evaluate(1) == prod

    by_prime: dict[int, list[int]] = {}
    for s in s_a:
        p, _ = prime_power(s)  # type: ignore[misc]
        by_prime.setdefault(p, []).append(s)
    primes = sorted(by_prime)
    t2 = True
    for subset in _nonempty_subsets(primes):
        if len(subset) < 2:
            continue
        for combo in _product_choices([by_prime[p] for p in subset]):
            s = math.prod(combo)
            if not poly.divisible_by(cyclotomic_poly(s)):
                t2 = False
                break
        if not t2:
            break
    return MaskConditionReport(n, s_n, s_a, t1, t2)


def _nonempty_subsets(items: Sequence[int]) -> Iterable[tuple[int, ...]]:
    n = len(items)
    for mask in range(1, 1 << n):
        yield tuple(items[i] for i in range(n) if (mask >> i) & 1)


def _product_choices(pools: list[list[int]]) -> Iterable[tuple[int, ...]]:
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product_choices(pools[1:]):
            yield (head, *rest)
