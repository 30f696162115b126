"""Finite abelian groups presented as products of cyclic factors.

Elements are indexed 0..order-1 in mixed radix with the last factor varying
fastest, and subsets are stored as Python-int bitsets over those indices.
Translation of a bitset decomposes into one block rotation per factor, so
translating a whole subset costs O(#factors) big-int operations regardless
of its size.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InputError, MixedGroupError

DEFAULT_MAX_ORDER = 4096

# Flat add/sub lookup tables are only built below this order (memory bound).
_TABLE_ORDER_LIMIT = 512


def _prime_factorization(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """Return (p, k) if n = p**k with k >= 1, else None."""
    if n < 2:
        return None
    fac = _prime_factorization(n)
    if len(fac) != 1:
        return None
    [(p, k)] = fac.items()
    return p, k


class Group:
    """Z_{n_1} x ... x Z_{n_s}, immutable, compared by factor tuple.

    Isomorphic groups with different presentations are distinct objects;
    canonical comparison goes through `invariant_factors`.  The internal
    lookup tables are built lazily with idempotent writes, so instances can
    be shared between threads.
    """

    __slots__ = (
        "factors",
        "order",
        "exponent",
        "_strides",
        "_coords",
        "_neg",
        "_full",
        "_rot_cache",
        "_rot_ops",
        "_sub_flat",
        "_add_flat",
        "_order_table",
        "_mul_perms",
    )

    def __init__(self, factors: Sequence[int], max_order: int = DEFAULT_MAX_ORDER):
        factors = tuple(int(f) for f in factors)
        if not factors:
            factors = (1,)
        if any(f < 1 for f in factors):
            raise InputError(f"cyclic factors must be >= 1, got {factors}")
        order = math.prod(factors)
        if order > max_order:
            raise InputError(f"group order {order} exceeds maximum {max_order}")
        self.factors = factors
        self.order = order
        self.exponent = math.lcm(*factors)
        strides = []
        w = order
        for f in factors:
            w //= f
            strides.append(w)
        self._strides = tuple(strides)
        coords = []
        for i in range(order):
            rem = i
            c = []
            for wj in strides:
                c.append(rem // wj)
                rem %= wj
            coords.append(tuple(c))
        self._coords = coords
        self._neg = [self.index_of(tuple(-x % f for x, f in zip(c, factors))) for c in coords]
        self._full = (1 << order) - 1
        self._rot_cache: dict[tuple[int, int], tuple[int, int, int]] = {}
        self._rot_ops: list[tuple[tuple[int, int, int], ...]] | None = None
        self._sub_flat: list[int] | None = None
        self._add_flat: list[int] | None = None
        self._order_table: list[int] | None = None
        self._mul_perms: dict[int, list[int]] = {}

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Group) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return f"Group({self.spec()!r})"

    def spec(self) -> str:
        """Canonical text form, e.g. 'Z4xZ2^3'."""
        parts = []
        i = 0
        while i < len(self.factors):
            j = i
            while j < len(self.factors) and self.factors[j] == self.factors[i]:
                j += 1
            run = j - i
            parts.append(f"Z{self.factors[i]}" + (f"^{run}" if run > 1 else ""))
            i = j
        return "x".join(parts)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def is_cyclic(self) -> bool:
        return len(self.factors) == 1 or self.exponent == self.order

    def invariant_factors(self) -> tuple[int, ...]:
        """Canonical divisor chain d_1 | d_2 | ... with product = order."""
        per_prime: dict[int, list[int]] = {}
        for f in self.factors:
            for p, k in _prime_factorization(f).items():
                per_prime.setdefault(p, []).append(k)
        depth = max((len(v) for v in per_prime.values()), default=0)
        chain = []
        for i in range(depth):
            d = 1
            for p, ks in per_prime.items():
                ks_sorted = sorted(ks, reverse=True)
                if i < len(ks_sorted):
                    d *= p ** ks_sorted[i]
            chain.append(d)
        chain.reverse()
        return tuple(chain) if chain else (1,)

    # -- element arithmetic ---------------------------------------------------

    def index_of(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.factors):
            raise InputError(f"expected {len(self.factors)} coordinates, got {len(coords)}")
        i = 0
        for x, f in zip(coords, self.factors):
            i = i * f + (x % f)
        return i

    def coords_of(self, index: int) -> tuple[int, ...]:
        return self._coords[index]

    def add(self, a: int, b: int) -> int:
        tab = self._add_table()
        if tab is not None:
            return tab[a * self.order + b]
        ca, cb = self._coords[a], self._coords[b]
        return self.index_of([x + y for x, y in zip(ca, cb)])

    def sub(self, a: int, b: int) -> int:
        tab = self.sub_table()
        if tab is not None:
            return tab[a * self.order + b]
        ca, cb = self._coords[a], self._coords[b]
        return self.index_of([x - y for x, y in zip(ca, cb)])

    def neg(self, a: int) -> int:
        return self._neg[a]

    def _add_table(self) -> list[int] | None:
        if self._add_flat is None and self.order <= _TABLE_ORDER_LIMIT:
            n = self.order
            tab = [0] * (n * n)
            for a in range(n):
                ca = self._coords[a]
                row = a * n
                for b in range(n):
                    cb = self._coords[b]
                    tab[row + b] = self.index_of([x + y for x, y in zip(ca, cb)])
            self._add_flat = tab
        return self._add_flat

    def sub_table(self) -> list[int] | None:
        """Flat n*n table with entry [a*n+b] = a-b, or None above the size cap."""
        if self._sub_flat is None and self.order <= _TABLE_ORDER_LIMIT:
            n = self.order
            neg = self._neg
            add = self._add_table()
            self._sub_flat = [add[a * n + neg[b]] for a in range(n) for b in range(n)]
        return self._sub_flat

    def order_of(self, a: int) -> int:
        if self._order_table is None:
            self._order_table = [
                math.lcm(*(f // math.gcd(f, x) for x, f in zip(c, self.factors)))
                for c in self._coords
            ]
        return self._order_table[a]

    def dilate_index(self, a: int, k: int) -> int:
        return self.index_of([k * x for x in self._coords[a]])

    def mul_perm(self, k: int) -> list[int]:
        """Index permutation (or collapse) a -> k*a, cached per k."""
        k = k % self.exponent
        perm = self._mul_perms.get(k)
        if perm is None:
            perm = [self.dilate_index(a, k) for a in range(self.order)]
            self._mul_perms[k] = perm
        return perm

    def pairing_exponent(self, g: int, x: int) -> int:
        """e in [0, N) with chi_g(x) = exp(2*pi*i*e/N), N the group exponent."""
        big_n = self.exponent
        e = 0
        for gj, xj, nj in zip(self._coords[g], self._coords[x], self.factors):
            e += (big_n // nj) * gj * xj
        return e % big_n

    # -- bitset helpers -------------------------------------------------------

    @property
    def full_mask(self) -> int:
        return self._full

    def rotation_ops(self) -> list[tuple[tuple[int, int, int], ...]]:
        """Per-element translation recipe: a list indexed by t of block rotations.

        Each entry (low, up, down) moves the bits selected by `low` up and the
        rest down, one factor at a time.  Hot loops index this table directly.
        """
        ops = self._rot_ops
        if ops is None:
            ops = []
            for t in range(self.order):
                entry = []
                for j, r in enumerate(self._coords[t]):
                    if r:
                        entry.append(self._rotation(j, r))
                ops.append(tuple(entry))
            self._rot_ops = ops
        return ops

    def translate(self, mask: int, t: int) -> int:
        """Bitset of {a + t : a in mask}."""
        ops = self._rot_ops
        if ops is None:
            ops = self.rotation_ops()
        for low, up_shift, down_shift in ops[t]:
            mask = ((mask & low) << up_shift) | ((mask & ~low) >> down_shift)
        return mask

    def _rotation(self, j: int, r: int) -> tuple[int, int, int]:
        key = (j, r)
        entry = self._rot_cache.get(key)
        if entry is None:
            nj = self.factors[j]
            w = self._strides[j]
            block = nj * w
            reps = self.order // block
            unit_low = (1 << ((nj - r) * w)) - 1
            low = 0
            for b in range(reps):
                low |= unit_low << (b * block)
            entry = (low, r * w, (nj - r) * w)
            self._rot_cache[key] = entry
        return entry

    def negate_mask(self, mask: int) -> int:
        out = 0
        neg = self._neg
        m = mask
        while m:
            b = m & -m
            out |= 1 << neg[b.bit_length() - 1]
            m ^= b
        return out

    def dilate_mask(self, mask: int, k: int) -> int:
        perm = self.mul_perm(k)
        out = 0
        m = mask
        while m:
            b = m & -m
            out |= 1 << perm[b.bit_length() - 1]
            m ^= b
        return out

    def element(self, value: int | Sequence[int]) -> GroupElement:
        if isinstance(value, int):
            if not 0 <= value < self.order:
                raise InputError(f"element index {value} out of range for {self.spec()}")
            return GroupElement(self, value)
        return GroupElement(self, self.index_of(value))

    def zero(self) -> GroupElement:
        return GroupElement(self, 0)

    def __iter__(self) -> Iterator[GroupElement]:
        return (GroupElement(self, i) for i in range(self.order))

    def subset(self, members: Iterable["int | Sequence[int] | GroupElement"] = ()) -> GroupSubset:
        bits = 0
        for m in members:
            if isinstance(m, GroupElement):
                if m.group != self:
                    raise MixedGroupError(f"element of {m.group.spec()} used in {self.spec()}")
                bits |= 1 << m.index
            else:
                bits |= 1 << self.element(m).index
        return GroupSubset(self, bits)

    def subset_from_mask(self, bits: int) -> GroupSubset:
        return GroupSubset(self, bits)

    def full_subset(self) -> GroupSubset:
        return GroupSubset(self, self._full)


def mask_indices(mask: int) -> Iterator[int]:
    """Iterate set-bit positions in ascending order."""
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _check_same_group(a: "GroupElement | GroupSubset", b: "GroupElement | GroupSubset") -> None:
    if a.group != b.group:
        raise MixedGroupError(f"operands live in {a.group.spec()} and {b.group.spec()}")


@dataclass(frozen=True)
class GroupElement:
    group: Group
    index: int

    @property
    def coordinates(self) -> tuple[int, ...]:
        return self.group.coords_of(self.index)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        _check_same_group(self, other)
        return GroupElement(self.group, self.group.add(self.index, other.index))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        _check_same_group(self, other)
        return GroupElement(self.group, self.group.sub(self.index, other.index))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, self.group.neg(self.index))

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(self.group, self.group.dilate_index(self.index, k))

    __rmul__ = __mul__

    def order(self) -> int:
        return self.group.order_of(self.index)

    def __repr__(self) -> str:
        if self.group.rank == 1:
            return f"<{self.index} in {self.group.spec()}>"
        return f"<{self.coordinates} in {self.group.spec()}>"

    def literal(self) -> str:
        if self.group.rank == 1:
            return str(self.index)
        return "(" + ",".join(str(x) for x in self.coordinates) + ")"


@dataclass(frozen=True)
class GroupSubset:
    """Subset of a group as a fixed-width bitset over element indices."""

    group: Group
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits > self.group.full_mask:
            raise InputError("bitset has bits outside the group")

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.cardinality

    def __contains__(self, e: "GroupElement | int") -> bool:
        i = e.index if isinstance(e, GroupElement) else e
        return (self.bits >> i) & 1 == 1

    def indices(self) -> tuple[int, ...]:
        return tuple(mask_indices(self.bits))

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self.group, i) for i in mask_indices(self.bits)]

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements())

    def translate(self, t: "GroupElement | int") -> "GroupSubset":
        ti = t.index if isinstance(t, GroupElement) else t
        return GroupSubset(self.group, self.group.translate(self.bits, ti))

    def negated(self) -> "GroupSubset":
        return GroupSubset(self.group, self.group.negate_mask(self.bits))

    def dilate(self, k: int) -> "GroupSubset":
        return GroupSubset(self.group, self.group.dilate_mask(self.bits, k))

    def __add__(self, other: "GroupSubset | GroupElement") -> "GroupSubset":
        _check_same_group(self, other)
        if isinstance(other, GroupElement):
            return self.translate(other)
        out = 0
        for t in mask_indices(other.bits):
            out |= self.group.translate(self.bits, t)
        return GroupSubset(self.group, out)

    def union(self, other: "GroupSubset") -> "GroupSubset":
        _check_same_group(self, other)
        return GroupSubset(self.group, self.bits | other.bits)

    def intersection(self, other: "GroupSubset") -> "GroupSubset":
        _check_same_group(self, other)
        return GroupSubset(self.group, self.bits & other.bits)

    def difference(self, other: "GroupSubset") -> "GroupSubset":
        _check_same_group(self, other)
        return GroupSubset(self.group, self.bits & ~other.bits)

    def literal(self) -> str:
        return "{" + ",".join(GroupElement(self.group, i).literal() for i in mask_indices(self.bits)) + "}"

    def __repr__(self) -> str:
        return f"GroupSubset({self.group.spec()}, {self.literal()})"

    def sort_key(self) -> tuple[int, ...]:
        return self.indices()


@dataclass(frozen=True)
class Subgroup:
    """A verified subgroup: carrier closed under + and -, containing 0."""

    carrier: GroupSubset
    generators: tuple[GroupElement, ...]

    @property
    def group(self) -> Group:
        return self.carrier.group

    @property
    def order(self) -> int:
        return self.carrier.cardinality

    def __contains__(self, e: GroupElement | int) -> bool:
        return e in self.carrier

    def __repr__(self) -> str:
        return f"Subgroup({self.group.spec()}, {self.carrier.literal()})"


def least_prime_order_member(group: Group, submask: int) -> int:
    """Member of a nontrivial subgroup bitset minimizing (prime order, index)."""
    best: tuple[int, int] | None = None
    for g in mask_indices(submask):
        if g == 0:
            continue
        o = group.order_of(g)
        pp = prime_power(o)
        if pp is not None and pp[1] == 1:
            if best is None or (o, g) < best:
                best = (o, g)
    if best is None:
        raise InputError("subgroup has no prime-order element (is it trivial?)")
    return best[1]


def is_subgroup_mask(group: Group, mask: int) -> bool:
    if not (mask & 1):
        return False
    members = list(mask_indices(mask))
    if group.order % len(members):
        return False
    for a in members:
        if group.translate(mask, a) != mask:
            return False
    return True


def closure_mask(group: Group, gens: Iterable[int]) -> int:
    """Bitset of the subgroup generated by the given element indices."""
    mask = 1
    frontier = [0]
    gen_list = [g for g in gens]
    for g in gen_list:
        if not (mask >> g) & 1:
            mask |= 1 << g
            frontier.append(g)
    while frontier:
        a = frontier.pop()
        for g in gen_list:
            s = group.add(a, g)
            if not (mask >> s) & 1:
                mask |= 1 << s
                frontier.append(s)
    return mask


def subgroup_generated(group: Group, gens: Iterable[GroupElement | int]) -> Subgroup:
    """Smallest subgroup containing the generators (breadth-first saturation)."""
    idx = [g.index if isinstance(g, GroupElement) else int(g) for g in gens]
    for g in idx:
        if not 0 <= g < group.order:
            raise InputError(f"generator index {g} out of range")
    mask = closure_mask(group, idx)
    return Subgroup(GroupSubset(group, mask), tuple(GroupElement(group, g) for g in idx))


def subgroup_from_carrier(group: Group, carrier: GroupSubset | int) -> Subgroup:
    """Wrap a known-closed carrier as a Subgroup, with a minimal generator scan."""
    mask = carrier.bits if isinstance(carrier, GroupSubset) else carrier
    if not is_subgroup_mask(group, mask):
        raise InputError("carrier is not a subgroup")
    gens: list[int] = []
    have = 1
    for a in mask_indices(mask):
        if not (have >> a) & 1:
            gens.append(a)
            have = closure_mask(group, gens)
            if have == mask:
                break
    return Subgroup(GroupSubset(group, mask), tuple(GroupElement(group, g) for g in gens))


# -- parsing ------------------------------------------------------------------

_GROUP_TERM = re.compile(r"^Z(\d+)(?:\^(\d+))?$")


def parse_group(spec: str, max_order: int = DEFAULT_MAX_ORDER) -> Group:
    """Parse 'Z<k>' terms joined by 'x', with '^e' repetition ("Z4xZ2^3")."""
    text = spec.strip().replace(" ", "")
    if not text:
        raise InputError("empty group spec")
    factors: list[int] = []
    for term in text.split("x"):
        m = _GROUP_TERM.match(term)
        if not m:
            raise InputError(f"bad group term {term!r} in spec {spec!r}")
        k = int(m.group(1))
        e = int(m.group(2)) if m.group(2) else 1
        if k < 1:
            raise InputError(f"cyclic factor must be >= 1, got Z{k}")
        if e < 1:
            raise InputError(f"repetition must be >= 1, got ^{e}")
        factors.extend([k] * e)
    return Group(factors, max_order=max_order)


def parse_element(group: Group, text: str) -> GroupElement:
    """Element literal: bare integer (rank 1 or raw index) or tuple '(a,b,...)'."""
    t = text.strip()
    if t.startswith("("):
        if not t.endswith(")"):
            raise InputError(f"unbalanced tuple literal {text!r}")
        parts = t[1:-1].split(",")
        if len(parts) != group.rank:
            raise InputError(
                f"tuple literal {text!r} has {len(parts)} coordinates, group has rank {group.rank}"
            )
        try:
            coords = [int(p) for p in parts]
        except ValueError as exc:
            raise InputError(f"bad tuple literal {text!r}") from exc
        return group.element(coords)
    try:
        idx = int(t)
    except ValueError as exc:
        raise InputError(f"bad element literal {text!r}") from exc
    if not 0 <= idx < group.order:
        raise InputError(f"element {idx} out of range for {group.spec()}")
    return GroupElement(group, idx)


def _split_top_level(text: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise InputError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise InputError(f"unbalanced parentheses in {text!r}")
    if cur or parts:
        parts.append("".join(cur))
    return parts


def parse_subset(group: Group, text: str) -> GroupSubset:
    """Subset literal '{e1,e2,...}' with element literals as in parse_element."""
    t = text.strip()
    if not (t.startswith("{") and t.endswith("}")):
        raise InputError(f"subset literal must be brace-delimited, got {text!r}")
    body = t[1:-1].strip()
    bits = 0
    if body:
        for part in _split_top_level(body):
            bits |= 1 << parse_element(group, part).index
    return GroupSubset(group, bits)
