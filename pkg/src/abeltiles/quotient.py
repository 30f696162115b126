"""Quotients of finite abelian groups via Smith normal form.

The quotient G/H is presented on invariant factors.  The relation lattice is
spanned by the cyclic-order vectors n_j*e_j together with generators of H;
its Smith form U*M*V = D gives both the invariant factors (non-unit diagonal
entries) and, through U, an explicit projection in coordinates.  Keeping U
also yields the dual map: characters of G/H pull back to the characters of G
that annihilate H.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .groups import Group, GroupElement, GroupSubset, Subgroup, mask_indices


def smith_normal_form_left(mat: list[list[int]]) -> tuple[list[int], list[list[int]]]:
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns (diag, U) where U tracks the row operations, the implicit column
    operations are unimodular, and diag is the Smith chain d_1 | d_2 | ...
    (nonnegative, one entry per row; trailing zeros possible for rank-deficient
    input).
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [list(r) for r in mat]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]

    def run_elimination() -> None:
        t = 0
        while t < rows and t < cols:
            # Move a minimal-magnitude nonzero entry of the submatrix to (t, t).
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    v = a[i][j]
                    if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            bi, bj = best
            if bi != t:
                a[bi], a[t] = a[t], a[bi]
                u[bi], u[t] = u[t], u[bi]
            if bj != t:
                for r in a:
                    r[bj], r[t] = r[t], r[bj]
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                t += 1

    run_elimination()
    # Enforce the divisibility chain; a violation is fixed by folding the
    # later column into the earlier one and re-eliminating.
    k = min(rows, cols)
    while True:
        bad = None
        for i in range(k - 1):
            d1, d2 = a[i][i], a[i + 1][i + 1]
            if d1 and d2 and d2 % d1:
                bad = i
                break
        if bad is None:
            break
        for r in a:
            r[bad] += r[bad + 1]
        run_elimination()

    diag = [a[i][i] if i < cols else 0 for i in range(rows)]
    return diag, u


@dataclass(frozen=True)
class QuotientView:
    """G/H with explicit projection, canonical section, and dual pullback."""

    source: Group
    subgroup: Subgroup
    group: Group
    projection: tuple[int, ...]
    section: tuple[int, ...]
    invariant_factors: tuple[int, ...]
    left: tuple[tuple[int, ...], ...]
    kept: tuple[int, ...]
    diag: tuple[int, ...]

    def project_index(self, i: int) -> int:
        return self.projection[i]

    def project_element(self, e: GroupElement) -> GroupElement:
        return GroupElement(self.group, self.projection[e.index])

    def project_mask(self, mask: int) -> int:
        out = 0
        proj = self.projection
        while mask:
            b = mask & -mask
            out |= 1 << proj[b.bit_length() - 1]
            mask ^= b
        return out

    def project_subset(self, s: GroupSubset) -> GroupSubset:
        return GroupSubset(self.group, self.project_mask(s.bits))

    def lift_index(self, q: int) -> int:
        return self.section[q]

    def preimage_mask(self, qmask: int) -> int:
        out = 0
        for i, q in enumerate(self.projection):
            if (qmask >> q) & 1:
                out |= 1 << i
        return out

    def pullback_dual_index(self, q: int) -> int:
        """Source dual element whose character is chi_q composed with the projection."""
        src = self.source
        qc = self.group.coords_of(q)
        big_l = 1
        for d in self.diag:
            if d > 1:
                big_l = big_l * d // _gcd(big_l, d)
        coords = []
        for i, ni in enumerate(src.factors):
            # column i of U, restricted to kept rows, gives the image of e_i
            numer = 0
            for qj, row in zip(qc, self.kept):
                dj = self.diag[row]
                numer += qj * self.left[row][i] * (big_l // dj)
            val = ni * numer
            if val % big_l:
                raise ArithmeticError("dual pullback is not integral; projection data corrupt")
            coords.append((val // big_l) % ni)
        return src.index_of(coords)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


_QUOTIENT_CACHE: dict[tuple[tuple[int, ...], int], QuotientView] = {}


def quotient(group: Group, subgroup: Subgroup | GroupSubset | int) -> QuotientView:
    """Quotient of a group by a verified subgroup.

    The result is cached per (group, carrier) since property sweeps quotient
    by the same few subgroups over and over.
    """
    if isinstance(subgroup, Subgroup):
        hmask = subgroup.carrier.bits
        sub = subgroup
    else:
        hmask = subgroup.bits if isinstance(subgroup, GroupSubset) else int(subgroup)
        sub = None
    key = (group.factors, hmask)
    cached = _QUOTIENT_CACHE.get(key)
    if cached is not None:
        return cached

    from .groups import is_subgroup_mask, subgroup_from_carrier

    if not is_subgroup_mask(group, hmask):
        raise InputError("quotient by a set that is not a subgroup")
    if sub is None:
        sub = subgroup_from_carrier(group, hmask)

    s = group.rank
    columns: list[list[int]] = []
    for j, nj in enumerate(group.factors):
        col = [0] * s
        col[j] = nj
        columns.append(col)
    for g in sub.generators:
        columns.append(list(g.coordinates))
    mat = [[columns[c][r] for c in range(len(columns))] for r in range(s)]
    diag, left = smith_normal_form_left(mat)
    if any(d == 0 for d in diag):
        raise ArithmeticError("relation lattice is rank-deficient")  # impossible: contains n_j e_j

    kept = tuple(i for i, d in enumerate(diag) if d > 1)
    inv_factors = tuple(diag[i] for i in kept)
    qgroup = Group(inv_factors if inv_factors else (1,), max_order=group.order)

    proj = []
    for i in range(group.order):
        x = group.coords_of(i)
        qc = []
        for row in kept:
            y = sum(left[row][j] * x[j] for j in range(s))
            qc.append(y % diag[row])
        proj.append(qgroup.index_of(qc) if kept else 0)
    projection = tuple(proj)

    expected = group.order // sub.order
    if qgroup.order != expected or len(set(projection)) != expected:
        raise ArithmeticError("projection does not have the right number of cosets")
    for h in mask_indices(hmask):
        if projection[h] != 0:
            raise ArithmeticError("subgroup does not land in the quotient identity")

    section = [-1] * qgroup.order
    for i, q in enumerate(projection):
        if section[q] < 0:
            section[q] = i
    view = QuotientView(
        source=group,
        subgroup=sub,
        group=qgroup,
        projection=projection,
        section=tuple(section),
        invariant_factors=inv_factors,
        left=tuple(tuple(r) for r in left),
        kept=kept,
        diag=tuple(diag),
    )
    _QUOTIENT_CACHE[key] = view
    return view
