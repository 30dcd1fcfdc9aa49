"""Independent exact oracles over plain Fractions (no code shared with the package)."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

Row = list  # [c0, a1, ..., an] meaning c0 + sum a_i x_i >= 0


def solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system by Gauss-Jordan, or None if singular."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def satisfies(rows: Sequence[Row], x: Sequence[Fraction], eq_rows: Sequence[Row] = ()) -> bool:
    for r in rows:
        if r[0] + sum(ai * xi for ai, xi in zip(r[1:], x)) < 0:
            return False
    for r in eq_rows:
        if r[0] + sum(ai * xi for ai, xi in zip(r[1:], x)) != 0:
            return False
    return True


def vertices(rows: Sequence[Row], dim: int) -> set[tuple[Fraction, ...]]:
    """Vertices of a bounded polytope by intersecting every dim-subset of facets."""
    out = set()
    for combo in itertools.combinations(rows, dim):
        a = [list(r[1:]) for r in combo]
        b = [-r[0] for r in combo]
        x = solve(a, b)
        if x is not None and satisfies(rows, x):
            out.add(tuple(x))
    return out


def lp_feasible(a: list[list[Fraction]], b: list[Fraction]) -> bool:
    """Is there x >= 0 with A x = b?  Phase-one simplex, Bland's rule, exact."""
    m = len(a)
    if m == 0:
        return True
    n = len(a[0])
    rows = []
    for i, (ai, bi) in enumerate(zip(a, b)):
        ai = [Fraction(v) for v in ai]
        bi = Fraction(bi)
        if bi < 0:
            ai, bi = [-v for v in ai], -bi
        rows.append(ai + [Fraction(int(j == i)) for j in range(m)] + [bi])
    basis = [n + i for i in range(m)]  # artificials, cost 1 each
    width = n + m
    while True:
        # reduced cost of column j: c_j - sum over artificial basics of the column entry
        red = [Fraction(int(j >= n)) - sum(rows[i][j] for i in range(m) if basis[i] >= n)
               for j in range(width)]
        enter = next((j for j in range(width) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        i = best[1]  # phase one is bounded below, so a pivot row exists
        p = rows[i][enter]
        rows[i] = [v / p for v in rows[i]]
        for k in range(m):
            if k != i and rows[k][enter] != 0:
                f = rows[k][enter]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[i])]
        basis[i] = enter
    return sum(rows[i][-1] for i in range(m) if basis[i] >= n) == 0


def in_generated_set(point: Sequence[Fraction], points: Sequence[Sequence[Fraction]],
                     rays: Sequence[Sequence[Fraction]] = (), lines: Sequence[Sequence[Fraction]] = ()) -> bool:
    """point in conv(points) + cone(rays) + span(lines), decided by LP."""
    if not points:
        return False
    dim = len(point)
    cols = [list(p) + [1] for p in points]
    cols += [list(r) + [0] for r in rays]
    cols += [list(l) + [0] for l in lines] + [[-v for v in l] + [0] for l in lines]
    a = [[Fraction(c[k]) for c in cols] for k in range(dim + 1)]
    b = [Fraction(v) for v in point] + [Fraction(1)]
    return lp_feasible(a, b)


def fourier_motzkin(rows: Sequence[Row], k: int) -> list[Row]:
    """Eliminate variable k (1-based column) from inequality rows."""
    pos = [r for r in rows if r[k] > 0]
    neg = [r for r in rows if r[k] < 0]
    out = [list(r) for r in rows if r[k] == 0]
    for p in pos:
        for q in neg:
            a, b = p[k], -q[k]
            out.append([b * pi + a * qi for pi, qi in zip(p, q)])
    for r in out:
        r[k] = Fraction(0)
    return out


def extreme_points(pts: Sequence[Sequence[Fraction]]) -> set[tuple[Fraction, ...]]:
    """Points of the set not in the hull of the others."""
    uniq = list(dict.fromkeys(tuple(map(Fraction, p)) for p in pts))
    out = set()
    for i, p in enumerate(uniq):
        rest = uniq[:i] + uniq[i + 1:]
        if not rest or not in_generated_set(p, rest):
            out.add(p)
    return out
