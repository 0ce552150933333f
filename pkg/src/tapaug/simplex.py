"""Exact two-phase simplex over the rationals.

The tableau is kept fraction-free: every entry is an integer and the true
value is entry / det, where det is the last pivot element (integer
preserving pivoting, Bareiss style). Pivot selection follows Bland's rule,
so the run is deterministic and cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass
class SimplexResult:
    x: list[Fraction]
    value: Fraction
    duals: list[Fraction]  # one per constraint row, sign convention of min c.x, A x (>=|=) b
    pivots: int


def _integer_row(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[list[int], int, int]:
    scale = lcm(rhs.denominator, *(c.denominator for c in coeffs))
    return [int(c * scale) for c in coeffs], int(rhs * scale), scale


def solve(c: Sequence[Fraction], rows: Sequence[tuple[Sequence[Fraction], str, Fraction]],
          max_pivots: int = 100_000) -> SimplexResult:
    """Minimise c.x subject to rows (coeffs, sense, rhs) with sense '>=' or '=', and x >= 0."""
    n = len(c)
    m = len(rows)
    senses = []
    int_rows: list[list[int]] = []
    rhs: list[int] = []
    flips: list[int] = []
    for coeffs, sense, b in rows:
        if sense not in (">=", "="):
            raise ValueError(f"unsupported sense {sense!r}")
        a, bi, scale = _integer_row([Fraction(v) for v in coeffs], Fraction(b))
        sign = -1 if bi < 0 else 1
        int_rows.append([sign * v for v in a])
        rhs.append(sign * bi)
        senses.append(sense)
        flips.append(sign * scale)

    # columns: structural | surplus (one per >= row) | artificial (one per row)
    surplus_col: dict[int, int] = {}
    for i, s in enumerate(senses):
        if s == ">=":
            surplus_col[i] = n + len(surplus_col)
    n_surplus = len(surplus_col)
    art0 = n + n_surplus
    width = art0 + m
    tab = []
    for i in range(m):
        row = int_rows[i] + [0] * (n_surplus + m) + [rhs[i]]
        if i in surplus_col:
            row[surplus_col[i]] = -1 if flips[i] > 0 else 1
        row[art0 + i] = 1
        tab.append(row)
    basis = [art0 + i for i in range(m)]
    det = 1

    # phase I objective row: reduced costs of sum(artificials)
    obj = [0] * (width + 1)
    for j in range(width + 1):
        if art0 <= j < width:
            continue
        obj[j] = -sum(tab[i][j] for i in range(m))
    # obj[-1] holds -(objective value) * det

    pivots = 0

    def pivot(p: int, q: int) -> None:
        nonlocal det, pivots
        prow = tab[p]
        pq = prow[q]
        for i in range(m):
            if i == p:
                continue
            row = tab[i]
            f = row[q]
            if f == 0:
                for j in range(width + 1):
                    row[j] = row[j] * pq // det
            else:
                for j in range(width + 1):
                    row[j] = (row[j] * pq - f * prow[j]) // det
        f = obj[q]
        for j in range(width + 1):
            obj[j] = (obj[j] * pq - f * prow[j]) // det
        det = pq
        if det < 0:
            for row in tab:
                row[:] = [-v for v in row]
            obj[:] = [-v for v in obj]
            det = -det
        basis[p] = q
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")

    def run(allowed: int) -> None:
        while True:
            q = next((j for j in range(allowed) if obj[j] < 0), None)
            if q is None:
                return
            best = None
            for i in range(m):
                a = tab[i][q]
                if a > 0:
                    # ratio tab[i][-1]/a; Bland tie-break on basic variable index
                    if best is None:
                        best = i
                        continue
                    lhs = tab[i][-1] * tab[best][q]
                    rhs_ = tab[best][-1] * a
                    if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[best]):
                        best = i
            if best is None:
                raise Unbounded("objective unbounded below")
            pivot(best, q)

    # Bland on all non-artificial columns in phase I (artificials never re-enter)
    run(art0)
    if obj[-1] != 0:
        raise Infeasible("no feasible point")
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= art0:
            q = next((j for j in range(art0) if tab[i][j] != 0), None)
            if q is not None:
                pivot(i, q)  # degenerate: rhs of row i is zero

    # phase II objective row: c_j*det - sum_i c_B(i) * tab[i][j]
    cfrac = [Fraction(v) for v in c]
    cscale = lcm(1, *(v.denominator for v in cfrac))
    cint = [int(v * cscale) for v in cfrac]
    cost = cint + [0] * (width - n)
    for j in range(width + 1):
        cj = cost[j] if j < width else 0
        obj[j] = cj * det - sum(cost[basis[i]] * tab[i][j] for i in range(m) if cost[basis[i]])
    run(art0)

    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = Fraction(tab[i][-1], det)
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    # reduced cost of artificial column i equals -y_i for the scaled, sign-flipped row
    duals = [Fraction(-obj[art0 + i], det * cscale) * flips[i] for i in range(m)]
    return SimplexResult(x, value, duals, pivots)
