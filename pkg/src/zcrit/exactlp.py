"""Exact rational linear programming by two-phase tableau simplex.

Solves max c.x subject to M x = d, x >= 0 entirely over Fractions.
Bland's rule makes cycling impossible, so termination is unconditional.
The tableau keeps the artificial columns of phase 1 alive (never again
eligible to enter), which preserves the running basis inverse and lets
us read off exact dual vectors at optimality; callers use those to
build independently checkable certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence


class LinearProgramError(ValueError):
    pass


@dataclass
class SimplexResult:
    status: str                      # "optimal" | "infeasible" | "unbounded"
    x: Optional[List[Fraction]]      # primal optimum
    value: Optional[Fraction]        # objective at optimum
    dual: Optional[List[Fraction]]   # y with y.M >= c componentwise, y.d = value
    phase1_dual: Optional[List[Fraction]]  # on infeasibility: y.M >= 0, y.d < 0


def _pivot(tab: List[List[Fraction]], basis: List[int], row: int, col: int) -> None:
    m = len(basis)
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    for r in range(len(tab)):
        if r != row and tab[r][col] != 0:
            f = tab[r][col]
            tab[r] = [a - f * b for a, b in zip(tab[r], tab[row])]
    if row < m:
        basis[row] = col


def _run_phase(
    tab: List[List[Fraction]],
    basis: List[int],
    allowed: Sequence[bool],
) -> str:
    """Pivot to optimality of the objective stored in the last row.

    The objective row holds reduced costs for maximisation: entry j > 0
    means column j improves the objective. Bland's rule throughout.
    """
    m = len(basis)
    obj = len(tab) - 1
    while True:
        col = -1
        for j in range(len(tab[0]) - 1):
            if allowed[j] and tab[obj][j] > 0:
                col = j
                break
        if col < 0:
            return "optimal"
        row = -1
        best: Optional[Fraction] = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[row]
                ):
                    best = ratio
                    row = i
        if row < 0:
            return "unbounded"
        _pivot(tab, basis, row, col)


def simplex_solve(
    M: Sequence[Sequence[Fraction]],
    d: Sequence[Fraction],
    c: Sequence[Fraction],
) -> SimplexResult:
    """max c.x subject to M x = d, x >= 0, everything exact."""
    m = len(M)
    n = len(c)
    if any(len(row) != n for row in M) or len(d) != m:
        raise LinearProgramError("inconsistent system dimensions")
    if m == 0:
        if all(ci <= 0 for ci in c):
            return SimplexResult("optimal", [Fraction(0)] * n, Fraction(0), [], None)
        return SimplexResult("unbounded", None, None, None, None)

    flip = [di < 0 for di in d]
    rows = [
        [(-v if flip[i] else v) for v in M[i]] + _unit(m, i) + [abs(Fraction(d[i]))]
        for i in range(m)
    ]
    width = n + m + 1
    basis = [n + i for i in range(m)]

    # phase 1: maximise minus the sum of artificials; the bottom row
    # holds reduced costs and, in its last slot, minus the objective
    obj = [Fraction(0)] * width
    for i in range(m):
        obj = [o + v for o, v in zip(obj, rows[i])]
    for i in range(m):
        obj[n + i] = Fraction(0)
    tab = rows + [obj]
    allowed = [True] * n + [False] * m
    status = _run_phase(tab, basis, allowed)
    if status != "optimal":
        raise LinearProgramError("phase 1 cannot be unbounded")
    if tab[-1][-1] != 0:
        # infeasible: y = c_B B^-1 from the artificial columns gives a
        # certificate with y.M >= 0 componentwise and y.d < 0
        y = [
            (Fraction(-1) - tab[-1][n + i]) * (-1 if flip[i] else 1)
            for i in range(m)
        ]
        return SimplexResult("infeasible", None, None, None, y)

    # drive any zero-level artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
            # an all-zero row is a redundant constraint; its artificial
            # stays basic at level zero and never moves again

    # phase 2: real objective expressed through the current basis
    obj = [Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    for i in range(m):
        if basis[i] < n and obj[basis[i]] != 0:
            f = obj[basis[i]]
            obj = [a - f * b for a, b in zip(obj, tab[i])]
    tab[-1] = obj
    status = _run_phase(tab, basis, allowed)
    if status == "unbounded":
        return SimplexResult("unbounded", None, None, None, None)

    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    # y = c_B B^{-1} appears negated in the artificial part of the
    # objective row; undo the row sign flips from the start
    dual = [-tab[-1][n + i] * (-1 if flip[i] else 1) for i in range(m)]
    return SimplexResult("optimal", x, value, dual, None)


def _unit(m: int, i: int) -> List[Fraction]:
    out = [Fraction(0)] * m
    out[i] = Fraction(1)
    return out


def solve_linear_system(
    A: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> tuple:
    """Exact Gaussian elimination for A x = rhs.

    Returns ("solution", x) picking zero for the free variables, or
    ("inconsistent", y) with a row combination y satisfying y.A = 0 and
    y.rhs = 1.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    # augment with the identity to track the row operations
    work = [list(map(Fraction, A[i])) + _unit(m, i) + [Fraction(rhs[i])] for i in range(m)]
    pivots: List[tuple] = []
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, m) if work[i][col] != 0), None)
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        piv = work[r][col]
        work[r] = [v / piv for v in work[r]]
        for i in range(m):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if work[i][-1] != 0:
            scale = work[i][-1]
            y = [v / scale for v in work[i][n:n + m]]
            return ("inconsistent", y)
    x = [Fraction(0)] * n
    for row, col in pivots:
        x[col] = work[row][-1]
    return ("solution", x)
