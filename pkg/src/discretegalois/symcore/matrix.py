"""Small dense matrices over exact fields (RatFunc or Fraction entries).

Matrices are tuples of row tuples. Nothing here is clever; sizes stay tiny.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ZeroDenominatorError
from .ratfunc import RatFunc, substitute

Matrix = tuple


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def shape(M: Matrix) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def identity(n: int, variables: Sequence[str] = ()) -> Matrix:
    one = RatFunc.constant(1, variables)
    zero = RatFunc.constant(0, variables)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M)) if M else ()


def mat_map(f: Callable, M: Matrix) -> Matrix:
    return tuple(tuple(f(x) for x in row) for row in M)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, m = shape(A)
    m2, p = shape(B)
    if m != m2:
        raise ValueError("matrix shapes do not match")
    cols = transpose(B)
    out = []
    for row in A:
        new_row = []
        for col in cols:
            acc = None
            for a, b in zip(row, col):
                if a == 0 or b == 0:
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            new_row.append(acc if acc is not None else row[0] * 0)
        out.append(tuple(new_row))
    return tuple(out)


def mat_vec(A: Matrix, v: Sequence) -> tuple:
    return tuple(r[0] for r in mat_mul(A, tuple((x,) for x in v)))


def mat_eq(A: Matrix, B: Matrix) -> bool:
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_subs(M: Matrix, bindings) -> Matrix:
    return mat_map(lambda e: substitute(e, bindings), M)


def det(M: Matrix):
    n, m = shape(M)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    rows = [list(r) for r in M]
    sign = 1
    result = None
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return rows[0][0] * 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            sign = -sign
        p = rows[c][c]
        result = p if result is None else result * p
        for r in range(c + 1, n):
            if rows[r][c] != 0:
                f = rows[r][c] / p
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return result if sign == 1 else -result


def inverse(M: Matrix) -> Matrix:
    n, m = shape(M)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    if n == 2:
        d = det(M)
        if d == 0:
            raise ZeroDenominatorError("singular matrix")
        a, b = M[0]
        c, e = M[1]
        return ((e / d, -b / d), (-c / d, a / d))
    one = M[0][0] ** 0
    zero = M[0][0] * 0
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    red, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDenominatorError("singular matrix")
    return tuple(tuple(red[i][n:]) for i in range(n))


def row_reduce(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    if not rows:
        return [], []
    return _reduce_columns(rows, len(rows[0]))


def rank(M: Matrix) -> int:
    if not M:
        return 0
    return len(row_reduce([list(r) for r in M])[1])


@dataclass
class LinearSolution:
    """Affine solution set particular + span(basis), or an infeasibility witness.

    When inconsistent, ``witness`` is a row vector y with y*A = 0 and y*b != 0.
    """

    particular: list | None
    basis: list[list]
    witness: list | None = None


def solve_linear(A: Sequence[Sequence], b: Sequence, one, zero) -> LinearSolution:
    """Solve A x = b exactly over the field of ``one``/``zero``."""
    n = len(A)
    m = len(A[0]) if n else 0
    aug = [list(A[i]) + [b[i]] + [one if j == i else zero for j in range(n)] for i in range(n)]
    if n == 0:
        return LinearSolution([zero] * m, [[one if j == k else zero for j in range(m)] for k in range(m)])
    red, pivots = _reduce_columns(aug, m + 1)
    for row in red:
        if all(x == 0 for x in row[:m]) and row[m] != 0:
            return LinearSolution(None, [], witness=row[m + 1:])
    piv_cols = [c for c in pivots if c < m]
    x = [zero] * m
    for i, c in enumerate(piv_cols):
        x[c] = red[i][m]
    free = [c for c in range(m) if c not in piv_cols]
    basis = []
    for f in free:
        v = [zero] * m
        v[f] = one
        for i, c in enumerate(piv_cols):
            v[c] = -red[i][f]
        basis.append(v)
    return LinearSolution(x, basis)


def _reduce_columns(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Row reduce using pivots only among the first ``ncols`` columns."""
    rows = [list(r) for r in rows]
    n = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows, pivots


def check_infeasible(A: Sequence[Sequence], b: Sequence, y: Sequence) -> bool:
    """True iff y certifies that A x = b has no solution."""
    m = len(A[0]) if A else 0
    for j in range(m):
        s = sum((y[i] * A[i][j] for i in range(len(A)) if y[i] != 0 and A[i][j] != 0), Fraction(0))
        if s != 0:
            return False
    s = sum((y[i] * b[i] for i in range(len(A)) if y[i] != 0 and b[i] != 0), Fraction(0))
    return s != 0
