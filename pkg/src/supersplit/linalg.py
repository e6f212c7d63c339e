"""Exact linear algebra over Q and small matrices over Laurent polynomials."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Hashable, Iterable, Mapping, Sequence

from .coeffring import LaurentPoly, LaurentRing, NotAUnitError

Matrix = list[list[Fraction]]


# -- dense rational matrices ---------------------------------------------------

def rational_inverse(a: Sequence[Sequence[Fraction]]) -> Matrix | None:
    """Gauss-Jordan inverse, or None when singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def row_reduce(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(row_reduce(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> Matrix:
    """A basis of {v : rows . v = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = row_reduce(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


# -- sparse rational systems ---------------------------------------------------

class SparseSystem:
    """Incremental exact elimination of sparse linear equations.

    Each equation is a mapping from unknown keys to coefficients together
    with a right-hand side.  ``solve`` returns one particular solution with
    free unknowns set to zero, or None when inconsistent.
    """

    def __init__(self) -> None:
        self._rows: list[tuple[dict[Hashable, Fraction], Fraction]] = []

    def add(self, coeffs: Mapping[Hashable, Fraction], rhs: Fraction = Fraction(0)) -> None:
        row = {k: Fraction(v) for k, v in coeffs.items() if v}
        self._rows.append((row, Fraction(rhs)))

    def __len__(self) -> int:
        return len(self._rows)

    def solve(self) -> dict[Hashable, Fraction] | None:
        pivots: dict[Hashable, tuple[dict[Hashable, Fraction], Fraction]] = {}
        order: list[Hashable] = []
        for row, rhs in self._rows:
            row = dict(row)
            # reduce against existing pivots
            changed = True
            while changed:
                changed = False
                for key in [k for k in row if k in pivots]:
                    f = row.pop(key, None)
                    if not f:
                        continue
                    prow, prhs = pivots[key]
                    for k, v in prow.items():
                        nv = row.get(k, 0) - f * v
                        if nv:
                            row[k] = nv
                        else:
                            row.pop(k, None)
                    rhs -= f * prhs
                    changed = True
            if not row:
                if rhs:
                    return None
                continue
            key = next(iter(row))
            inv = 1 / row.pop(key)
            prow = {k: v * inv for k, v in row.items()}
            prhs = rhs * inv
            # keep pivot rows fully reduced in the new pivot
            for other in order:
                orow, orhs = pivots[other]
                f = orow.pop(key, None)
                if f:
                    for k, v in prow.items():
                        nv = orow.get(k, 0) - f * v
                        if nv:
                            orow[k] = nv
                        else:
                            orow.pop(k, None)
                    pivots[other] = (orow, orhs - f * prhs)
            pivots[key] = (prow, prhs)
            order.append(key)
        return {key: pivots[key][1] for key in order if pivots[key][1]}


# -- matrices over Laurent polynomials -----------------------------------------

PolyMatrix = list[list[LaurentPoly]]


def poly_identity(ring: LaurentRing, n: int) -> PolyMatrix:
    return [[ring.const(int(i == j)) for j in range(n)] for i in range(n)]


def poly_matmul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0].ring.zero() if k else b[0][j].ring.zero()
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def poly_det(a: PolyMatrix, ring: LaurentRing) -> LaurentPoly:
    n = len(a)
    total = ring.zero()
    for perm in permutations(range(n)):
        term = ring.const(_perm_sign(perm))
        for i, j in enumerate(perm):
            term = term * a[i][j]
            if not term:
                break
        total = total + term
    return total


def poly_inverse(a: PolyMatrix, ring: LaurentRing) -> PolyMatrix:
    """Inverse by adjugate; the determinant must be a monomial unit."""
    n = len(a)
    if n == 0:
        return []
    det = poly_det(a, ring)
    dinv = det.unit_invert() if det else None
    if dinv is None:
        raise NotAUnitError("singular matrix")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = poly_det(minor, ring)
            row.append(cof * dinv if (i + j) % 2 == 0 else -(cof * dinv))
        out.append(row)
    return out


def poly_transpose(a: PolyMatrix) -> PolyMatrix:
    return [list(col) for col in zip(*a)] if a else []


def format_matrix(a: Iterable[Iterable[object]]) -> str:
    return "[" + "; ".join(", ".join(str(x) for x in row) for row in a) + "]"
