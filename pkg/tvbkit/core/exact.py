"""Exact rational and integer linear algebra.

Matrices are passed around as plain nested sequences of ints/Fractions
(rows first). The heavy lifting is delegated to sympy's DomainMatrix over
QQ and to the integer normal forms in ``sympy.matrices.normalforms``; this
module only converts in and out and fixes conventions (row vectors,
primitive integer scaling, deterministic ordering).
"""
from __future__ import annotations
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, List, Sequence, Tuple

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

Scalar = int | Fraction
Rows = Sequence[Sequence[Scalar]]
IntVector = Tuple[int, ...]
QVector = Tuple[Fraction, ...]


def qq(x: Scalar | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def shape(A: Rows, ncols: int | None = None) -> Tuple[int, int]:
    nrows = len(A)
    if nrows:
        widths = {len(r) for r in A}
        if len(widths) != 1:
            raise ValueError(f"ragged matrix: row widths {sorted(widths)}")
        return nrows, widths.pop()
    return 0, (ncols or 0)


def _dm(A: Rows, ncols: int | None = None) -> DomainMatrix:
    nrows, nc = shape(A, ncols)
    rows = []
    for r in A:
        row = []
        for x in r:
            f = qq(x)
            row.append(QQ(f.numerator, f.denominator))
        rows.append(row)
    return DomainMatrix(rows, (nrows, nc), QQ)


def _to_fraction(e) -> Fraction:
    return Fraction(int(e.numerator), int(e.denominator))


def _from_dm(dm: DomainMatrix) -> List[QVector]:
    return [tuple(_to_fraction(e) for e in row) for row in dm.to_list()]


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return sum((a * b for a, b in zip(u, v)), 0)


def matvec(A: Rows, v: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(dot(r, v) for r in A)


def transpose(A: Rows, ncols: int | None = None) -> List[Tuple[Scalar, ...]]:
    _, nc = shape(A, ncols)
    return [tuple(r[j] for r in A) for j in range(nc)]


def matmul(A: Rows, B: Rows) -> List[Tuple[Scalar, ...]]:
    Bt = transpose(B)
    return [tuple(dot(r, c) for c in Bt) for r in A]


def primitive(v: Iterable[Scalar]) -> IntVector:
    """Positive rational multiple of `v` with coprime integer entries."""
    v = [qq(x) for x in v]
    if not any(v):
        return tuple(0 for _ in v)
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(x) for x in ints if x), 0)
    return tuple(x // g for x in ints)


def as_int_vector(v: Iterable[Scalar]) -> IntVector:
    out = []
    for x in v:
        f = qq(x)
        if f.denominator != 1:
            raise ValueError(f"non-integral entry {f}")
        out.append(int(f))
    return tuple(out)


def rank(A: Rows, ncols: int | None = None) -> int:
    if not A:
        return 0
    return int(_dm(A, ncols).rank())


def rref(A: Rows, ncols: int | None = None) -> Tuple[List[QVector], Tuple[int, ...]]:
    """Reduced row echelon form: (nonzero rows, pivot columns)."""
    if not A:
        return [], ()
    R, pivots = _dm(A, ncols).rref()
    rows = _from_dm(R)[: len(pivots)]
    return rows, tuple(pivots)


def row_basis(A: Rows, ncols: int | None = None) -> List[IntVector]:
    """Primitive integer basis of the row space (rref rows, rescaled)."""
    rows, _ = rref(A, ncols)
    return [primitive(r) for r in rows]


def kernel_basis(A: Rows, ncols: int | None = None) -> List[IntVector]:
    """Primitive integer rows spanning the right kernel of `A`."""
    nrows, nc = shape(A, ncols)
    if nrows == 0:
        return [tuple(1 if i == j else 0 for j in range(nc)) for i in range(nc)]
    rows, pivots = rref(A, nc)
    free = [j for j in range(nc) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve_exact(A: Rows, b: Sequence[Scalar], ncols: int | None = None) -> QVector | None:
    """Unique solution of A x = b, or None when inconsistent.

    Raises ValueError when the solution is not unique.
    """
    nrows, nc = shape(A, ncols)
    if nrows != len(b):
        raise ValueError("right-hand side length does not match the matrix")
    if nrows == 0:
        if nc:
            raise ValueError("solution is not unique")
        return ()
    aug = [list(r) + [b_i] for r, b_i in zip(A, b)]
    rows, pivots = rref(aug, nc + 1)
    if nc in pivots:
        return None
    if len(pivots) < nc:
        raise ValueError("solution is not unique")
    x = [Fraction(0)] * nc
    for row, p in zip(rows, pivots):
        x[p] = row[nc]
    return tuple(x)


def det(A: Rows) -> Fraction:
    n, m = shape(A)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    return _to_fraction(_dm(A).det())


def inverse(A: Rows) -> List[QVector]:
    n, m = shape(A)
    if n != m or det(A) == 0:
        raise ValueError("matrix is not invertible")
    return _from_dm(_dm(A).inv())


def smith_invariants(V: Rows) -> List[int]:
    """Nonzero elementary divisors of an integer matrix, as positive ints."""
    if not V:
        return []
    M = Matrix([list(as_int_vector(r)) for r in V])
    return [abs(int(f)) for f in invariant_factors(M, domain=ZZ) if f != 0]


def hermite_extends_to_lattice_basis(V: Rows) -> bool:
    """True iff the (independent) integer rows of V extend to a basis of Z^cols."""
    if not V:
        return True
    if rank(V) != len(V):
        raise ValueError("rows are linearly dependent")
    divisors = smith_invariants(V)
    return len(divisors) == len(V) and all(d == 1 for d in divisors)


def hermite_columns(B: Rows) -> List[IntVector]:
    """Hermite normal form of the lattice spanned by the columns of B.

    Returned as rows of the (upper triangular) HNF matrix W; the columns of W
    generate the same lattice as the columns of B.
    """
    M = Matrix([list(as_int_vector(r)) for r in B])
    W = hermite_normal_form(M)
    return [tuple(int(x) for x in W.row(i)) for i in range(W.rows)]
