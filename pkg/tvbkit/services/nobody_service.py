"""Newton-Okounkov data of a bundle: the matrix M, global and per-class bodies.

Coordinates of the monomial X^a Y^b are ordered (b; a), so M acts as
[D -I ; E_K 0] on them. A class (alpha, beta) is a Cox-ring degree: the
monomial X^a Y^b has degree sum_j b_j deg(Y_j) + sum_i a_i deg(X_i).
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Mapping, Sequence, Tuple

import sympy

from tvbkit.config import settings
from tvbkit.core import exact
from tvbkit.core.exact import IntVector, dot
from tvbkit.core.matroid import FlagOfFlats, flag_indicator_matrix
from tvbkit.core.polyhedral import LatticePolytope, QCone, linear_image
from tvbkit.core.toric import divisor_polytope
from tvbkit.errors import MatroidError, TvbError, ValidationError
from tvbkit.services.bundle_service import (
    CERT_NONE,
    CERT_SPARSE,
    PEClass,
    ToricVectorBundle,
    deg_X,
    deg_Y,
    is_sparse,
)

CERT_INTERIOR_ROW = "interior_row"

Exponent = Tuple[int, ...]


@dataclass
class NOMatrix:
    rows: List[IntVector]
    flag: FlagOfFlats | None

    @property
    def shape(self) -> Tuple[int, int]:
        return exact.shape(self.rows)

    @property
    def columns(self) -> List[IntVector]:
        return exact.transpose(self.rows)


@dataclass
class CayleyData:
    alpha: IntVector
    beta: int
    fibers: Dict[int, LatticePolytope] = field(default_factory=dict)
    bundle: ToricVectorBundle | None = None

    def lattice_points(self) -> List[Tuple[IntVector, IntVector]]:
        """(b, m) pairs: b in the dilated simplex, m in the divisor polytope over it."""
        E = self.bundle
        points = []
        simplex = LatticePolytope(E.m, eq_A=[[1] * E.m], eq_b=[self.beta])
        for b in simplex.lattice_points():
            target = _class_over(E, b, self.alpha)
            for m in divisor_polytope(E.fan, target).lattice_points():
                points.append((b, m))
        return points


def _class_over(E: ToricVectorBundle, b: Sequence[int], alpha: Sequence[int]) -> IntVector:
    total = [0] * E.class_lattice.rank
    for j, bj in enumerate(b):
        for k, x in enumerate(deg_Y(E, j).alpha):
            total[k] += bj * x
    return tuple(t - a for t, a in zip(total, alpha))


def _symdeg_row(E: ToricVectorBundle) -> List[int]:
    return [1] * E.m + [g.degree.beta for g in E.extra]


def build_M(E: ToricVectorBundle, flag: FlagOfFlats | None = None) -> NOMatrix:
    """[D -I] rows, the Sym-degree row, then the indicators of F_2..F_r."""
    n = E.n
    width = E.m + len(E.extra)
    top = []
    for i, row in enumerate(E.diagram):
        extra = [g.column[i] for g in E.extra]
        top.append(tuple(row) + tuple(extra) + tuple(-1 if k == i else 0 for k in range(n)))
    middle = [tuple(_symdeg_row(E)) + (0,) * n]
    if E.extra_M_rows:
        tail = [tuple(r) for r in E.extra_M_rows]
        for r in tail:
            if len(r) != width + n:
                raise ValidationError(f"extra M row has {len(r)} entries, expected {width + n}")
        if flag is not None:
            logging.warning("Flag ignored: the document supplies the rows of M")
        return NOMatrix(rows=top + middle + tail, flag=None)
    if flag is None:
        raise MatroidError("a flag of flats is required to build M")
    if not E.matroid.is_maximal_flag(flag):
        raise MatroidError("flag is not a maximal flag of flats")
    indicators = flag_indicator_matrix(flag, E.m)[1:]
    tail = [tuple(r) + (0,) * (len(E.extra) + n) for r in indicators]
    return NOMatrix(rows=top + middle + tail, flag=flag)


def precondition_certificate(E: ToricVectorBundle, flag: FlagOfFlats) -> str:
    if is_sparse(E):
        return CERT_SPARSE
    for row in E.diagram:
        if E.matroid.row_in_open_maximal_face(row) == flag:
            return CERT_INTERIOR_ROW
    return CERT_NONE


def global_body(M: NOMatrix) -> QCone:
    rows, _ = M.shape
    return QCone.from_generators(rows, M.columns)


def p_alpha_beta(E: ToricVectorBundle, c: PEClass) -> LatticePolytope:
    """Exponents (b; a) of the monomials X^a Y^b of degree c."""
    n = E.n
    width = E.m + len(E.extra)
    col_alpha = [deg_Y(E, j).alpha for j in range(E.m)] + [g.degree.alpha for g in E.extra]
    x_alpha = [deg_X(E, i).alpha for i in range(n)]
    eq_A = [tuple(_symdeg_row(E)) + (0,) * n]
    eq_b = [c.beta]
    for k in range(E.class_lattice.rank):
        eq_A.append(tuple(a[k] for a in col_alpha) + tuple(a[k] for a in x_alpha))
        eq_b.append(c.alpha[k])
    return LatticePolytope(width + n, eq_A=eq_A, eq_b=eq_b)


def nobody_of_class(E: ToricVectorBundle, flag: FlagOfFlats | None, c: PEClass) -> LatticePolytope:
    M = build_M(E, flag)
    if flag is not None and precondition_certificate(E, flag) == CERT_NONE:
        logging.warning("Body of %s is a candidate: prime-cone hypothesis unverified", c)
    return linear_image(M.rows, p_alpha_beta(E, c))


def cayley_polytope(E: ToricVectorBundle, c: PEClass) -> CayleyData:
    data = CayleyData(alpha=c.alpha, beta=c.beta, bundle=E)
    failures = []
    for j in range(E.m):
        target = tuple(c.beta * x - a for x, a in zip(deg_Y(E, j).alpha, c.alpha))
        fiber = divisor_polytope(E.fan, target)
        if fiber.is_empty:
            failures.append(f"column {j}: class {list(target)} is not effective")
        data.fibers[j] = fiber
    if failures:
        raise ValidationError("Cayley structure needs every fiber class effective", failures)
    return data


def _monomials(m: int, degree: int) -> List[Exponent]:
    out = []
    for combo in combinations_with_replacement(range(m), degree):
        e = [0] * m
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _ideal_piece(E: ToricVectorBundle, degree: int, index: Dict[Exponent, int]) -> List[Tuple[Fraction, ...]]:
    """Coefficient vectors spanning L * k[y]_{degree - 1}."""
    if degree == 0:
        return []
    rows = []
    for mu in _monomials(E.m, degree - 1):
        for coeffs in E.ideal.coeffs:
            v = [Fraction(0)] * len(index)
            for j, c in enumerate(coeffs):
                if c:
                    e = list(mu)
                    e[j] += 1
                    v[index[tuple(e)]] += c
            rows.append(tuple(v))
    return rows


def _as_terms(E: ToricVectorBundle, f) -> Dict[Exponent, Fraction]:
    if isinstance(f, Mapping):
        return {tuple(int(x) for x in e): exact.qq(c) for e, c in f.items() if c}
    ys = sympy.symbols(f"y0:{E.m}")
    poly = sympy.Poly(sympy.sympify(f), *ys)
    return {tuple(int(x) for x in e): Fraction(int(c.p), int(c.q)) for e, c in poly.terms() if c != 0}


def _weight_vector(E: ToricVectorBundle, w) -> Sequence[int]:
    return E.diagram[w] if isinstance(w, int) else tuple(w)


def _in_span(rows: List[Sequence], v: Sequence, width: int) -> bool:
    if not any(v):
        return True
    if not rows:
        return False
    return exact.rank(rows, width) == exact.rank(list(rows) + [v], width)


def weight_quasivaluation(E: ToricVectorBundle, w, f) -> int | None:
    """max over g = f mod L of the least w-weight of a term of g; None if f lies in L."""
    terms = _as_terms(E, f)
    if not terms:
        return None
    degrees = {sum(e) for e in terms}
    if len(degrees) != 1:
        raise TvbError("quasivaluation needs a homogeneous polynomial")
    degree = degrees.pop()
    if degree > settings.DEGREE_CAP:
        raise TvbError(f"degree {degree} exceeds the degree cap {settings.DEGREE_CAP}")
    weights = _weight_vector(E, w)
    basis = _monomials(E.m, degree)
    index = {e: k for k, e in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for e, c in terms.items():
        vec[index[e]] = c
    ideal = _ideal_piece(E, degree, index)
    if _in_span(ideal, vec, len(basis)):
        return None
    weight = {e: dot(weights, e) for e in basis}
    for t in sorted(set(weight.values()), reverse=True):
        units = [tuple(1 if k == index[e] else 0 for k in range(len(basis))) for e in basis if weight[e] >= t]
        if _in_span(ideal + units, vec, len(basis)):
            return t
    raise TvbError("polynomial outside the span of all monomials")


def _intersect(U: List[Sequence], W: List[Sequence], width: int) -> List[Tuple[Fraction, ...]]:
    if not U or not W:
        return []
    stacked = exact.transpose(list(U) + [tuple(-x for x in w) for w in W], width)
    out = []
    for x in exact.kernel_basis(stacked, len(U) + len(W)):
        out.append(tuple(sum(x[k] * U[k][j] for k in range(len(U))) for j in range(width)))
    return exact.row_basis(out, width) if out else []


def section_dimension(E: ToricVectorBundle, c: PEClass) -> int:
    """dim of the degree-c part of the Cox ring, from the filtrations of the diagram rows."""
    beta = c.beta
    if beta < 0:
        return 0
    if beta > settings.DEGREE_CAP:
        raise TvbError(f"Sym-degree {beta} exceeds the degree cap {settings.DEGREE_CAP}")
    basis = _monomials(E.m, beta)
    width = len(basis)
    index = {e: k for k, e in enumerate(basis)}
    ideal = exact.row_basis(_ideal_piece(E, beta, index), width) if beta else []
    quotient_dim = width - len(ideal)
    if quotient_dim == 0:
        return 0
    weights = [[dot(row, e) for e in basis] for row in E.diagram]
    top = [beta * max(row) if beta else 0 for row in E.diagram]

    cl = E.class_lattice
    shift = tuple(x - a for x, a in zip(cl.klass(top), c.alpha))
    slack_polytope = LatticePolytope(
        E.n,
        eq_A=exact.transpose([cl.class_of_ray(i) for i in range(E.n)], cl.rank) if cl.rank else [],
        eq_b=shift if cl.rank else [],
    )
    total = 0
    for s in slack_polytope.lattice_points():
        tau = [t - x for t, x in zip(top, s)]
        space: List[Sequence] | None = None
        for i, t in enumerate(tau):
            if all(wt >= t for wt in weights[i]):
                continue
            units = [tuple(1 if k == idx else 0 for k in range(width)) for idx, wt in enumerate(weights[i]) if wt >= t]
            F = exact.row_basis(units + ideal, width) if units or ideal else []
            space = F if space is None else _intersect(space, F, width)
            if len(space) <= len(ideal):
                break
        dim = quotient_dim if space is None else len(space) - len(ideal)
        total += max(dim, 0)
    logging.debug("section dimension of %s: %d", c, total)
    return total
