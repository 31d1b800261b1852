"""Exact rational cones, lattice polytopes, Hilbert bases and affine monoids.

Everything is kept in primitive integer coordinates. The conversion between
generator and halfspace descriptions is a double description pass with the
constraints inserted in lexicographic order, so generator lists come out the
same on every run.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import ceil, floor, prod
from typing import Dict, List, Sequence, Tuple

from tvbkit.config import settings
from tvbkit.core import exact
from tvbkit.core.exact import IntVector, Scalar, dot
from tvbkit.errors import EnumerationLimitError, PolyhedralError


def _neg(v: Sequence[int]) -> IntVector:
    return tuple(-x for x in v)


def double_description(constraints: Sequence[Sequence[Scalar]], dim: int) -> Tuple[List[IntVector], List[IntVector]]:
    """Generators of {x : a.x >= 0 for every constraint a}.

    Returns (lineality basis, extreme rays modulo lineality).
    """
    cons = sorted({exact.primitive(a) for a in constraints if any(a)})
    lineality: List[IntVector] = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
    rays: List[IntVector] = []
    done: List[IntVector] = []

    for a in cons:
        k0 = next((k for k, l in enumerate(lineality) if dot(a, l) != 0), None)
        if k0 is not None:
            pivot = lineality[k0]
            s = dot(a, pivot)
            if s < 0:
                pivot, s = _neg(pivot), -s

            def project(v: IntVector) -> IntVector:
                t = dot(a, v)
                return exact.primitive(s * x - t * y for x, y in zip(v, pivot)) if t else v

            lineality = [project(l) for k, l in enumerate(lineality) if k != k0]
            rays = [project(r) for r in rays] + [pivot]
            done.append(a)
            continue

        values = [dot(a, r) for r in rays]
        zsets = [frozenset(k for k, c in enumerate(done) if dot(c, r) == 0) for r in rays]
        kept = [r for r, x in zip(rays, values) if x >= 0]
        pos = [i for i, x in enumerate(values) if x > 0]
        neg = [i for i, x in enumerate(values) if x < 0]
        for i in pos:
            for j in neg:
                common = zsets[i] & zsets[j]
                if any(k not in (i, j) and common <= zsets[k] for k in range(len(rays))):
                    continue
                p, n = rays[i], rays[j]
                kept.append(exact.primitive(values[i] * y - values[j] * x for x, y in zip(p, n)))
        rays = list(dict.fromkeys(kept))
        done.append(a)

    return exact.row_basis(lineality, dim) if lineality else [], sorted(rays)


class QCone:
    """Rational polyhedral cone; halfspaces read <h, x> >= 0.

    Either description may be given; the other is computed on demand.
    """

    def __init__(
        self,
        dim: int,
        generators: Sequence[Sequence[Scalar]] | None = None,
        halfspaces: Sequence[Sequence[Scalar]] | None = None,
    ):
        if generators is None and halfspaces is None:
            raise PolyhedralError("a cone needs generators or halfspaces")
        self.dim = dim
        for v in list(generators or []) + list(halfspaces or []):
            if len(v) != dim:
                raise PolyhedralError(f"vector {tuple(v)} does not live in dimension {dim}")
        self._given_generators = None if generators is None else [exact.primitive(g) for g in generators if any(g)]
        self._given_halfspaces = None if halfspaces is None else [exact.primitive(h) for h in halfspaces if any(h)]

    @classmethod
    def from_generators(cls, dim: int, generators: Sequence[Sequence[Scalar]]) -> "QCone":
        return cls(dim, generators=generators)

    @classmethod
    def from_halfspaces(cls, dim: int, halfspaces: Sequence[Sequence[Scalar]]) -> "QCone":
        return cls(dim, halfspaces=halfspaces)

    def __repr__(self) -> str:
        return f"QCone(dim={self.dim}, rays={self.extremal_generators}, lineality={self.lineality})"

    @cached_property
    def _v_rep(self) -> Tuple[List[IntVector], List[IntVector]]:
        if self._given_halfspaces is not None:
            return double_description(self._given_halfspaces, self.dim)
        lin_dual, facets = self._h_rep
        return double_description(facets + lin_dual + [_neg(e) for e in lin_dual], self.dim)

    @cached_property
    def _h_rep(self) -> Tuple[List[IntVector], List[IntVector]]:
        """(equations, facet normals), irredundant."""
        if self._given_generators is not None:
            return double_description(self._given_generators, self.dim)
        lin, rays = self._v_rep
        return double_description(rays + lin + [_neg(l) for l in lin], self.dim)

    @property
    def extremal_generators(self) -> List[IntVector]:
        return self._v_rep[1]

    @property
    def lineality(self) -> List[IntVector]:
        return self._v_rep[0]

    @property
    def generators(self) -> List[IntVector]:
        lin, rays = self._v_rep
        return rays + lin + [_neg(l) for l in lin]

    @property
    def equations(self) -> List[IntVector]:
        return self._h_rep[0]

    @property
    def facets(self) -> List[IntVector]:
        return self._h_rep[1]

    @property
    def halfspaces(self) -> List[IntVector]:
        eqs, facets = self._h_rep
        return facets + eqs + [_neg(e) for e in eqs]

    def dualize(self) -> "QCone":
        """Same cone with both descriptions materialized."""
        return QCone(self.dim, generators=self.generators, halfspaces=self.halfspaces)

    def dual_cone(self) -> "QCone":
        return QCone(self.dim, generators=self.halfspaces)

    def intersect(self, other: "QCone") -> "QCone":
        if other.dim != self.dim:
            raise PolyhedralError(f"cannot intersect cones of dimensions {self.dim} and {other.dim}")
        return QCone(self.dim, halfspaces=self.halfspaces + other.halfspaces)

    def contains(self, v: Sequence[Scalar]) -> bool:
        if self._given_halfspaces is not None:
            return all(dot(h, v) >= 0 for h in self._given_halfspaces)
        eqs, facets = self._h_rep
        return all(dot(e, v) == 0 for e in eqs) and all(dot(h, v) >= 0 for h in facets)

    def interior_contains(self, v: Sequence[Scalar]) -> bool:
        eqs, facets = self._h_rep
        if eqs:
            return False
        return all(dot(h, v) > 0 for h in facets)

    def same_cone(self, other: "QCone") -> bool:
        return all(other.contains(g) for g in self.generators) and all(self.contains(g) for g in other.generators)

    @property
    def dimension(self) -> int:
        return exact.rank(self.generators, self.dim) if self.generators else 0

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    def is_smooth_cone(self) -> bool:
        if not self.is_pointed:
            raise PolyhedralError("smoothness is defined for pointed cones only")
        rays = self.extremal_generators
        if not rays:
            return True
        if exact.rank(rays, self.dim) != len(rays):
            return False
        return exact.hermite_extends_to_lattice_basis(rays)

    @cached_property
    def hilbert_basis(self) -> List[IntVector]:
        """Minimal generating set of the lattice points of a pointed full-dimensional cone."""
        if not self.is_pointed:
            raise PolyhedralError("Hilbert basis requested for a cone with lineality")
        if not self.is_full_dimensional:
            raise PolyhedralError("Hilbert basis requested for a cone that is not full-dimensional")
        d = self.dim
        rays = self.extremal_generators
        candidates: Dict[IntVector, None] = dict.fromkeys(rays)
        for subset in combinations(rays, d):
            B = exact.transpose(subset, d)
            if exact.det(B) == 0:
                continue
            Binv = exact.inverse(B)
            W = exact.hermite_columns(B)
            box = [range(abs(W[i][i])) for i in range(d)]
            for x in product(*box):
                if not any(x):
                    continue
                lam = exact.matvec(Binv, x)
                frac = [l - floor(l) for l in lam]
                p = tuple(int(c) for c in exact.matvec(B, frac))
                if any(p):
                    candidates.setdefault(p, None)
        g = tuple(sum(col) for col in zip(*self.facets))
        ordered = sorted(candidates, key=lambda v: (dot(g, v), v))
        basis = []
        for x in ordered:
            gx = dot(g, x)
            if not any(dot(g, y) < gx and self.contains(tuple(a - b for a, b in zip(x, y))) for y in ordered):
                basis.append(x)
        logging.info("Hilbert basis: %d candidates, %d irreducible", len(ordered), len(basis))
        return sorted(basis)


class LatticePolytope:
    """Bounded polyhedron {x : A x = b, C x >= e, optionally x >= 0}.

    `marked` carries an optional list of distinguished points (with
    multiplicity), used for images of lattice points under linear maps.
    """

    def __init__(
        self,
        dim: int,
        eq_A: Sequence[Sequence[Scalar]] = (),
        eq_b: Sequence[Scalar] = (),
        ineq_C: Sequence[Sequence[Scalar]] = (),
        ineq_e: Sequence[Scalar] = (),
        nonnegative: bool = True,
        marked: Sequence[Sequence[Scalar]] | None = None,
    ):
        if len(eq_A) != len(eq_b) or len(ineq_C) != len(ineq_e):
            raise PolyhedralError("constraint matrix and right-hand side lengths differ")
        self.dim = dim
        self.eq_A = [tuple(exact.qq(x) for x in r) for r in eq_A]
        self.eq_b = tuple(exact.qq(x) for x in eq_b)
        self.ineq_C = [tuple(exact.qq(x) for x in r) for r in ineq_C]
        self.ineq_e = tuple(exact.qq(x) for x in ineq_e)
        self.nonnegative = nonnegative
        self.marked = None if marked is None else [tuple(p) for p in marked]

    @classmethod
    def from_points(cls, dim: int, points: Sequence[Sequence[Scalar]], marked=None) -> "LatticePolytope":
        """Convex hull of finitely many rational points."""
        if not points:
            return cls(dim, eq_A=[[0] * dim], eq_b=[1], nonnegative=False, marked=marked)
        cone = QCone.from_generators(dim + 1, [tuple(p) + (1,) for p in points])
        eqs, facets = cone._h_rep
        return cls(
            dim,
            eq_A=[e[:-1] for e in eqs],
            eq_b=[-e[-1] for e in eqs],
            ineq_C=[h[:-1] for h in facets],
            ineq_e=[-h[-1] for h in facets],
            nonnegative=False,
            marked=marked,
        )

    def satisfies(self, x: Sequence[Scalar]) -> bool:
        if self.nonnegative and any(v < 0 for v in x):
            return False
        if any(dot(r, x) != b for r, b in zip(self.eq_A, self.eq_b)):
            return False
        return all(dot(r, x) >= e for r, e in zip(self.ineq_C, self.ineq_e))

    @cached_property
    def vertices(self) -> List[Tuple[Fraction, ...]]:
        d = self.dim
        cons: List[Tuple[Fraction, ...]] = []
        for r, b in zip(self.eq_A, self.eq_b):
            cons.append(r + (-b,))
            cons.append(tuple(-x for x in r) + (b,))
        if self.nonnegative:
            cons.extend(tuple(1 if j == i else 0 for j in range(d + 1)) for i in range(d))
        for r, e in zip(self.ineq_C, self.ineq_e):
            cons.append(r + (-e,))
        cons.append(tuple(0 for _ in range(d)) + (1,))
        lin, rays = double_description(cons, d + 1)
        finite = [r for r in rays if r[-1] > 0]
        if not finite:
            return []
        if lin or len(finite) != len(rays):
            raise PolyhedralError("polytope is unbounded")
        return sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in finite)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def lattice_points(self, limit: int | None = None) -> List[IntVector]:
        """All integer points, by enumeration of the free coordinates of Ax = b."""
        limit = settings.ENUM_LIMIT if limit is None else limit
        verts = self.vertices
        if not verts:
            return []
        d = self.dim
        lo = [ceil(min(v[i] for v in verts)) for i in range(d)]
        hi = [floor(max(v[i] for v in verts)) for i in range(d)]
        if any(l > h for l, h in zip(lo, hi)):
            return []
        if self.eq_A:
            aug = [r + (b,) for r, b in zip(self.eq_A, self.eq_b)]
            rows, pivots = exact.rref(aug, d + 1)
            if d in pivots:
                return []
        else:
            rows, pivots = [], ()
        free = [i for i in range(d) if i not in pivots]
        count = prod(hi[i] - lo[i] + 1 for i in free)
        if count > limit:
            raise EnumerationLimitError(f"{count} candidate points exceed the enumeration limit {limit}")
        points = []
        for values in product(*(range(lo[i], hi[i] + 1) for i in free)):
            x: List[Scalar] = [0] * d
            for i, v in zip(free, values):
                x[i] = v
            ok = True
            for row, p in zip(rows, pivots):
                val = row[d] - sum(row[i] * x[i] for i in free)
                if val.denominator != 1 or not lo[p] <= val <= hi[p]:
                    ok = False
                    break
                x[p] = int(val)
            if ok and self.satisfies(x):
                points.append(tuple(int(v) for v in x))
        return sorted(points)

    def distinct_marked(self) -> List[Tuple[Scalar, ...]]:
        return sorted(set(self.marked or []))


def lattice_points(P: LatticePolytope) -> List[IntVector]:
    return P.lattice_points()


def linear_image(M: Sequence[Sequence[Scalar]], X: QCone | LatticePolytope):
    """Image under x -> M x; polytopes keep the images of their lattice points as marks."""
    rows, cols = exact.shape(M)
    if X.dim != cols:
        raise PolyhedralError(f"map with {cols} columns applied in dimension {X.dim}")
    if isinstance(X, QCone):
        return QCone.from_generators(rows, [exact.matvec(M, g) for g in X.generators])
    marked = [exact.matvec(M, p) for p in X.lattice_points()]
    images = [exact.matvec(M, v) for v in X.vertices]
    return LatticePolytope.from_points(rows, images, marked=marked)


@dataclass(frozen=True)
class MonoidMembership:
    member: bool
    witness: Tuple[int, ...] | None = None
    free_witness: Tuple[int, ...] | None = None


@dataclass
class AffineMonoid:
    """Monoid generated by `generators` (nonnegative coefficients) and `free` (any sign).

    `grading` must be >= 0 on every generator; generators of grade 0 are
    resolved exactly after the positive-grade part has been fixed.
    """

    generators: List[IntVector]
    grading: IntVector
    free: List[IntVector] = field(default_factory=list)

    def __post_init__(self):
        self.generators = [tuple(g) for g in self.generators]
        self.free = [tuple(g) for g in self.free]
        for g in self.generators:
            if dot(self.grading, g) < 0:
                raise PolyhedralError(f"grading is negative on generator {g}")
        for g in self.free:
            if dot(self.grading, g) != 0:
                raise PolyhedralError(f"grading is nonzero on free generator {g}")

    @property
    def free_generators(self) -> List[IntVector]:
        return self.free

    @property
    def dim(self) -> int:
        return len(self.grading)

    def member(self, v: Sequence[int], limit: int | None = None) -> MonoidMembership:
        limit = settings.ENUM_LIMIT if limit is None else limit
        v = tuple(v)
        target = dot(self.grading, v)
        if target < 0:
            return MonoidMembership(False)
        graded = [(k, dot(self.grading, g)) for k, g in enumerate(self.generators)]
        positive = [(k, s) for k, s in graded if s > 0]
        zero = [k for k, s in graded if s == 0]
        solver = self._residual_solver(zero)
        visited = 0

        def search(start: int, remaining: int, residual: Tuple[int, ...], coeffs: Dict[int, int]):
            nonlocal visited
            visited += 1
            if visited > limit:
                raise EnumerationLimitError(f"monoid search exceeded {limit} nodes")
            if remaining == 0:
                found = solver(residual)
                if found is None:
                    return None
                zc, fc = found
                witness = [0] * len(self.generators)
                for k, c in coeffs.items():
                    witness[k] = c
                for k, c in zip(zero, zc):
                    witness[k] += c
                return MonoidMembership(True, tuple(witness), tuple(fc) if self.free else None)
            for idx in range(start, len(positive)):
                k, s = positive[idx]
                if s > remaining:
                    continue
                g = self.generators[k]
                coeffs[k] = coeffs.get(k, 0) + 1
                hit = search(idx, remaining - s, tuple(a - b for a, b in zip(residual, g)), coeffs)
                coeffs[k] -= 1
                if not coeffs[k]:
                    del coeffs[k]
                if hit is not None:
                    return hit
            return None

        return search(0, target, v, {}) or MonoidMembership(False)

    def _residual_solver(self, zero: List[int]):
        """Decide r in N.zero_gens + Z.free; returns (zero coeffs, free coeffs) or None."""
        cols = [self.generators[k] for k in zero] + self.free
        nz = len(zero)
        if not cols:
            return lambda r: ([], []) if not any(r) else None
        A = exact.transpose(cols, self.dim)
        independent = exact.rank(cols, self.dim) == len(cols)
        cache: Dict[Tuple[int, ...], object] = {}

        def solve(r: Tuple[int, ...]):
            if r in cache:
                return cache[r]
            result = None
            if independent:
                x = exact.solve_exact(A, r, len(cols))
                if x is not None and all(c.denominator == 1 for c in x) and all(c >= 0 for c in x[:nz]):
                    xi = [int(c) for c in x]
                    result = (xi[:nz], xi[nz:])
            else:
                if self.free:
                    raise PolyhedralError("grading does not bound the search: dependent free generators")
                polytope = LatticePolytope(nz, eq_A=A, eq_b=r)
                points = polytope.lattice_points()
                if points:
                    result = (list(points[0]), [])
            cache[r] = result
            return result

        return solve


def monoid_member(S: AffineMonoid, v: Sequence[int]) -> MonoidMembership:
    return S.member(v)
