"""Smooth complete fans, their class groups, divisor polytopes and positivity."""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import gcd
from typing import Dict, List, Sequence, Tuple

from tvbkit.core import exact
from tvbkit.core.exact import IntVector, dot
from tvbkit.core.polyhedral import AffineMonoid, LatticePolytope, QCone
from tvbkit.errors import PolyhedralError, ValidationError

# generic directions used to check that maximal cones do not overlap
_DIRECTION_BASE = 101


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: Tuple[IntVector, ...]
    max_cones: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, dim: int, rays: Sequence[Sequence[int]], max_cones: Sequence[Sequence[int]]) -> "Fan":
        return cls(
            dim=dim,
            rays=tuple(exact.as_int_vector(u) for u in rays),
            max_cones=tuple(tuple(sorted(c)) for c in max_cones),
        )

    @property
    def n(self) -> int:
        return len(self.rays)

    def cone_matrix(self, k: int) -> List[IntVector]:
        """Rays of maximal cone k as the columns of a d x d matrix."""
        return exact.transpose([self.rays[i] for i in self.max_cones[k]], self.dim)

    def coordinates_in_cone(self, v: Sequence[int], k: int) -> Tuple[Fraction, ...]:
        x = exact.solve_exact(self.cone_matrix(k), v, self.dim)
        if x is None:
            raise PolyhedralError(f"{tuple(v)} is not in the span of cone {k}")
        return x

    def ray_coordinates(self, ray: int, k: int) -> Tuple[Fraction, ...]:
        """Coordinates of a ray in the ray basis of maximal cone k."""
        return self.coordinates_in_cone(self.rays[ray], k)

    def character_vector(self, m: Sequence[int]) -> Tuple[int, ...]:
        return tuple(dot(u, m) for u in self.rays)

    @cached_property
    def class_lattice(self) -> "ClassLattice":
        return class_group(self)


@dataclass
class FanReport:
    ok: bool
    diagnostics: List[str] = field(default_factory=list)


def validate_fan(F: Fan) -> FanReport:
    problems: List[str] = []
    d = F.dim
    for i, u in enumerate(F.rays):
        if len(u) != d:
            problems.append(f"ray {i} has {len(u)} coordinates, expected {d}")
            continue
        if not any(u):
            problems.append(f"ray {i} is zero")
        elif reduce(gcd, (abs(x) for x in u)) != 1:
            problems.append(f"ray {i} {u} is not primitive")
    if problems:
        return FanReport(False, problems)

    for k, cone in enumerate(F.max_cones):
        if len(set(cone)) != d or any(not 0 <= i < F.n for i in cone):
            problems.append(f"cone {k} {list(cone)} does not consist of {d} distinct rays")
            continue
        if abs(exact.det(F.cone_matrix(k))) != 1:
            problems.append(f"cone {k} {list(cone)} is not smooth")
    used = {i for cone in F.max_cones for i in cone}
    for i in range(F.n):
        if i not in used:
            problems.append(f"ray {i} lies in no maximal cone")
    if problems:
        return FanReport(False, problems)

    ridges: Dict[Tuple[int, ...], List[int]] = {}
    for k, cone in enumerate(F.max_cones):
        for ridge in combinations(cone, d - 1):
            ridges.setdefault(ridge, []).append(k)
    for ridge, owners in sorted(ridges.items()):
        if len(owners) != 2:
            problems.append(f"ridge {list(ridge)} lies in {len(owners)} maximal cones {owners}, expected 2")
            continue
        normal = exact.kernel_basis([F.rays[i] for i in ridge], d)[0]
        sides = []
        for k in owners:
            (apex,) = set(F.max_cones[k]) - set(ridge)
            sides.append(dot(normal, F.rays[apex]))
        if sides[0] * sides[1] >= 0:
            problems.append(f"cones {owners} lie on the same side of ridge {list(ridge)}")

    if not problems:
        for shift in range(2):
            direction = tuple(_DIRECTION_BASE ** (j + shift) * (-1) ** (j + shift) for j in range(d))
            hits = [k for k in range(len(F.max_cones)) if all(c > 0 for c in F.coordinates_in_cone(direction, k))]
            if len(hits) != 1:
                problems.append(f"generic direction {direction} lies in {len(hits)} maximal cones")
    return FanReport(not problems, problems)


def require_valid_fan(F: Fan) -> Fan:
    report = validate_fan(F)
    if not report.ok:
        raise ValidationError("fan is not smooth and complete", report.diagnostics)
    return F


@dataclass(frozen=True)
class ClassLattice:
    """Cl(X) = Z^n / M, with the classes of the non-pivot rays as basis."""

    fan: Fan
    pivot_cone: int
    pivots: Tuple[int, ...]
    basis_rays: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.basis_rays)

    @cached_property
    def _pivot_inverse(self) -> List[Tuple[Fraction, ...]]:
        return exact.inverse([self.fan.rays[p] for p in self.pivots])

    def klass(self, a: Sequence[int]) -> IntVector:
        a_p = [a[p] for p in self.pivots]
        m = exact.matvec(self._pivot_inverse, a_p)
        return tuple(int(a[q] - dot(self.fan.rays[q], m)) for q in self.basis_rays)

    def class_of_ray(self, i: int) -> IntVector:
        return self.klass(tuple(1 if j == i else 0 for j in range(self.fan.n)))

    @cached_property
    def project(self) -> List[IntVector]:
        """(n - d) x n matrix whose column i is the class of ray i."""
        cols = [self.class_of_ray(i) for i in range(self.fan.n)]
        return exact.transpose(cols, self.rank)

    def section(self, c: Sequence[int]) -> IntVector:
        a = [0] * self.fan.n
        for q, x in zip(self.basis_rays, c):
            a[q] = int(x)
        return tuple(a)


def class_group(F: Fan) -> ClassLattice:
    k = max(range(len(F.max_cones)), key=lambda i: tuple(sorted(F.max_cones[i], reverse=True)))
    pivots = F.max_cones[k]
    basis = tuple(i for i in range(F.n) if i not in pivots)
    logging.debug("class group: pivot cone %d rays %s, basis rays %s", k, pivots, basis)
    return ClassLattice(fan=F, pivot_cone=k, pivots=pivots, basis_rays=basis)


def s_sigma(F: Fan, k: int) -> AffineMonoid:
    cl = F.class_lattice
    gens = [cl.class_of_ray(i) for i in range(F.n) if i not in F.max_cones[k]]
    cone = QCone.from_generators(cl.rank, gens)
    if cl.rank and not cone.is_smooth_cone():
        raise PolyhedralError(f"classes of the rays outside cone {k} are not a lattice basis")
    return AffineMonoid(generators=gens, grading=tuple(0 for _ in range(cl.rank)))


def c_sigma(F: Fan, k: int) -> QCone:
    cl = F.class_lattice
    return QCone.from_generators(cl.rank, [cl.class_of_ray(i) for i in range(F.n) if i not in F.max_cones[k]])


def nef_cone_of_base(F: Fan) -> QCone:
    return reduce(lambda a, b: a.intersect(b), (c_sigma(F, k) for k in range(len(F.max_cones))))


def divisor_polytope(F: Fan, d: Sequence[int]) -> LatticePolytope:
    """{m : <u_i, m> >= -s_i} for the fixed section s of the class d."""
    s = F.class_lattice.section(d)
    return LatticePolytope(F.dim, ineq_C=list(F.rays), ineq_e=[-x for x in s], nonnegative=False)


def negative_ray_failures(F: Fan) -> List[Tuple[int, int]]:
    """(cone, ray) pairs where the ray outside the cone has a positive coordinate."""
    failures = []
    for k, cone in enumerate(F.max_cones):
        for i in range(F.n):
            if i not in cone and any(c > 0 for c in F.ray_coordinates(i, k)):
                failures.append((k, i))
    return failures


def negative_ray_test(F: Fan) -> bool:
    return not negative_ray_failures(F)


def is_product_of_projective_spaces(F: Fan) -> List[List[int]] | None:
    """Blocks of rays, one per projective factor, or None."""
    base = F.max_cones[0]
    outside = [i for i in range(F.n) if i not in base]
    blocks: List[List[int]] = []
    covered: set[int] = set()
    for i in outside:
        coords = F.ray_coordinates(i, 0)
        if any(c not in (0, -1) for c in coords):
            return None
        support = {base[j] for j, c in enumerate(coords) if c == -1}
        if not support or support & covered:
            return None
        covered |= support
        blocks.append(sorted(support | {i}))
    if covered != set(base):
        return None
    expected = set()
    for omitted in _one_per_block(blocks):
        expected.add(frozenset(i for b in blocks for i in b) - frozenset(omitted))
    if expected != {frozenset(c) for c in F.max_cones} or len(F.max_cones) != len(expected):
        return None
    return sorted(blocks)


def _one_per_block(blocks: List[List[int]]):
    if not blocks:
        yield ()
        return
    for rest in _one_per_block(blocks[1:]):
        for i in blocks[0]:
            yield (i,) + rest
