import random
from itertools import product

import pytest

from tvbkit.core import exact
from tvbkit.core.polyhedral import (
    AffineMonoid,
    LatticePolytope,
    QCone,
    double_description,
    lattice_points,
    linear_image,
    monoid_member,
)
from tvbkit.errors import EnumerationLimitError, PolyhedralError


def test_orthant_halfspaces():
    C = QCone.from_generators(2, [(1, 0), (0, 1)])
    assert set(C.facets) == {(1, 0), (0, 1)}
    assert C.equations == []
    assert C.is_pointed and C.is_full_dimensional


def test_redundant_generator_is_dropped():
    C = QCone.from_generators(2, [(1, 0), (0, 1), (1, 1), (2, 0)])
    assert set(C.extremal_generators) == {(1, 0), (0, 1)}


def test_whole_space():
    C = QCone.from_halfspaces(2, [])
    assert C.dimension == 2
    assert not C.is_pointed
    assert len(C.lineality) == 2
    assert C.contains((-5, 7))


def test_half_plane_has_lineality():
    C = QCone.from_generators(2, [(1, 0), (-1, 0), (0, 1)])
    assert len(C.lineality) == 1
    assert set(C.facets) == {(0, 1)}
    with pytest.raises(PolyhedralError):
        C.hilbert_basis


def test_intersection():
    orthant = QCone.from_generators(2, [(1, 0), (0, 1)])
    assert orthant.intersect(orthant).same_cone(orthant)
    ray = QCone.from_halfspaces(1, [(1,)]).intersect(QCone.from_halfspaces(1, [(-1,)]))
    assert ray.dimension == 0
    assert ray.contains((0,))
    assert not ray.contains((1,))


def test_contains_and_interior():
    orthant = QCone.from_generators(2, [(1, 0), (0, 1)])
    assert orthant.contains((1, 2))
    assert not orthant.contains((-1, 0))
    assert orthant.interior_contains((1, 2))
    assert not orthant.interior_contains((0, 2))
    flat = QCone.from_generators(3, [(1, 0, 0), (0, 1, 0)])
    assert flat.contains((1, 1, 0))
    assert not flat.interior_contains((1, 1, 0))


def test_smooth_cones():
    assert QCone.from_generators(2, [(1, 0), (0, 1)]).is_smooth_cone()
    assert not QCone.from_generators(2, [(1, 0), (1, 2)]).is_smooth_cone()


def test_hilbert_basis_examples():
    assert QCone.from_generators(2, [(1, 0), (0, 1)]).hilbert_basis == [(0, 1), (1, 0)]
    assert QCone.from_generators(2, [(1, 0), (1, 3)]).hilbert_basis == [(1, 0), (1, 1), (1, 2), (1, 3)]
    with pytest.raises(PolyhedralError):
        QCone.from_generators(3, [(1, 0, 0), (0, 1, 0)]).hilbert_basis


def test_double_description_is_sorted_and_deduplicated():
    lin, rays = double_description([(1, 0), (0, 1), (2, 0)], 2)
    assert lin == []
    assert rays == sorted(rays)
    assert set(rays) == {(1, 0), (0, 1)}


def test_polytope_points():
    simplex = LatticePolytope(3, eq_A=[[1, 1, 1]], eq_b=[1])
    assert simplex.lattice_points() == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    empty = LatticePolytope(2, eq_A=[[1, 1]], eq_b=[-1])
    assert empty.is_empty
    assert lattice_points(empty) == []


def test_polytope_from_points():
    P = LatticePolytope.from_points(2, [(0, 0), (2, 0), (0, 2)])
    assert len(P.lattice_points()) == 6
    assert P.vertices == [(0, 0), (0, 2), (2, 0)]


def test_unbounded_polytope_is_rejected():
    with pytest.raises(PolyhedralError):
        LatticePolytope(1, ineq_C=[[1]], ineq_e=[0], nonnegative=False).vertices


def test_enumeration_limit():
    box = LatticePolytope(2, ineq_C=[[-1, 0], [0, -1]], ineq_e=[-10, -10])
    with pytest.raises(EnumerationLimitError):
        box.lattice_points(limit=5)


def test_linear_image():
    P = LatticePolytope.from_points(2, [(0, 0), (2, 0), (0, 2)])
    image = linear_image([[1, 1]], P)
    assert len(image.marked) == 6
    assert image.distinct_marked() == [(0,), (1,), (2,)]
    same = linear_image([[1, 0], [0, 1]], QCone.from_generators(2, [(1, 0), (0, 1)]))
    assert set(same.extremal_generators) == {(1, 0), (0, 1)}
    proj = linear_image([[1, 0, 0], [0, 1, 0]], QCone.from_generators(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert set(proj.extremal_generators) == {(1, 0), (0, 1)}


def test_monoid_membership():
    S = AffineMonoid(generators=[(1, 0), (0, 1)], grading=(1, 1))
    hit = monoid_member(S, (2, 3))
    assert hit.member and hit.witness == (2, 3)
    gaps = AffineMonoid(generators=[(2,), (3,)], grading=(1,))
    assert not gaps.member((1,)).member
    five = gaps.member((5,))
    assert five.member
    assert 2 * five.witness[0] + 3 * five.witness[1] == 5


def test_monoid_with_grade_zero_and_free_generators():
    S = AffineMonoid(generators=[(1, 0), (0, 1)], grading=(0, 1))
    assert S.member((3, 1)).member
    assert not S.member((-1, 0)).member
    F = AffineMonoid(generators=[(0, 1)], grading=(0, 1), free=[(1, 0)])
    hit = F.member((-5, 2))
    assert hit.member and hit.free_witness == (-5,)
    with pytest.raises(PolyhedralError):
        AffineMonoid(generators=[(0, -1)], grading=(0, 1))


def _random_cone(rng: random.Random, dim: int, bound: int) -> QCone:
    while True:
        gens = [tuple(rng.randint(-bound, bound) for _ in range(dim)) for _ in range(rng.randint(1, dim + 2))]
        gens = [g for g in gens if any(g)]
        if gens:
            return QCone.from_generators(dim, gens)


def test_dualize_roundtrip():
    rng = random.Random(42)
    for _ in range(200):
        C = _random_cone(rng, rng.randint(1, 4), 3)
        back = QCone.from_halfspaces(C.dim, C.halfspaces)
        assert back.same_cone(C)
        assert QCone.from_generators(C.dim, C.dual_cone().halfspaces).same_cone(C)
        both = C.dualize()
        assert both.same_cone(C)


def test_hilbert_basis_generates_lattice_points():
    rng = random.Random(5)
    cases = 0
    while cases < 200:
        u = (rng.randint(-3, 3), rng.randint(-3, 3))
        v = (rng.randint(-3, 3), rng.randint(-3, 3))
        if u[0] * v[1] - u[1] * v[0] == 0:
            continue
        C = QCone.from_generators(2, [u, v])
        basis = C.hilbert_basis
        assert all(C.contains(b) for b in basis)
        grading = tuple(sum(col) for col in zip(*C.facets))
        S = AffineMonoid(generators=basis, grading=grading)
        bound = 3 * max(abs(x) for x in u + v)
        for x in product(range(-bound, bound + 1), repeat=2):
            if C.contains(x):
                assert S.member(x).member, (u, v, x)
        cases += 1


def _decomposes(C, basis, x, memo) -> bool:
    if not any(x):
        return True
    if x not in memo:
        memo[x] = any(
            C.contains(y) and _decomposes(C, basis, y, memo)
            for y in (tuple(a - b for a, b in zip(x, h)) for h in basis)
        )
    return memo[x]


@pytest.mark.parametrize("dim, cases", [(3, 40), (4, 15)])
def test_hilbert_basis_generates_lattice_points_in_higher_dimension(dim, cases):
    rng = random.Random(31 + dim)
    done = 0
    while done < cases:
        rays = [tuple(rng.randint(-1, 2) for _ in range(dim)) for _ in range(dim)]
        if exact.det(exact.transpose(rays, dim)) == 0:
            continue
        C = QCone.from_generators(dim, rays)
        basis = C.hilbert_basis
        assert all(C.contains(b) for b in basis)
        memo = {}
        for x in product(range(-2, 3), repeat=dim):
            if C.contains(x):
                assert _decomposes(C, basis, x, memo), (rays, x)
        done += 1


def test_lattice_points_match_brute_force():
    rng = random.Random(9)
    for _ in range(200):
        dim = rng.randint(1, 3)
        k = 3
        box_C = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
        box_C += [tuple(-1 if j == i else 0 for j in range(dim)) for i in range(dim)]
        box_e = [-k] * (2 * dim)
        extra_C = [tuple(rng.randint(-2, 2) for _ in range(dim)) for _ in range(rng.randint(0, 3))]
        extra_e = [rng.randint(-4, 2) for _ in extra_C]
        eq_A, eq_b = [], []
        if dim > 1 and rng.random() < 0.3:
            eq_A = [tuple(rng.randint(-1, 1) for _ in range(dim))]
            eq_b = [rng.randint(-2, 2)]
        C, e = box_C + extra_C, box_e + extra_e
        P = LatticePolytope(dim, eq_A=eq_A, eq_b=eq_b, ineq_C=C, ineq_e=e, nonnegative=False)
        expected = sorted(
            x
            for x in product(range(-k, k + 1), repeat=dim)
            if all(exact.dot(r, x) >= b for r, b in zip(C, e)) and all(exact.dot(r, x) == b for r, b in zip(eq_A, eq_b))
        )
        assert P.lattice_points() == expected
