"""Anticanonical classes, Kaneyama bundles and their Fano classification."""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from tvbkit.core import exact
from tvbkit.core.exact import IntVector
from tvbkit.core.matroid import LinearIdealMatrix, matroid_from_coefficients
from tvbkit.core.polyhedral import QCone
from tvbkit.core.toric import Fan, is_product_of_projective_spaces, negative_ray_failures, require_valid_fan
from tvbkit.errors import CertificateError, ClassificationMismatchError, ValidationError
from tvbkit.services.bundle_service import (
    PEClass,
    ToricVectorBundle,
    ample_member,
    ci_check,
    deg_Y,
    nef_member,
    relation_degrees,
)


@dataclass
class KaneyamaBundle:
    bundle: ToricVectorBundle
    a: Tuple[int, ...]

    @property
    def fan(self) -> Fan:
        return self.bundle.fan


@dataclass
class KaneyamaClassification:
    nef: bool
    ample: bool
    reason: str
    anticanonical: PEClass
    blocks: List[List[int]] | None = None
    generic_nef: bool = False
    generic_ample: bool = False
    negative_ray_failures: List[Tuple[int, int]] = field(default_factory=list)


def ci_anticanonical(E: ToricVectorBundle) -> PEClass:
    report = ci_check(E)
    if not report.ok:
        raise CertificateError(f"anticanonical formula needs a CI bundle ({report.witness})")
    cl = E.class_lattice
    total = [0] * cl.rank
    for i in range(E.n):
        total = [t - x for t, x in zip(total, cl.class_of_ray(i))]
    for j in range(E.m):
        total = [t + x for t, x in zip(total, deg_Y(E, j).alpha)]
    for rel in relation_degrees(E):
        total = [t - x for t, x in zip(total, rel.degree.alpha)]
    return PEClass(tuple(total), E.r)


def kaneyama_validate(fan: Fan, ideal: LinearIdealMatrix, D: Sequence[Sequence[int]]) -> KaneyamaBundle:
    E = ToricVectorBundle(fan, ideal, D)
    N = E.nonnegative_diagram
    if E.n != E.m or any(N[i][j] != 0 for i in range(E.n) for j in range(E.m) if i != j):
        raise ValidationError("Kaneyama bundles need a square diagonal diagram in nonnegative form")
    a = tuple(N[i][i] for i in range(E.n))
    if any(x <= 0 for x in a):
        raise ValidationError("Kaneyama diagonal entries must be positive", [f"a_{i} = {x}" for i, x in enumerate(a) if x <= 0])
    if E.r != fan.dim:
        raise ValidationError(f"rank {E.r} differs from the base dimension {fan.dim}")
    failures = [
        f"cone {k} {list(cone)} is dependent in the matroid"
        for k, cone in enumerate(fan.max_cones)
        if not E.matroid.is_independent(cone)
    ]
    if failures:
        raise ValidationError("rays of a cone do not index a basis", failures)
    return KaneyamaBundle(bundle=E, a=a)


def x_sigma_matrix(K: KaneyamaBundle, k: int) -> List[Tuple[int, ...]]:
    cone = K.fan.max_cones[k]
    r = len(cone)
    d = [K.a[i] for i in cone]
    return [
        tuple((1 - r) * d[col] - 1 if row == col else d[col] - 1 for col in range(r))
        for row in range(r)
    ]


def x_sigma_cone(K: KaneyamaBundle, k: int) -> Tuple[QCone, bool]:
    """{t : X_sigma t >= 0}, and whether its generators lie in the negative orthant."""
    X = x_sigma_matrix(K, k)
    cone = QCone.from_halfspaces(len(X), X)
    negative = all(all(x <= 0 for x in g) for g in cone.generators)
    return cone, negative


def negative_orthant_test(K: KaneyamaBundle, k: int) -> bool:
    cone = K.fan.max_cones[k]
    return all(
        all(c <= 0 for c in K.fan.ray_coordinates(i, k))
        for i in range(K.fan.n)
        if i not in cone
    )


def kaneyama_classify(K: KaneyamaBundle) -> KaneyamaClassification:
    E = K.bundle
    minus_k = ci_anticanonical(E)
    generic_nef = nef_member(E, minus_k)
    generic_ample = ample_member(E, minus_k)

    failures = negative_ray_failures(K.fan)
    blocks = None if failures else is_product_of_projective_spaces(K.fan)
    if failures:
        k, i = failures[0]
        nef, ample = False, False
        reason = f"ray {i} has a positive coordinate in the basis of cone {k}"
    elif blocks is None:
        nef, ample = False, False
        reason = "base is not a product of projective spaces"
    elif len(blocks) > 1:
        nef = all(x == 1 for x in K.a)
        ample = False
        reason = f"product of {len(blocks)} projective spaces: nef iff every diagonal entry is 1, never ample"
    else:
        n = K.fan.dim
        a0 = min(K.a)
        excess = sum(K.a) - a0 - n * a0
        nef = excess <= n + 1 - a0
        ample = excess <= n - a0
        reason = f"projective space of dimension {n}: excess {excess}, a_min {a0}"

    logging.info("Kaneyama: nef=%s ample=%s (generic nef=%s ample=%s)", nef, ample, generic_nef, generic_ample)
    if (nef, ample) != (generic_nef, generic_ample):
        raise ClassificationMismatchError(
            f"closed form gives nef={nef}, ample={ample}; engine gives nef={generic_nef}, ample={generic_ample}"
        )
    return KaneyamaClassification(
        nef=nef,
        ample=ample,
        reason=reason,
        anticanonical=minus_k,
        blocks=blocks,
        generic_nef=generic_nef,
        generic_ample=generic_ample,
        negative_ray_failures=failures,
    )


def projective_space_cones(K: KaneyamaBundle) -> Tuple[QCone, QCone]:
    """Closed forms over P^n: Eff = <(-1,0),(a_max,1)>, Nef = <(-1,0),(a_min,1)>."""
    blocks = is_product_of_projective_spaces(K.fan)
    if blocks is None or len(blocks) != 1:
        raise ValidationError("closed-form cones are only available over projective space")
    eff = QCone.from_generators(2, [(-1, 0), (max(K.a), 1)])
    nef = QCone.from_generators(2, [(-1, 0), (min(K.a), 1)])
    return eff, nef


def tangent_bundle(fan: Fan) -> ToricVectorBundle:
    """Relations among the ray generators; row i marks the rays parallel to ray i."""
    require_valid_fan(fan)
    relations = exact.kernel_basis(exact.transpose(fan.rays, fan.dim), fan.n)
    ideal = LinearIdealMatrix.from_rows(relations, fan.n)
    matroid = matroid_from_coefficients(ideal)
    rows = [tuple(1 if j in matroid.closure({i}) else 0 for j in range(fan.n)) for i in range(fan.n)]
    return ToricVectorBundle(fan, ideal, rows)
