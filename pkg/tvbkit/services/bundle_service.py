"""Toric vector bundles given by (fan, linear ideal, diagram).

Validation of the diagram against the matroid, the CI / sparse / uniform /
monomial classification, Cox-ring degrees and the Nef / basepoint-free
engine built from the sites (cone, maximal proper flat of the cone's initial
matroid).
"""
from __future__ import annotations
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from tvbkit.config import settings
from tvbkit.core import exact
from tvbkit.core.exact import IntVector
from tvbkit.core.matroid import Flat, LinearIdealMatrix, Matroid, matroid_from_coefficients
from tvbkit.core.polyhedral import AffineMonoid, MonoidMembership, QCone
from tvbkit.core.toric import ClassLattice, Fan, require_valid_fan
from tvbkit.errors import CertificateError, MatroidError, ValidationError

Diagram = Tuple[IntVector, ...]

CERT_SPARSE = "sparse"
CERT_CI = "ci"
CERT_NONE = "none"


@dataclass(frozen=True)
class PEClass:
    """Element (alpha, beta) of Cl(X) x Z; beta is the Sym-degree."""

    alpha: IntVector
    beta: int

    @property
    def vector(self) -> IntVector:
        return tuple(self.alpha) + (self.beta,)

    @classmethod
    def from_vector(cls, v: Sequence[int]) -> "PEClass":
        v = tuple(int(x) for x in v)
        return cls(alpha=v[:-1], beta=v[-1])

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.alpha) + ";" + str(self.beta) + ")"


@dataclass
class Site:
    cone: int
    flat: Flat
    label: str
    monoid: AffineMonoid
    cone_hull: QCone


@dataclass
class DiagramReport:
    ok: bool
    diagnostics: List[str] = field(default_factory=list)
    apartments: Dict[int, Tuple[int, ...]] = field(default_factory=dict)


@dataclass
class CIReport:
    ok: bool
    witness: str | None = None


@dataclass
class RelationDegree:
    generator: int
    delta: IntVector
    degree: PEClass


@dataclass
class BpfResult:
    member: bool
    failing_sites: List[str] = field(default_factory=list)
    witnesses: Dict[str, Tuple[int, ...]] = field(default_factory=dict)


@dataclass
class FujitaGap:
    klass: PEClass
    site: str


@dataclass
class ColoopReport:
    ok: bool
    cover: Dict[int, List[int]] = field(default_factory=dict)
    circuit_zero_check: bool = False


@dataclass
class ExtensionReport:
    dominance: bool
    circuit_minimum: bool
    uniform: bool
    guarantees: List[str] = field(default_factory=list)


@dataclass
class ExtraGenerator:
    """Cox generator of higher Sym-degree supplied by hand, with its diagram column."""

    column: IntVector
    degree: PEClass


def nonnegative_form(D: Sequence[Sequence[int]]) -> Diagram:
    return twist(D, [-min(row) for row in D])


def twist(D: Sequence[Sequence[int]], r: Sequence[int]) -> Diagram:
    if len(r) != len(D):
        raise ValidationError(f"twist vector has {len(r)} entries for {len(D)} diagram rows")
    return tuple(tuple(int(x) + int(t) for x in row) for row, t in zip(D, r))


def validate_diagram(fan: Fan, matroid: Matroid, D: Sequence[Sequence[int]]) -> DiagramReport:
    report = DiagramReport(ok=True)
    if len(D) != fan.n:
        report.ok = False
        report.diagnostics.append(f"diagram has {len(D)} rows, the fan has {fan.n} rays")
        return report
    for i, row in enumerate(D):
        if len(row) != matroid.ground_size:
            report.ok = False
            report.diagnostics.append(f"row {i} has {len(row)} entries, expected {matroid.ground_size}")
    if not report.ok:
        return report
    for i, row in enumerate(D):
        if not matroid.trop_membership(row):
            report.ok = False
            report.diagnostics.append(f"row {i} {list(row)} is not in the tropical linear space")
    if not report.ok:
        return report
    for k, cone in enumerate(fan.max_cones):
        witness = next(
            (B for B in matroid.bases if all(matroid.apartment_membership(B, D[i]) for i in cone)),
            None,
        )
        if witness is None:
            report.ok = False
            report.diagnostics.append(f"rows of cone {k} {list(cone)} share no apartment")
        else:
            report.apartments[k] = witness
    return report


class ToricVectorBundle:
    def __init__(
        self,
        fan: Fan,
        ideal: LinearIdealMatrix,
        diagram: Sequence[Sequence[int]],
        extra: Sequence[ExtraGenerator] = (),
        extra_M_rows: Sequence[Sequence[int]] = (),
        validate: bool = True,
    ):
        self.fan = fan
        self.ideal = ideal
        self.diagram: Diagram = tuple(tuple(int(x) for x in row) for row in diagram)
        self.extra = list(extra)
        self.extra_M_rows = [tuple(r) for r in extra_M_rows]
        if validate:
            self.validate()

    def validate(self) -> DiagramReport:
        require_valid_fan(self.fan)
        report = validate_diagram(self.fan, self.matroid, self.diagram)
        if not report.ok:
            raise ValidationError("diagram is not compatible with the fan and the ideal", report.diagnostics)
        for g in self.extra:
            if len(g.column) != self.n:
                raise ValidationError(f"extra column {g.column} needs {self.n} entries")
            if len(g.degree.alpha) != self.class_lattice.rank:
                raise ValidationError(f"extra degree {g.degree} does not live in the class group")
        return report

    @property
    def n(self) -> int:
        return self.fan.n

    @property
    def m(self) -> int:
        return self.ideal.m

    @property
    def r(self) -> int:
        return self.m - self.ideal.generator_count

    @cached_property
    def matroid(self) -> Matroid:
        return matroid_from_coefficients(self.ideal)

    @property
    def class_lattice(self) -> ClassLattice:
        return self.fan.class_lattice

    @cached_property
    def nonnegative_diagram(self) -> Diagram:
        return nonnegative_form(self.diagram)

    def column(self, j: int) -> IntVector:
        return tuple(row[j] for row in self.diagram)

    def cone_weight(self, k: int) -> IntVector:
        """Sum of the diagram rows of the rays of maximal cone k."""
        rows = [self.diagram[i] for i in self.fan.max_cones[k]]
        return tuple(sum(col) for col in zip(*rows))

    @cached_property
    def initial_matroids(self) -> Dict[int, Matroid]:
        return {k: self.matroid.initial_matroid(self.cone_weight(k)) for k in range(len(self.fan.max_cones))}

    def twisted(self, r: Sequence[int]) -> "ToricVectorBundle":
        return ToricVectorBundle(
            self.fan,
            self.ideal,
            twist(self.diagram, r),
            extra=self.extra,
            extra_M_rows=self.extra_M_rows,
            validate=False,
        )


def klyachko_flat(E: ToricVectorBundle, i: int, t: int) -> Flat:
    row = E.nonnegative_diagram[i]
    return E.matroid.closure(j for j, x in enumerate(row) if x >= t)


def is_sparse(E: ToricVectorBundle) -> bool:
    return all(sum(1 for x in row if x) <= 1 for row in E.nonnegative_diagram)


def is_monomial(E: ToricVectorBundle) -> bool:
    return all(M.has_unique_basis for M in E.initial_matroids.values())


def homogenization_degrees(E: ToricVectorBundle) -> List[IntVector]:
    """delta_k: per ray, the least diagram entry over the support of generator k."""
    D = E.diagram
    out = []
    for k in range(E.ideal.generator_count):
        supp = sorted(E.ideal.support(k))
        out.append(tuple(min(row[j] for j in supp) for row in D))
    return out


def _m_rank(E: ToricVectorBundle, A: Sequence[int], deltas: List[IntVector]) -> int:
    D = E.diagram
    rows = []
    for k, coeffs in enumerate(E.ideal.coeffs):
        rows.append(
            tuple(
                c if c != 0 and all(D[i][j] == deltas[k][i] for i in A) else 0
                for j, c in enumerate(coeffs)
            )
        )
    return exact.rank(rows, E.m) if rows else 0


def ci_check(E: ToricVectorBundle) -> CIReport:
    """Rank conditions on the common-minimum matrices M_A."""
    relations = E.ideal.generator_count
    if relations == 0:
        return CIReport(True)
    deltas = homogenization_degrees(E)
    ranks: Dict[Tuple[int, ...], int] = {}
    for size in range(1, E.n + 1):
        for A in combinations(range(E.n), size):
            ranks[A] = _m_rank(E, A, deltas)
            if not relations < size + ranks[A]:
                return CIReport(False, f"A={list(A)}: {relations} >= {size} + {ranks[A]}")
    for B, mB in ranks.items():
        if len(B) < 2:
            continue
        for i in B:
            if not 1 + ranks[(i,)] < len(B) + mB:
                return CIReport(False, f"B={list(B)}, i={i}: 1 + {ranks[(i,)]} >= {len(B)} + {mB}")
    return CIReport(True)


def uniform_ci_check(E: ToricVectorBundle) -> bool:
    if not E.matroid.is_uniform:
        raise MatroidError("uniform CI criterion needs a uniform matroid")
    D = E.nonnegative_diagram
    for size in range(1, E.n + 1):
        for A in combinations(range(E.n), size):
            cols = {j for i in A for j, x in enumerate(D[i]) if x}
            if len(cols) > E.r + size - 2:
                return False
    return True


def certificate(E: ToricVectorBundle) -> str:
    if is_sparse(E):
        return CERT_SPARSE
    if ci_check(E).ok:
        return CERT_CI
    return CERT_NONE


def require_certificate(E: ToricVectorBundle, force: bool = False) -> str:
    cert = certificate(E)
    if cert == CERT_NONE:
        if not force:
            raise CertificateError("no Sym-degree-1 certificate (bundle is neither sparse nor CI); use --force")
        logging.warning("No Sym-degree-1 certificate; continuing without it")
    else:
        logging.info("Sym-degree-1 certificate: %s", cert)
    return cert


def deg_X(E: ToricVectorBundle, i: int) -> PEClass:
    return PEClass(tuple(-x for x in E.class_lattice.class_of_ray(i)), 0)


def deg_Y(E: ToricVectorBundle, j: int) -> PEClass:
    return PEClass(E.class_lattice.klass(E.column(j)), 1)


def relation_degrees(E: ToricVectorBundle) -> List[RelationDegree]:
    return [
        RelationDegree(k, delta, PEClass(E.class_lattice.klass(delta), 1))
        for k, delta in enumerate(homogenization_degrees(E))
    ]


def _grading(E: ToricVectorBundle) -> IntVector:
    return tuple(0 for _ in range(E.class_lattice.rank)) + (1,)


def eff_data(E: ToricVectorBundle) -> Tuple[AffineMonoid, QCone]:
    if certificate(E) == CERT_NONE:
        logging.warning("Effective data without a Sym-degree-1 certificate is advisory")
    gens = [deg_X(E, i).vector for i in range(E.n)]
    gens += [deg_Y(E, j).vector for j in range(E.m)]
    gens += [g.degree.vector for g in E.extra]
    dim = E.class_lattice.rank + 1
    return AffineMonoid(generators=gens, grading=_grading(E)), QCone.from_generators(dim, gens)


def _site_label(k: int, flat: Flat, m: int) -> str:
    return f"{k}:" + "".join("0" if j in flat else "1" for j in range(m))


def _sites_of_cone(E: ToricVectorBundle, k: int) -> List[Site]:
    cone = E.fan.max_cones[k]
    xs = [deg_X(E, i).vector for i in range(E.n) if i not in cone]
    extras = [g.degree.vector for g in E.extra]
    dim = E.class_lattice.rank + 1
    sites = []
    for F in E.initial_matroids[k].maximal_proper_flats:
        gens = xs + [deg_Y(E, j).vector for j in range(E.m) if j not in F] + extras
        sites.append(
            Site(
                cone=k,
                flat=F,
                label=_site_label(k, F, E.m),
                monoid=AffineMonoid(generators=gens, grading=_grading(E)),
                cone_hull=QCone.from_generators(dim, gens),
            )
        )
    return sites


def nef_bpf_sites(E: ToricVectorBundle, force: bool = False) -> List[Site]:
    require_certificate(E, force)
    cones = range(len(E.fan.max_cones))
    E.initial_matroids  # computed once before the workers share it
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        per_cone = list(pool.map(lambda k: _sites_of_cone(E, k), cones))
    sites = [s for batch in per_cone for s in batch]
    logging.info("Sites: %d over %d maximal cones", len(sites), len(per_cone))
    return sites


def nef_cone(E: ToricVectorBundle, force: bool = False, sites: List[Site] | None = None) -> QCone:
    sites = nef_bpf_sites(E, force) if sites is None else sites
    dim = E.class_lattice.rank + 1
    return QCone.from_halfspaces(dim, [h for s in sites for h in s.cone_hull.halfspaces])


def nef_member(E: ToricVectorBundle, c: PEClass, force: bool = False) -> bool:
    return nef_cone(E, force).contains(c.vector)


def ample_member(E: ToricVectorBundle, c: PEClass, force: bool = False) -> bool:
    return nef_cone(E, force).interior_contains(c.vector)


def bpf_member(E: ToricVectorBundle, c: PEClass, force: bool = False, sites: List[Site] | None = None) -> BpfResult:
    sites = nef_bpf_sites(E, force) if sites is None else sites
    result = BpfResult(member=True)
    for s in sites:
        hit: MonoidMembership = s.monoid.member(c.vector)
        if hit.member:
            result.witnesses[s.label] = hit.witness
        else:
            result.member = False
            result.failing_sites.append(s.label)
    return result


def fujita_gap_scan(E: ToricVectorBundle, force: bool = False) -> List[FujitaGap]:
    """Hilbert basis elements of Nef that fail basepoint freeness, with the failing site."""
    sites = nef_bpf_sites(E, force)
    basis = nef_cone(E, sites=sites).hilbert_basis
    logging.info("Nef Hilbert basis: %d elements", len(basis))

    def scan(v: IntVector) -> List[FujitaGap]:
        return [FujitaGap(PEClass.from_vector(v), s.label) for s in sites if not s.monoid.member(v).member]

    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        found = list(pool.map(scan, basis))
    gaps = [g for batch in found for g in batch]
    logging.info("Fujita scan: %d failing (class, site) pairs", len(gaps))
    return gaps


def coloop_cover_check(E: ToricVectorBundle) -> ColoopReport:
    cover: Dict[int, List[int]] = {j: [] for j in range(E.m)}
    for k, M in sorted(E.initial_matroids.items()):
        for j in M.coloops:
            cover[j].append(k)
    D = E.nonnegative_diagram
    zero_check = all(any(row[j] == 0 for j in c.support) for c in E.matroid.circuits for row in D)
    return ColoopReport(ok=all(cover.values()), cover=cover, circuit_zero_check=zero_check)


def extension_checks(E: ToricVectorBundle, E2: ToricVectorBundle) -> ExtensionReport:
    """Hypotheses of the extension results for E2 = (D | U) over the same fan."""
    if E2.fan != E.fan or E2.m < E.m:
        raise ValidationError("second bundle does not extend the first (fan or column count differs)")
    D = E.nonnegative_diagram
    D2 = E2.nonnegative_diagram
    if any(row2[: E.m] != row for row, row2 in zip(D, D2)):
        raise ValidationError("second diagram does not start with the columns of the first")
    U = [row2[E.m:] for row2 in D2]

    dominance = all(not u or min(u) > max(row) for row, u in zip(D, U))
    circuit_floor = [max((min(row[j] for j in c.support) for c in E.matroid.circuits), default=0) for row in D]
    circuit_minimum = all(all(x > floor for x in u) for u, floor in zip(U, circuit_floor))
    new_columns = list(zip(*U)) if U and U[0] else []
    uniform = (
        E.matroid.is_uniform
        and E2.matroid.is_uniform
        and is_monomial(E)
        and all(sum(1 for x in col if x == 0) <= E2.r - 2 for col in new_columns)
    )

    report = ExtensionReport(dominance=dominance, circuit_minimum=circuit_minimum, uniform=uniform)
    base_ci = ci_check(E).ok
    if dominance and base_ci:
        report.guarantees.append("ci")
    if circuit_minimum and base_ci and is_monomial(E):
        report.guarantees.append("monomial+ci")
    if uniform:
        report.guarantees.append("monomial")
    return report
