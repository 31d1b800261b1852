"""Matroids of linear ideals and the tropical combinatorics built on them.

A linear ideal L in k[y_0..y_{m-1}] is given by the coefficient rows of a
minimal generating set. Its matroid has a subset I independent when no
nonzero element of L is supported on I; equivalently I indexes independent
columns of any matrix K whose rows span the orthogonal complement of L.
All indices are 0-based.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from tvbkit.core import exact
from tvbkit.errors import MatroidError

Flat = FrozenSet[int]


@dataclass(frozen=True)
class LinearIdealMatrix:
    """Coefficient rows of a minimal generating set of L, shape (m - r) x m."""

    m: int
    coeffs: Tuple[Tuple[Fraction, ...], ...] = ()

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[exact.Scalar]], m: int | None = None) -> "LinearIdealMatrix":
        rows = [tuple(exact.qq(x) for x in r) for r in rows]
        if m is None:
            if not rows:
                raise MatroidError("ground set size is required for an empty ideal")
            m = len(rows[0])
        for k, r in enumerate(rows):
            if len(r) != m:
                raise MatroidError(f"generator {k} has {len(r)} coefficients, expected {m}")
            if not any(r):
                raise MatroidError(f"generator {k} is the zero row")
        if exact.rank(rows, m) != len(rows):
            raise MatroidError("generators of the ideal are linearly dependent")
        return cls(m=m, coeffs=tuple(rows))

    @property
    def generator_count(self) -> int:
        return len(self.coeffs)

    def support(self, k: int) -> FrozenSet[int]:
        return frozenset(j for j, c in enumerate(self.coeffs[k]) if c != 0)


@dataclass(frozen=True)
class Circuit:
    support: FrozenSet[int]
    coefficients: Tuple[Fraction, ...]

    def label(self) -> str:
        return "{" + ",".join(str(j) for j in sorted(self.support)) + "}"


@dataclass(frozen=True)
class FlagOfFlats:
    """Strictly nested flats, largest (the ground set) first."""

    chain: Tuple[Flat, ...]

    def __len__(self) -> int:
        return len(self.chain)

    def indicator_matrix(self, m: int) -> List[Tuple[int, ...]]:
        return flag_indicator_matrix(self, m)


def _sorted_flat(F: Iterable[int]) -> Tuple[int, ...]:
    return tuple(sorted(F))


@dataclass(eq=False)
class Matroid:
    backing: LinearIdealMatrix
    _ranks: Dict[FrozenSet[int], int] = field(default_factory=dict, repr=False)

    @property
    def ground_size(self) -> int:
        return self.backing.m

    @cached_property
    def complement_matrix(self) -> List[Tuple[int, ...]]:
        # rows span the orthogonal complement of L; columns represent the matroid
        return exact.kernel_basis(self.backing.coeffs, self.backing.m)

    @property
    def rank(self) -> int:
        return self.ground_size - self.backing.generator_count

    @property
    def ground_set(self) -> Flat:
        return frozenset(range(self.ground_size))

    def rank_of(self, S: Iterable[int]) -> int:
        key = frozenset(S)
        cached = self._ranks.get(key)
        if cached is not None:
            return cached
        cols = sorted(key)
        K = self.complement_matrix
        value = exact.rank([[row[j] for j in cols] for row in K], len(cols)) if cols and K else 0
        self._ranks[key] = value
        return value

    def is_independent(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        return self.rank_of(S) == len(S)

    def is_basis(self, B: Iterable[int]) -> bool:
        B = frozenset(B)
        return len(B) == self.rank and self.is_independent(B)

    @cached_property
    def bases(self) -> List[Tuple[int, ...]]:
        return [B for B in combinations(range(self.ground_size), self.rank) if self.is_independent(B)]

    @cached_property
    def circuits(self) -> List[Circuit]:
        """Minimal-support vectors of L, first nonzero coefficient 1."""
        found: List[Circuit] = []
        m = self.ground_size
        if not self.backing.coeffs:
            return found
        for size in range(1, m + 1):
            for S in combinations(range(m), size):
                support = frozenset(S)
                if any(c.support <= support for c in found):
                    continue
                if self.rank_of(support) < size:
                    found.append(self._circuit_on(S))
        logging.debug("matroid on %d elements: %d circuits", m, len(found))
        return found

    def _circuit_on(self, S: Sequence[int]) -> Circuit:
        K = self.complement_matrix
        cols = list(S)
        sub = [[row[j] for j in cols] for row in K]
        ker = exact.kernel_basis(sub, len(cols))
        if len(ker) != 1:
            raise MatroidError(f"support {cols} is not a circuit")
        vec = [Fraction(0)] * self.ground_size
        for j, x in zip(cols, ker[0]):
            vec[j] = Fraction(x)
        lead = next(x for x in vec if x != 0)
        coeffs = tuple(x / lead for x in vec)
        return Circuit(support=frozenset(j for j, x in enumerate(coeffs) if x != 0), coefficients=coeffs)

    def closure(self, S: Iterable[int]) -> Flat:
        S = frozenset(S)
        r = self.rank_of(S)
        return S | frozenset(e for e in range(self.ground_size) if e not in S and self.rank_of(S | {e}) == r)

    def is_flat(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        return self.closure(S) == S

    @cached_property
    def maximal_proper_flats(self) -> List[Flat]:
        if self.rank < 1:
            raise MatroidError("a rank-0 matroid has no proper flats")
        flats = set()
        for S in combinations(range(self.ground_size), self.rank - 1):
            if self.is_independent(S):
                flats.add(self.closure(S))
        return sorted(flats, key=_sorted_flat)

    @cached_property
    def loops(self) -> Flat:
        return frozenset(e for e in range(self.ground_size) if self.rank_of({e}) == 0)

    @cached_property
    def coloops(self) -> Flat:
        E = self.ground_set
        return frozenset(e for e in E if self.rank_of(E - {e}) < self.rank)

    @cached_property
    def is_uniform(self) -> bool:
        return all(self.is_independent(S) for S in combinations(range(self.ground_size), self.rank))

    @cached_property
    def has_unique_basis(self) -> bool:
        return self.loops | self.coloops == self.ground_set

    def fundamental_circuit(self, B: Iterable[int], j: int) -> Circuit:
        B = tuple(sorted(B))
        if not self.is_basis(B):
            raise MatroidError(f"{list(B)} is not a basis")
        if j in B:
            raise MatroidError(f"element {j} belongs to the basis")
        return self._circuit_on(sorted(set(B) | {j}) if self.rank_of({j}) else [j])

    def trop_membership(self, w: Sequence[exact.Scalar]) -> bool:
        """Every circuit attains its minimum weight at least twice."""
        for c in self.circuits:
            values = [w[j] for j in c.support]
            low = min(values)
            if values.count(low) < 2:
                return False
        return True

    def apartment_membership(self, B: Iterable[int], w: Sequence[exact.Scalar]) -> bool:
        B = frozenset(B)
        if not self.is_basis(B):
            raise MatroidError(f"{sorted(B)} is not a basis")
        for j in range(self.ground_size):
            if j in B:
                continue
            c = self.fundamental_circuit(B, j)
            rest = [w[k] for k in c.support if k != j]
            if not rest or w[j] != min(rest):
                return False
        return True

    def initial_matroid(self, w: Sequence[exact.Scalar]) -> "Matroid":
        rows = [initial_form(c, w) for c in self.circuits]
        basis = exact.row_basis(rows, self.ground_size) if rows else []
        result = Matroid(LinearIdealMatrix.from_rows(basis, self.ground_size))
        if result.rank != self.rank:
            raise MatroidError(f"initial matroid has rank {result.rank}, expected {self.rank}")
        return result

    def flag_from_order(self, order: Sequence[int]) -> FlagOfFlats:
        if not self.is_basis(order) or len(set(order)) != len(order):
            raise MatroidError(f"{list(order)} is not a basis")
        chain = tuple(self.closure(order[:k]) for k in range(self.rank, 0, -1))
        return FlagOfFlats(chain=chain)

    def is_maximal_flag(self, flag: FlagOfFlats) -> bool:
        if len(flag.chain) != self.rank:
            return False
        for k, F in enumerate(flag.chain):
            if not self.is_flat(F) or self.rank_of(F) != self.rank - k:
                return False
        return all(b < a for a, b in zip(flag.chain, flag.chain[1:]))

    def row_in_open_maximal_face(self, w: Sequence[exact.Scalar]) -> FlagOfFlats | None:
        """Flag cut out by the superlevel sets of w, when it is a maximal flag."""
        levels = sorted(set(w), reverse=True)
        if len(levels) != self.rank:
            return None
        chain = []
        for k, t in enumerate(levels, start=1):
            G = frozenset(j for j, x in enumerate(w) if x >= t)
            if not self.is_flat(G) or self.rank_of(G) != k:
                return None
            chain.append(G)
        return FlagOfFlats(chain=tuple(reversed(chain)))


def matroid_from_coefficients(M: LinearIdealMatrix) -> Matroid:
    return Matroid(M)


def initial_form(c: Circuit, w: Sequence[exact.Scalar]) -> Tuple[Fraction, ...]:
    """Terms of the circuit of minimal w-weight."""
    low = min(w[j] for j in c.support)
    return tuple(x if j in c.support and w[j] == low else Fraction(0) for j, x in enumerate(c.coefficients))


def flag_indicator_matrix(F: FlagOfFlats, m: int) -> List[Tuple[int, ...]]:
    return [tuple(1 if j in flat else 0 for j in range(m)) for flat in F.chain]
