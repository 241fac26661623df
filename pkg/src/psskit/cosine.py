"""Cosine measure of positive spanning sets via enumeration of contained bases.

The cosine measure of a family D is ``min over unit u of max over d in D of
u.d / |d|``; it is strictly positive exactly when D is a positive spanning
set.  For a positive spanning set the minimum is attained over the linear
bases B contained in D, each contributing the unit vector u_B that makes an
equal acute angle with every element of B:

    gamma_B = 1 / sqrt(1' G(B)^-1 1),      u_B = gamma_B * B^-T 1,

where G(B) is the Gram matrix of the normalized basis.  The generic
algorithm evaluates ``max_d u_B . d / |d|`` for every invertible size-ell
subset and takes the minimum.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationLimitError, NotPositiveSpanningError, SingularBasisError
from .family import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    normalize,
    span_of,
)
from .spanning import is_pss

# candidates within this distance of the minimum count as ties
TIE_TOL = 1e-12


@dataclass(frozen=True)
class BasisCertificate:
    """One examined basis: its indices, gamma value and equal-angle unit vector.

    ``u`` is expressed in subspace coordinates and satisfies
    ``u . b = gamma`` for every normalized basis element b.
    """

    indices: tuple[int, ...]
    gamma: float
    u: np.ndarray


@dataclass(frozen=True)
class CosineResult:
    """Cosine measure plus the argmin structure that certifies it.

    cosine_vector_set
        Deduplicated unit minimizers (ambient coordinates).
    witness_bases
        Index lists of the bases attaining the value, lexicographically sorted.
    bases_examined / singular_skipped
        Size-ell subsets tested for invertibility, and how many of those were
        skipped as singular (the difference is the count actually evaluated).
    truncated
        Set when a witness enumeration was capped (block path only).
    """

    value: float
    cosine_vector_set: tuple[np.ndarray, ...]
    witness_bases: tuple[tuple[int, ...], ...]
    bases_examined: int
    singular_skipped: int = 0
    truncated: bool = False

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "cosine_vector_set": [u.tolist() for u in self.cosine_vector_set],
            "witness_bases": [list(b) for b in self.witness_bases],
            "bases_examined": self.bases_examined,
            "singular_skipped": self.singular_skipped,
            "truncated": self.truncated,
        }


def _solve_gamma_u(basis_columns: np.ndarray, rank_tol: float):
    """(gamma, u) for a square column matrix, or None when numerically singular."""
    ell = basis_columns.shape[0]
    svals = np.linalg.svd(basis_columns, compute_uv=False)
    if svals[-1] <= rank_tol * ell * svals[0]:
        return None
    ones = np.ones(ell)
    g = basis_columns.T @ basis_columns
    gamma = 1.0 / math.sqrt(float(ones @ np.linalg.solve(g, ones)))
    u = gamma * np.linalg.solve(basis_columns.T, ones)
    return gamma, u


def gamma_u(basis: VectorFamily, tol: Tolerances | None = None) -> tuple[float, np.ndarray]:
    """Gamma and the equal-angle unit vector of a linear basis.

    The input vectors are normalized internally; ``u`` is returned in ambient
    coordinates and satisfies ``u . d/|d| = gamma`` for every basis element.
    Raises :class:`SingularBasisError` when the vectors are dependent.
    """
    tol = tol or DEFAULT_TOLERANCES
    sub = span_of(basis, tol)
    if sub.dim != basis.m:
        raise SingularBasisError(
            f"{basis.m} vectors span a subspace of dimension {sub.dim}; not a linear basis"
        )
    coords = coordinates(normalize(basis, tol), sub, tol)
    solved = _solve_gamma_u(coords.vectors.T, tol.rank_tol)
    if solved is None:
        raise SingularBasisError("basis matrix is numerically singular")
    gamma, u = solved
    return gamma, u @ sub.onb


def dedupe_units(
    vectors, dedupe_tol: float = DEFAULT_TOLERANCES.dedupe_tol
) -> list[np.ndarray]:
    """Drop later unit vectors within cosine distance ``dedupe_tol`` of an earlier one."""
    kept: list[np.ndarray] = []
    for v in vectors:
        if all(1.0 - float(v @ w) > dedupe_tol for w in kept):
            kept.append(v)
    return kept


def cosine_measure_generic(
    family: VectorFamily,
    sub: Subspace | None = None,
    tol: Tolerances | None = None,
    max_subsets: int | None = None,
    jobs: int = 1,
) -> CosineResult:
    """Cosine measure by exhaustive enumeration of size-ell subsets.

    Requires the family to positively span ``sub`` (default: its own span);
    raises :class:`NotPositiveSpanningError` carrying the failed certificate
    otherwise.  ``max_subsets`` caps the enumeration up front — exceeding it
    raises :class:`EnumerationLimitError` rather than returning partial
    results.  ``jobs > 1`` evaluates subsets on a thread pool; the reduction
    is deterministic, so the output is identical for any job count.
    """
    tol = tol or DEFAULT_TOLERANCES
    check = is_pss(family, sub, tol)
    if not check:
        raise NotPositiveSpanningError(check)
    sub = check.subspace
    unit_coords = coordinates(normalize(family, tol), sub, tol).vectors
    m, ell = unit_coords.shape
    total = math.comb(m, ell)
    if max_subsets is not None and total > max_subsets:
        raise EnumerationLimitError(total, max_subsets)

    def evaluate(combo: tuple[int, ...]):
        solved = _solve_gamma_u(unit_coords[list(combo)].T, tol.rank_tol)
        if solved is None:
            return None
        gamma, u = solved
        cert = BasisCertificate(indices=combo, gamma=gamma, u=u)
        return cert, float(np.max(unit_coords @ u))

    combos = itertools.combinations(range(m), ell)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            evaluated = list(pool.map(evaluate, combos, chunksize=max(1, total // (4 * jobs))))
    else:
        evaluated = [evaluate(combo) for combo in combos]

    candidates = [entry for entry in evaluated if entry is not None]
    singular = total - len(candidates)
    value = min(vmax for _, vmax in candidates)
    winners = sorted(
        (cert for cert, vmax in candidates if vmax <= value + TIE_TOL),
        key=lambda cert: cert.indices,
    )
    ambient = [cert.u @ sub.onb for cert in winners]
    return CosineResult(
        value=value,
        cosine_vector_set=tuple(dedupe_units(ambient, tol.dedupe_tol)),
        witness_bases=tuple(cert.indices for cert in winners),
        bases_examined=total,
        singular_skipped=singular,
    )
