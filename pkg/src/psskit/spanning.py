"""Predicates for positive spanning sets, positive bases and critical vectors.

A family positively spans a subspace L when every vector of L is a
nonnegative combination of the family.  Equivalently (and this is what the
code checks): the family spans L linearly, and for every element d the
negated vector -d is itself a nonnegative combination of the family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .family import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    in_positive_span,
    span_of,
)


@dataclass(frozen=True)
class PssCheck:
    """Outcome of a positive-spanning test with a machine-checkable certificate.

    On success ``coefficients[i]`` holds nonnegative weights writing ``-d_i``
    as a combination of the whole family (in subspace coordinates).  On
    failure exactly one of ``rank_deficit`` / ``failing_index`` is set.
    """

    holds: bool
    subspace: Subspace
    coefficients: tuple[np.ndarray, ...] | None = None
    rank_deficit: int | None = None
    failing_index: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_pss(
    family: VectorFamily,
    sub: Subspace | None = None,
    tol: Tolerances | None = None,
) -> PssCheck:
    """Does the family positively span ``sub`` (default: its own linear span)?"""
    tol = tol or DEFAULT_TOLERANCES
    if sub is None:
        sub = span_of(family, tol)
    coords = coordinates(family, sub, tol)  # raises if any vector is outside sub
    ell = sub.dim
    svals = np.linalg.svd(coords.vectors, compute_uv=False)
    cutoff = tol.rank_tol * max(coords.m, ell) * (svals[0] if svals.size else 0.0)
    rank = int(np.sum(svals > cutoff))
    if rank < ell:
        return PssCheck(False, sub, rank_deficit=ell - rank)
    alphas = []
    for i in range(coords.m):
        alpha = in_positive_span(coords, -coords.vectors[i], tol)
        if alpha is None:
            return PssCheck(False, sub, failing_index=i)
        alphas.append(alpha)
    return PssCheck(True, sub, coefficients=tuple(alphas))


def is_positive_basis(family: VectorFamily, tol: Tolerances | None = None) -> bool:
    """Positive basis = positively spans its span, and no element is redundant."""
    tol = tol or DEFAULT_TOLERANCES
    sub = span_of(family, tol)
    if not is_pss(family, sub, tol):
        return False
    # family.m >= 2 whenever the check above holds, so drop() stays non-empty
    return not any(is_pss(family.drop(i), sub, tol) for i in range(family.m))


def best_margin(
    unit_rows: np.ndarray, positive_set, tol: Tolerances | None = None
) -> float:
    """Largest t with u.d >= t on ``positive_set``, u.v <= 0 elsewhere, |u|_inf <= 1.

    ``unit_rows`` holds unit directions, one per row.  The maximization is a
    small dense LP; it is always feasible (u = 0, t = 0) and bounded by the
    box, so a strictly positive optimum certifies strict separation.
    """
    tol = tol or DEFAULT_TOLERANCES
    m, n = unit_rows.shape
    positive_set = set(positive_set)
    a_ub = np.zeros((m, n + 1))
    for j in range(m):
        if j in positive_set:
            a_ub[j, :n] = -unit_rows[j]
            a_ub[j, n] = 1.0
        else:
            a_ub[j, :n] = unit_rows[j]
    cost = np.zeros(n + 1)
    cost[n] = -1.0
    bounds = [(-1.0, 1.0)] * n + [(0.0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(m), bounds=bounds, method="highs")
    if not res.success:  # cannot happen for this LP; be conservative
        return 0.0
    return float(res.x[n])


def is_positively_independent(family: VectorFamily, tol: Tolerances | None = None) -> bool:
    """No element lies in the positive span of the others.

    Checked per element by maximizing the separation margin: the family is
    positively independent iff for every d some u has ``u.d`` strictly
    positive while ``u.v <= 0`` for all other elements.
    """
    tol = tol or DEFAULT_TOLERANCES
    unit = family.unit()
    return all(best_margin(unit, {i}, tol) > tol.zero_tol for i in range(family.m))


def is_critical_vector(
    family: VectorFamily, c: np.ndarray, tol: Tolerances | None = None
) -> bool:
    """Can ``c`` replace no element of a positive basis without losing the span?

    ``c`` must lie in the span of the basis; the zero vector is critical for
    every positive basis.  Raises ``ValueError`` when the family is not a
    positive basis or ``c`` is outside its span.
    """
    tol = tol or DEFAULT_TOLERANCES
    if not is_positive_basis(family, tol):
        raise ValueError("critical vectors are defined relative to a positive basis")
    c = np.asarray(c, dtype=float)
    if c.shape != (family.dim,):
        raise ValueError(f"c must have shape ({family.dim},)")
    if not np.all(np.isfinite(c)):
        raise ValueError("c must have finite entries")
    sub = span_of(family, tol)
    cnorm = float(np.linalg.norm(c))
    if cnorm <= tol.zero_tol:
        return True
    residual = float(np.linalg.norm(c - (c @ sub.onb.T) @ sub.onb))
    if residual > tol.zero_tol * max(1.0, cnorm):
        raise ValueError("c lies outside the span of the positive basis")
    for i in range(family.m):
        swapped = np.vstack([np.delete(family.vectors, i, axis=0), c])
        if is_pss(VectorFamily(family.dim, swapped), sub, tol):
            return False
    return True
