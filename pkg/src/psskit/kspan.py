"""Positive k-spanning sets: resilience predicates and the k-cosine measure.

A family positively k-spans L when it still positively spans L after any
k - 1 elements are removed.  Everything here reduces to subset enumeration:
the k-cosine measure is the minimum cosine measure over all subsets of size
m - k + 1, positive exactly when the family is a positive k-spanning set.

Duplicate elements are common in these inputs (k-copy constructions), so the
subset loops cache verdicts keyed on the multiset of bitwise-identical rows;
positive-spanning-ness and the cosine measure are invariant under dropping
exact duplicates, which collapses most of the work.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cosine import TIE_TOL, CosineResult, cosine_measure_generic, dedupe_units
from .errors import EnumerationLimitError, NotPositiveSpanningError
from .family import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    normalize,
    span_of,
)
from .spanning import best_margin, is_pss

POSITIVE = "positive"
NOT_POSITIVE = "not_positive"


@dataclass(frozen=True)
class PkssCheck:
    """Decision plus, on failure, a size-(m-k+1) subset that is not a PSS."""

    holds: bool
    failing_subset: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class KCosineResult:
    """k-cosine measure outcome.

    ``status`` is ``"positive"`` with the value and argmin subsets (plus
    their cosine vectors), or ``"not_positive"`` with a certificate subset
    whose removal of the complementary k - 1 elements breaks positive
    spanning.
    """

    status: str
    value: float | None
    witness_subsets: tuple[tuple[int, ...], ...] = ()
    witness_vectors: tuple[np.ndarray, ...] = ()
    certificate: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "witness_subsets": [list(s) for s in self.witness_subsets],
            "witness_vectors": [u.tolist() for u in self.witness_vectors],
            "certificate": None if self.certificate is None else list(self.certificate),
        }


def _validate_k(k: int, m: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValueError("k must be an integer")
    if not 1 <= k <= m:
        raise ValueError(f"k out of range: need 1 <= k <= {m}, got {k}")


def _content_key(rows: np.ndarray) -> bytes:
    """Multiset fingerprint; bitwise-equal duplicate rows collapse together."""
    uniq = np.unique(rows, axis=0)
    return uniq.tobytes() + uniq.shape[0].to_bytes(4, "little")


def _pkss_scan(
    family: VectorFamily,
    k: int,
    sub: Subspace,
    tol: Tolerances,
    cache: dict[bytes, bool],
) -> PkssCheck:
    """Core subset scan; treats k > m as trivially not k-spanning."""
    if k > family.m:
        return PkssCheck(False, ())
    size = family.m - k + 1
    for combo in itertools.combinations(range(family.m), size):
        key = _content_key(family.vectors[list(combo)])
        verdict = cache.get(key)
        if verdict is None:
            verdict = bool(is_pss(family.subfamily(combo), sub, tol))
            cache[key] = verdict
        if not verdict:
            return PkssCheck(False, combo)
    return PkssCheck(True)


def k_span_equals(
    family: VectorFamily,
    k: int,
    sub: Subspace | None = None,
    tol: Tolerances | None = None,
) -> bool:
    """Does every size-(m-k+1) subset linearly span ``sub``?"""
    tol = tol or DEFAULT_TOLERANCES
    _validate_k(k, family.m)
    if sub is None:
        sub = span_of(family, tol)
    coords = coordinates(family, sub, tol).vectors
    size = family.m - k + 1
    cache: dict[bytes, bool] = {}
    for combo in itertools.combinations(range(family.m), size):
        rows = coords[list(combo)]
        key = _content_key(rows)
        verdict = cache.get(key)
        if verdict is None:
            svals = np.linalg.svd(rows, compute_uv=False)
            cutoff = tol.rank_tol * max(rows.shape) * (svals[0] if svals.size else 0.0)
            verdict = int(np.sum(svals > cutoff)) == sub.dim
            cache[key] = verdict
        if not verdict:
            return False
    return True


def is_pkss(
    family: VectorFamily,
    k: int,
    sub: Subspace | None = None,
    tol: Tolerances | None = None,
) -> PkssCheck:
    """Is the family a positive k-spanning set of ``sub``?"""
    tol = tol or DEFAULT_TOLERANCES
    _validate_k(k, family.m)
    if sub is None:
        sub = span_of(family, tol)
    return _pkss_scan(family, k, sub, tol, cache={})


def k_cosine_measure(
    family: VectorFamily,
    k: int,
    sub: Subspace | None = None,
    tol: Tolerances | None = None,
    max_subsets: int | None = None,
    jobs: int = 1,
) -> KCosineResult:
    """Minimum cosine measure over all subsets of size m - k + 1.

    Subsets are visited in lexicographic order; the first one that fails to
    positively span becomes the not-positive certificate.  Per-subset results
    are cached on row content (exact duplicates dropped first), which makes
    k-copy families cheap.
    """
    tol = tol or DEFAULT_TOLERANCES
    _validate_k(k, family.m)
    if sub is None:
        sub = span_of(family, tol)
    unit = normalize(family, tol)
    size = family.m - k + 1
    total = math.comb(family.m, size)
    if max_subsets is not None and total > max_subsets:
        raise EnumerationLimitError(total, max_subsets)
    cache: dict[bytes, CosineResult | None] = {}
    scored: list[tuple[float, tuple[int, ...], CosineResult]] = []
    for combo in itertools.combinations(range(family.m), size):
        sub_unit = unit.vectors[list(combo)]
        _, first_seen = np.unique(sub_unit, axis=0, return_index=True)
        keep = np.sort(first_seen)
        key = sub_unit[keep].tobytes() + keep.shape[0].to_bytes(4, "little")
        if key in cache:
            entry = cache[key]
        else:
            rows = family.vectors[np.asarray(combo)[keep]]
            try:
                entry = cosine_measure_generic(
                    VectorFamily(family.dim, rows), sub, tol, jobs=jobs
                )
            except NotPositiveSpanningError:
                entry = None
            cache[key] = entry
        if entry is None:
            return KCosineResult(NOT_POSITIVE, None, certificate=combo)
        scored.append((entry.value, combo, entry))
    value = min(score for score, _, _ in scored)
    winners = [(combo, res) for score, combo, res in scored if score <= value + TIE_TOL]
    vectors = dedupe_units(
        (u for _, res in winners for u in res.cosine_vector_set), tol.dedupe_tol
    )
    return KCosineResult(
        POSITIVE,
        value,
        witness_subsets=tuple(combo for combo, _ in winners),
        witness_vectors=tuple(vectors),
    )


def kth_largest_cosine(u: np.ndarray, family: VectorFamily, k: int) -> float:
    """k-th largest of the cosines between unit ``u`` and the family directions."""
    _validate_k(k, family.m)
    u = np.asarray(u, dtype=float)
    if u.shape != (family.dim,):
        raise ValueError(f"u must have shape ({family.dim},)")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > 1e-8:
        raise ValueError("u must be a unit vector")
    cosines = np.sort(family.unit() @ u)[::-1]
    return float(cosines[k - 1])


def is_positive_k_basis(family: VectorFamily, k: int, tol: Tolerances | None = None) -> bool:
    """Positive k-spanning set from which no element can be dropped."""
    tol = tol or DEFAULT_TOLERANCES
    _validate_k(k, family.m)
    sub = span_of(family, tol)
    cache: dict[bytes, bool] = {}
    if not _pkss_scan(family, k, sub, tol, cache):
        return False
    reduced_seen: dict[bytes, bool] = {}
    for i in range(family.m):
        reduced = family.drop(i)
        key = _content_key(reduced.vectors)
        verdict = reduced_seen.get(key)
        if verdict is None:
            verdict = bool(_pkss_scan(reduced, k, sub, tol, cache))
            reduced_seen[key] = verdict
        if verdict:
            return False
    return True


def is_positively_k_independent(
    family: VectorFamily, k: int, tol: Tolerances | None = None
) -> bool:
    """Every element admits a direction making exactly k cosines positive.

    For each d the search looks for a size-k subset T containing d and a
    vector u with ``u.t`` strictly positive on T and ``u.v <= 0`` off T,
    via the same margin LP as positive independence.
    """
    tol = tol or DEFAULT_TOLERANCES
    _validate_k(k, family.m)
    unit = family.unit()
    others = range(family.m)
    for i in range(family.m):
        rest = [j for j in others if j != i]
        found = False
        for extra in itertools.combinations(rest, k - 1):
            if best_margin(unit, {i, *extra}, tol) > tol.zero_tol:
                found = True
                break
        if not found:
            return False
    return True
