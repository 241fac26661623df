"""Detection of orthogonally structured positive bases and their fast cosine measure.

A positive basis of R^n is orthogonally structured when it splits into
minimal positive bases of pairwise-orthogonal subspaces.  The split is
visible in the Gram matrix: build a graph on the family with an edge
wherever a Gram entry is (scaled-)nonzero; the connected components are the
blocks, and a positive basis of size m decomposes exactly when the component
count equals m - n and each component is a minimal positive basis of its
span.

For such a family the cosine measure needs only n + s basis evaluations
instead of C(n + s, n): within block i, every deletion of one element leaves
a linear basis of the block span with value gamma^-2 = 1' G^-1 1; with
beta_i the per-block maximum, the measure is 1 / sqrt(sum_i beta_i) and the
minimizers come from the Cartesian product of per-block argmax deletions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cosine import CosineResult, dedupe_units
from .errors import InvalidDecompositionError, SubspaceMembershipError
from .family import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    normalize,
    span_of,
)
from .spanning import is_positive_basis

# relative tie window when collecting per-block argmax deletions
_ARGMAX_TIE = 1e-12


@dataclass(frozen=True)
class OspbBlock:
    """One block: the member indices and the subspace they positively span."""

    indices: tuple[int, ...]
    subspace: Subspace


@dataclass(frozen=True)
class OspbDecomposition:
    """Partition of a positive basis into orthogonal minimal positive bases."""

    blocks: tuple[OspbBlock, ...]

    @property
    def s(self) -> int:
        return len(self.blocks)

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "blocks": [
                {"indices": list(b.indices), "onb": b.subspace.onb.tolist()}
                for b in self.blocks
            ],
        }


@dataclass(frozen=True)
class OspbDetection:
    """Either a decomposition or the reason the family is not an OSPB."""

    decomposition: OspbDecomposition | None
    reason: str | None = None

    @property
    def is_ospb(self) -> bool:
        return self.decomposition is not None

    def __bool__(self) -> bool:
        return self.is_ospb


def _gram_components(adjacency: np.ndarray) -> list[list[int]]:
    """Connected components of a boolean adjacency matrix, sorted by least member."""
    m = adjacency.shape[0]
    unseen = set(range(m))
    components = []
    while unseen:
        start = min(unseen)
        unseen.discard(start)
        stack, members = [start], [start]
        while stack:
            v = stack.pop()
            for w in np.flatnonzero(adjacency[v]):
                w = int(w)
                if w in unseen:
                    unseen.discard(w)
                    members.append(w)
                    stack.append(w)
        components.append(sorted(members))
    components.sort(key=lambda c: c[0])
    return components


def detect_ospb(family: VectorFamily, tol: Tolerances | None = None) -> OspbDetection:
    """Decide whether the family is an orthogonally structured positive basis.

    Returns a decomposition (blocks ordered by smallest member index) or a
    structured refusal naming the failed check.  A minimal positive basis is
    always accepted as the single-block decomposition.
    """
    tol = tol or DEFAULT_TOLERANCES
    m, n = family.m, family.dim
    if m == n + 1 and is_positive_basis(family, tol):
        return OspbDetection(
            OspbDecomposition((OspbBlock(tuple(range(m)), span_of(family, tol)),))
        )
    norms = family.norms()
    gram_abs = np.abs(family.vectors @ family.vectors.T)
    adjacency = gram_abs > tol.zero_tol * np.outer(norms, norms)
    components = _gram_components(adjacency)
    s = len(components)
    if m - n != s:
        return OspbDetection(
            None,
            f"Gram graph has {s} component(s); a decomposable positive basis of "
            f"{m} vectors in dimension {n} needs exactly {m - n}",
        )
    blocks = []
    dim_total = 0
    for members in components:
        block_family = family.subfamily(members)
        block_span = span_of(block_family, tol)
        if len(members) != block_span.dim + 1:
            return OspbDetection(
                None,
                f"component {members} has {len(members)} vectors but spans "
                f"dimension {block_span.dim}; not a minimal positive basis",
            )
        if not is_positive_basis(block_family, tol):
            return OspbDetection(
                None, f"component {members} is not a positive basis of its span"
            )
        blocks.append(OspbBlock(tuple(members), block_span))
        dim_total += block_span.dim
    if dim_total != n:
        return OspbDetection(
            None, f"block dimensions sum to {dim_total}, expected {n}"
        )
    for i, j in itertools.combinations(range(s), 2):
        overlap = float(np.max(np.abs(blocks[i].subspace.onb @ blocks[j].subspace.onb.T)))
        if overlap > tol.zero_tol:
            return OspbDetection(
                None, f"blocks {i} and {j} span non-orthogonal subspaces"
            )
    return OspbDetection(OspbDecomposition(tuple(blocks)))


def validate_decomposition(
    family: VectorFamily,
    decomposition: OspbDecomposition,
    tol: Tolerances | None = None,
) -> None:
    """Re-verify a decomposition against a family; raise on any mismatch."""
    tol = tol or DEFAULT_TOLERANCES
    claimed = sorted(i for block in decomposition.blocks for i in block.indices)
    if claimed != list(range(family.m)):
        raise InvalidDecompositionError("blocks do not partition the family indices")
    dim_total = 0
    for bi, block in enumerate(decomposition.blocks):
        if block.subspace.ambient_dim != family.dim:
            raise InvalidDecompositionError(f"block {bi} subspace has wrong ambient dimension")
        block_family = family.subfamily(block.indices)
        try:
            coordinates(block_family, block.subspace, tol)
        except SubspaceMembershipError as exc:
            raise InvalidDecompositionError(
                f"block {bi}: vector {block.indices[exc.index]} is outside the block subspace"
            ) from exc
        if len(block.indices) != block.subspace.dim + 1:
            raise InvalidDecompositionError(
                f"block {bi} has {len(block.indices)} vectors for dimension {block.subspace.dim}"
            )
        if not is_positive_basis(block_family, tol):
            raise InvalidDecompositionError(
                f"block {bi} is not a minimal positive basis of its subspace"
            )
        dim_total += block.subspace.dim
    if dim_total != family.dim:
        raise InvalidDecompositionError(
            f"block dimensions sum to {dim_total}, expected {family.dim}"
        )
    for i, j in itertools.combinations(range(decomposition.s), 2):
        overlap = float(
            np.max(
                np.abs(
                    decomposition.blocks[i].subspace.onb
                    @ decomposition.blocks[j].subspace.onb.T
                )
            )
        )
        if overlap > tol.zero_tol:
            raise InvalidDecompositionError(f"blocks {i} and {j} are not orthogonal")


def cosine_measure_ospb(
    family: VectorFamily,
    decomposition: OspbDecomposition,
    tol: Tolerances | None = None,
    max_vectors: int = 10_000,
) -> CosineResult:
    """Cosine measure of a decomposed positive basis in n + s basis evaluations.

    The witness set is the Cartesian product of per-block argmax deletions;
    its enumeration is capped at ``max_vectors`` tuples, with ``truncated``
    set on the result when the cap bites.
    """
    tol = tol or DEFAULT_TOLERANCES
    validate_decomposition(family, decomposition, tol)
    unit = normalize(family, tol)
    betas: list[float] = []
    argmax_deletions: list[list[int]] = []
    for block in decomposition.blocks:
        coords = coordinates(unit.subfamily(block.indices), block.subspace, tol).vectors
        ones = np.ones(block.subspace.dim)
        inverse_gamma_sq = []
        for drop in range(coords.shape[0]):
            rows = np.delete(coords, drop, axis=0)
            # any deletion from a minimal positive basis leaves a linear basis;
            # a one-dimensional block reduces to gamma = 1
            inverse_gamma_sq.append(float(ones @ np.linalg.solve(rows @ rows.T, ones)))
        beta = max(inverse_gamma_sq)
        betas.append(beta)
        argmax_deletions.append(
            [
                drop
                for drop, val in enumerate(inverse_gamma_sq)
                if val >= beta - _ARGMAX_TIE * max(1.0, beta)
            ]
        )
    value = 1.0 / math.sqrt(sum(betas))

    product_size = math.prod(len(a) for a in argmax_deletions)
    truncated = product_size > max_vectors
    witnesses: list[tuple[int, ...]] = []
    vectors: list[np.ndarray] = []
    for choice in itertools.islice(itertools.product(*argmax_deletions), max_vectors):
        kept: list[int] = []
        for block, drop in zip(decomposition.blocks, choice):
            kept.extend(idx for local, idx in enumerate(block.indices) if local != drop)
        # rows of the kept unit vectors are B^T, so this solves B^T y = 1
        y = np.linalg.solve(unit.vectors[kept], np.ones(family.dim))
        vectors.append(y / np.linalg.norm(y))
        witnesses.append(tuple(sorted(kept)))
    paired = sorted(zip(witnesses, vectors), key=lambda wv: wv[0])
    witnesses = [w for w, _ in paired]
    vectors = [v for _, v in paired]
    return CosineResult(
        value=value,
        cosine_vector_set=tuple(dedupe_units(vectors, tol.dedupe_tol)),
        witness_bases=tuple(witnesses),
        bases_examined=family.m,
        singular_skipped=0,
        truncated=truncated,
    )
