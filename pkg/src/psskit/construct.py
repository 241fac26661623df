"""Generators and rotation-based constructions of positive k-spanning sets.

The k-copy route is immediate: k concatenated copies of a positive spanning
set survive any k - 1 deletions.  The rotation route produces k-resilient
families *without identical elements*: rotate a minimal positive basis of a
block subspace by k small in-plane rotations whose angles stay strictly
below arccos(rho), where rho is the largest cosine between a basis element
and its projection onto the hyperplanes defined by a set of separating
vectors.  Keeping every rotation angle under that threshold guarantees the
union of the rotated copies is a positive k-basis of the block, and doing it
blockwise extends the construction to any decomposable positive basis with
all block dimensions >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstructionError, NotPositiveSpanningError
from .family import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    span_of,
)
from .kspan import POSITIVE, is_positive_k_basis, k_cosine_measure
from .ospb import cosine_measure_ospb, detect_ospb
from .spanning import is_positive_basis, is_pss


def gen_minimal(n: int) -> VectorFamily:
    """Minimal positive basis of R^n: the coordinate vectors plus -(1, ..., 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return VectorFamily(n, np.vstack([np.eye(n), -np.ones((1, n))]))


def gen_maximal(n: int) -> VectorFamily:
    """Maximal positive basis of R^n: the coordinate vectors and their negatives."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return VectorFamily(n, np.vstack([np.eye(n), -np.eye(n)]))


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded random orthogonal matrix with determinant +1."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def gen_ospb(n: int, block_dims, seed) -> VectorFamily:
    """Random orthogonally structured positive basis with the given block dimensions.

    Draws one random rotation of R^n, slices its columns into blocks, and
    builds the minimal positive basis {q_1, ..., q_l, -(q_1 + ... + q_l)}
    inside each block subspace.  Identical seeds give bitwise-identical
    output; ``block_dims=[n]`` is a rotated copy of :func:`gen_minimal`.
    """
    dims = [int(d) for d in block_dims]
    if any(d < 1 for d in dims):
        raise ValueError("block dimensions must be positive")
    if sum(dims) != n:
        raise ValueError(f"block dimensions sum to {sum(dims)}, expected {n}")
    rng = np.random.default_rng(seed)
    q = random_rotation(n, rng)
    rows = []
    offset = 0
    for d in dims:
        cols = q[:, offset : offset + d]
        rows.extend(cols.T)
        rows.append(-cols.sum(axis=1))
        offset += d
    return VectorFamily(n, np.array(rows))


def separating_vectors(minimal_pb: VectorFamily, tol: Tolerances | None = None) -> np.ndarray:
    """Vectors v_1, ..., v_{l+1} in the span, one per basis element, such that
    v_i makes a strictly positive dot product with d_i and strictly negative
    ones with every earlier element.

    Construction: rescale the basis by its (unique up to scale) positive
    dependency so the elements sum to zero, normalizing the largest
    coefficient to 1; then v_i is the unique in-span solution of
    ``d'_j . v_i = l`` for i = j and ``-1`` otherwise, obtained from the
    first l rescaled elements.  Returns one vector per row, ambient
    coordinates.
    """
    tol = tol or DEFAULT_TOLERANCES
    if not is_positive_basis(minimal_pb, tol):
        raise ValueError("separating vectors require a minimal positive basis")
    sub = span_of(minimal_pb, tol)
    ell = sub.dim
    if minimal_pb.m != ell + 1:
        raise ValueError(
            f"family has {minimal_pb.m} vectors for span dimension {ell}; not minimal"
        )
    coords = coordinates(minimal_pb, sub, tol).vectors  # (l+1, l)
    # one-dimensional nullspace of the coordinate matrix, strictly one-signed
    vh = np.linalg.svd(coords.T)[2]
    alpha = vh[-1]
    if alpha.sum() < 0:
        alpha = -alpha
    if np.min(alpha) <= tol.zero_tol:
        raise ValueError("positive dependency has a vanishing coefficient; not minimal")
    alpha = alpha / alpha.max()
    scaled = coords * alpha[:, None]
    lead = scaled[:ell]  # rows are the rescaled d'_1 ... d'_l
    targets = np.full((ell + 1, ell), -1.0)
    targets[:ell] += (ell + 1) * np.eye(ell)
    v_coords = np.linalg.solve(lead, targets.T).T  # solve d'_j . v = target_j
    return v_coords @ sub.onb


def _rho_detail(
    minimal_pb: VectorFamily, v_list: np.ndarray, tol: Tolerances
) -> tuple[float, list[tuple[int, int]]]:
    vs = np.asarray(v_list, dtype=float)
    vectors = minimal_pb.vectors
    m = minimal_pb.m
    if vs.shape != (m, minimal_pb.dim):
        raise ValueError(f"expected {m} separating vectors of dimension {minimal_pb.dim}")
    best = 0.0
    skipped: list[tuple[int, int]] = []
    for i in range(m):
        d = vectors[i]
        dnorm = float(np.linalg.norm(d))
        for j in range(m):
            v = vs[j]
            projected = d - (float(d @ v) / float(v @ v)) * v
            pnorm = float(np.linalg.norm(projected))
            if pnorm <= tol.zero_tol * dnorm:
                skipped.append((i, j))
                continue
            best = max(best, float(d @ projected) / (dnorm * pnorm))
    return best, skipped


def rho(minimal_pb: VectorFamily, v_list: np.ndarray, tol: Tolerances | None = None) -> float:
    """Largest cosine between an element and its projection onto the span
    intersected with a separating vector's orthogonal hyperplane.

    Pairs whose projection vanishes are skipped (the corresponding rotation
    cannot re-align those vectors in the first place).  Always in [0, 1).
    """
    tol = tol or DEFAULT_TOLERANCES
    value, _ = _rho_detail(minimal_pb, v_list, tol)
    return value


@dataclass(frozen=True)
class RotationPlan:
    """Audit record of one block's rotation schedule.

    ``plane`` holds the two orthonormal rows spanning the rotation plane,
    ``angles`` the strictly increasing rotation angles (all below
    arccos(rho)), and ``rho_skipped_pairs`` any projection pairs excluded
    from the rho maximum.
    """

    block_index: int
    plane: np.ndarray
    angles: tuple[float, ...]
    rho: float
    separating_vectors: np.ndarray
    rho_skipped_pairs: tuple[tuple[int, int], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "block_index": self.block_index,
            "plane": self.plane.tolist(),
            "angles": list(self.angles),
            "rho": self.rho,
            "separating_vectors": self.separating_vectors.tolist(),
            "rho_skipped_pairs": [list(p) for p in self.rho_skipped_pairs],
        }


def plane_rotation(plane: np.ndarray, theta: float) -> np.ndarray:
    """Rotation by ``theta`` inside the span of the two orthonormal plane rows,
    acting as the identity on the orthogonal complement."""
    p, q = plane
    n = plane.shape[1]
    outer_pp = np.outer(p, p)
    outer_qq = np.outer(q, q)
    return (
        np.eye(n)
        + (math.cos(theta) - 1.0) * (outer_pp + outer_qq)
        + math.sin(theta) * (np.outer(q, p) - np.outer(p, q))
    )


def _random_plane(rng: np.random.Generator, sub: Subspace) -> np.ndarray:
    """Two orthonormal directions spanning a random 2-plane inside ``sub``."""
    while True:
        raw = rng.standard_normal((2, sub.dim)) @ sub.onb
        q, r = np.linalg.qr(raw.T)
        if abs(r[0, 0]) > 1e-8 and abs(r[1, 1]) > 1e-8:
            return q.T


def _parallel_pair(vectors: np.ndarray, dedupe_tol: float) -> tuple[int, int] | None:
    """First pair of rows whose directions coincide within ``dedupe_tol``."""
    unit = vectors / np.linalg.norm(vectors, axis=1)[:, None]
    cosines = unit @ unit.T
    np.fill_diagonal(cosines, -1.0)
    hits = np.argwhere(cosines >= 1.0 - dedupe_tol)
    if hits.size:
        i, j = map(int, hits[0])
        return (i, j) if i < j else (j, i)
    return None


def rotations_for_block(
    minimal_pb: VectorFamily,
    k: int,
    seed,
    tol: Tolerances | None = None,
    max_retries: int = 32,
) -> tuple[RotationPlan, list[VectorFamily]]:
    """Rotation schedule turning one minimal positive basis into k tilted copies.

    Draws a random 2-plane inside the block span (seeded), rejecting planes
    that leave some element fixed, and rotates by j * arccos(rho) / (k + 1)
    for j = 1..k.  The rotated copies are verified pairwise non-parallel and
    angle-bounded; plane draws are retried up to ``max_retries`` times.
    Blocks of dimension 1 have no usable rotation and are refused.
    """
    tol = tol or DEFAULT_TOLERANCES
    if k < 1:
        raise ValueError("k must be at least 1")
    sub = span_of(minimal_pb, tol)
    if sub.dim < 2:
        raise ConstructionError(
            "rotation construction needs a block of dimension at least 2"
        )
    vs = separating_vectors(minimal_pb, tol)  # validates the minimal positive basis
    rho_value, skipped = _rho_detail(minimal_pb, vs, tol)
    theta_max = math.acos(min(max(rho_value, 0.0), 1.0))
    angles = tuple(j * theta_max / (k + 1) for j in range(1, k + 1))
    rng = np.random.default_rng(seed)
    unit = minimal_pb.unit()
    last_collision: tuple[int, int] | None = None
    for _ in range(max_retries):
        plane = _random_plane(rng, sub)
        in_plane = np.hypot(unit @ plane[0], unit @ plane[1])
        if float(np.min(in_plane)) <= tol.zero_tol:
            continue  # some element would not move; every rotated copy must differ
        rotations = [plane_rotation(plane, theta) for theta in angles]
        rotated = [
            VectorFamily(minimal_pb.dim, minimal_pb.vectors @ rot.T) for rot in rotations
        ]
        stacked = np.vstack([fam.vectors for fam in rotated])
        collision = _parallel_pair(stacked, tol.dedupe_tol)
        if collision is not None:
            last_collision = collision
            continue
        # each element may move by at most its angle bound: cos must stay above rho
        moved = min(
            float(np.min(np.sum(fam.unit() * unit, axis=1))) for fam in rotated
        )
        if moved <= rho_value:
            continue
        plan = RotationPlan(
            block_index=0,
            plane=plane,
            angles=angles,
            rho=rho_value,
            separating_vectors=vs,
            rho_skipped_pairs=tuple(skipped),
        )
        return plan, rotated
    detail = (
        f" (last colliding pair: {last_collision})" if last_collision is not None else ""
    )
    raise ConstructionError(
        f"no admissible rotation plane after {max_retries} draws{detail}"
    )


def build_pkss_copies(
    family: VectorFamily, k: int, tol: Tolerances | None = None
) -> VectorFamily:
    """k concatenated copies of a positive spanning set; equality case of the
    k-cosine bound.  Raises when the input is not a positive spanning set."""
    tol = tol or DEFAULT_TOLERANCES
    if k < 1:
        raise ValueError("k must be at least 1")
    check = is_pss(family, tol=tol)
    if not check:
        raise NotPositiveSpanningError(check)
    return VectorFamily(family.dim, np.vstack([family.vectors] * k))


def build_pkss_global_rotations(
    family: VectorFamily,
    k: int,
    rotations: list[np.ndarray] | None = None,
    seed=None,
    tol: Tolerances | None = None,
) -> tuple[VectorFamily, list[np.ndarray]]:
    """Union of k rotated copies of a positive spanning set.

    ``rotations`` may supply the k orthogonal (det +1) matrices explicitly;
    otherwise they are drawn from the seeded generator.  Works for any block
    structure, dimension-1 blocks included, but may produce parallel
    elements — it guarantees a positive k-spanning set, not a k-basis.
    """
    tol = tol or DEFAULT_TOLERANCES
    if k < 1:
        raise ValueError("k must be at least 1")
    check = is_pss(family, tol=tol)
    if not check:
        raise NotPositiveSpanningError(check)
    n = family.dim
    if rotations is None:
        if seed is None:
            raise ValueError("provide rotation matrices or a seed to draw them")
        rng = np.random.default_rng(seed)
        rotations = [random_rotation(n, rng) for _ in range(k)]
    else:
        rotations = [np.asarray(rot, dtype=float) for rot in rotations]
        if len(rotations) != k:
            raise ValueError(f"expected {k} rotation matrices, got {len(rotations)}")
        for idx, rot in enumerate(rotations):
            if rot.shape != (n, n):
                raise ConstructionError(f"rotation {idx} has shape {rot.shape}, expected ({n}, {n})")
            if np.max(np.abs(rot.T @ rot - np.eye(n))) > 1e-9:
                raise ConstructionError(f"matrix {idx} is not orthogonal")
            if np.linalg.det(rot) < 0.0:
                raise ConstructionError(f"matrix {idx} is a reflection, not a rotation")
    rows = np.vstack([family.vectors @ rot.T for rot in rotations])
    return VectorFamily(n, rows), rotations


def build_pkbasis_blockwise(
    family: VectorFamily,
    k: int,
    seed,
    tol: Tolerances | None = None,
    max_retries: int = 32,
) -> tuple[VectorFamily, list[RotationPlan]]:
    """Positive k-basis from a decomposable positive basis, by per-block rotations.

    Detects the block decomposition, runs :func:`rotations_for_block` on each
    block with a seed substream derived from the master seed and block index,
    and unions copy-by-copy (copy j holds every block's j-th rotation).  The
    output is verified: pairwise non-parallel, a positive k-basis, and its
    k-cosine measure at least the input's cosine measure.
    """
    tol = tol or DEFAULT_TOLERANCES
    if k < 1:
        raise ValueError("k must be at least 1")
    detection = detect_ospb(family, tol)
    if not detection:
        raise ConstructionError(
            f"input does not decompose into orthogonal minimal positive bases: {detection.reason}"
        )
    decomposition = detection.decomposition
    for block in decomposition.blocks:
        if block.subspace.dim < 2:
            raise ConstructionError(
                "a dimension-1 block (a vector and its negative) cannot be rotated "
                "into distinct copies; use build_pkss_global_rotations instead"
            )
    streams = np.random.SeedSequence(seed).spawn(decomposition.s)
    plans: list[RotationPlan] = []
    rotated_blocks: list[list[VectorFamily]] = []
    for bi, block in enumerate(decomposition.blocks):
        plan, rotated = rotations_for_block(
            family.subfamily(block.indices), k, streams[bi], tol, max_retries
        )
        plans.append(replace(plan, block_index=bi))
        rotated_blocks.append(rotated)
    copies = [
        np.vstack([rotated_blocks[bi][j].vectors for bi in range(decomposition.s)])
        for j in range(k)
    ]
    result = VectorFamily(family.dim, np.vstack(copies))

    collision = _parallel_pair(result.vectors, tol.dedupe_tol)
    if collision is not None:
        raise ConstructionError(f"verification failed: elements {collision} are parallel")
    if not is_positive_k_basis(result, k, tol):
        raise ConstructionError("verification failed: output is not a positive k-basis")
    base = cosine_measure_ospb(family, decomposition, tol)
    measured = k_cosine_measure(result, k, tol=tol)
    if measured.status != POSITIVE or measured.value < base.value - 1e-12:
        raise ConstructionError(
            "verification failed: k-cosine measure fell below the base cosine measure"
        )
    return result, plans
