"""Vector families, subspaces, Gram matrices and positive-span membership.

A :class:`VectorFamily` is an ordered multiset of nonzero vectors sharing one
ambient dimension; every predicate and measure in the toolkit consumes this
type.  All numerical thresholds live in a :class:`Tolerances` value that is
threaded explicitly (no hidden globals), with :data:`DEFAULT_TOLERANCES` as
the default argument.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import nnls

from .errors import FamilyFormatError, SubspaceMembershipError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by every predicate and measure.

    Parameters
    ----------
    zero_tol
        Absolute threshold under which a scalar counts as zero.  Use sites
        scale it by the relevant norms (e.g. Gram entries are compared to
        ``zero_tol * |d_i| * |d_j|``).
    rank_tol
        Relative singular-value cutoff for rank decisions: singular values
        at or below ``rank_tol * max(shape) * sigma_max`` are treated as zero.
    dedupe_tol
        Cosine-distance threshold below which two unit vectors are merged
        when reporting cosine vector sets.
    """

    zero_tol: float = 1e-10
    rank_tol: float = 1e-12
    dedupe_tol: float = 1e-9

    def __post_init__(self):
        for name in ("zero_tol", "rank_tol", "dedupe_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """Ordered multiset of nonzero vectors in a common ambient dimension.

    ``vectors`` holds one vector per row, shape ``(m, dim)``.  Duplicates are
    allowed and order is preserved; the array is stored read-only.
    """

    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=float)
        if self.dim < 1:
            raise ValueError("ambient dimension must be at least 1")
        if arr.ndim != 2:
            raise ValueError("vectors must form a 2-d array, one vector per row")
        if arr.shape[0] < 1:
            raise ValueError("a family holds at least one vector")
        if arr.shape[1] != self.dim:
            raise ValueError(
                f"vectors have length {arr.shape[1]}, expected dim={self.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("vectors must have finite entries")
        norms = np.linalg.norm(arr, axis=1)
        small = np.flatnonzero(norms <= DEFAULT_TOLERANCES.zero_tol)
        if small.size:
            raise ValueError(f"vector {small[0]} has norm at or below the zero threshold")
        arr.flags.writeable = False
        object.__setattr__(self, "vectors", arr)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> "VectorFamily":
        arr = np.atleast_2d(np.array(list(rows), dtype=float))
        return cls(dim=arr.shape[1], vectors=arr)

    @property
    def m(self) -> int:
        """Number of vectors (with multiplicity)."""
        return self.vectors.shape[0]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def unit(self) -> np.ndarray:
        """Rows rescaled to unit Euclidean norm (new array)."""
        return self.vectors / self.norms()[:, None]

    def subfamily(self, indices: Sequence[int]) -> "VectorFamily":
        idx = list(indices)
        return VectorFamily(self.dim, self.vectors[idx])

    def drop(self, index: int) -> "VectorFamily":
        """Family with one instance at ``index`` removed."""
        return VectorFamily(self.dim, np.delete(self.vectors, index, axis=0))

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "vectors": self.vectors.tolist()}


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace given by an orthonormal basis, one vector per row.

    ``onb`` has shape ``(ell, ambient_dim)`` with ``0 <= ell <= ambient_dim``.
    """

    ambient_dim: int
    onb: np.ndarray

    def __post_init__(self):
        arr = np.array(self.onb, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != self.ambient_dim:
            raise ValueError("onb must be a 2-d array of ambient-dimension rows")
        if arr.shape[0] > self.ambient_dim:
            raise ValueError("onb cannot contain more vectors than the ambient dimension")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("onb must have finite entries")
        if arr.shape[0]:
            gram = arr @ arr.T
            dev = np.max(np.abs(gram - np.eye(arr.shape[0])))
            if dev > 1e-9:
                raise ValueError(f"onb rows are not orthonormal (deviation {dev:.3e})")
        arr.flags.writeable = False
        object.__setattr__(self, "onb", arr)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(ambient_dim=n, onb=np.eye(n))

    @property
    def dim(self) -> int:
        return self.onb.shape[0]


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric positive-semidefinite matrix of pairwise dot products."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("Gram matrix must be square")
        scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
        if np.max(np.abs(arr - arr.T)) > DEFAULT_TOLERANCES.zero_tol * scale:
            raise ValueError("Gram matrix must be symmetric")
        arr = (arr + arr.T) / 2.0
        eigmin = float(np.linalg.eigvalsh(arr)[0])
        if eigmin < -1e-8 * scale:
            raise ValueError(f"Gram matrix is not positive semidefinite (min eig {eigmin:.3e})")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def gram(family: VectorFamily, order: Sequence[int] | None = None) -> GramMatrix:
    """Gram matrix of the family, optionally under a reordering.

    ``order`` must be a permutation of ``range(m)``; entry ``(i, j)`` of the
    result is the dot product of vectors ``order[i]`` and ``order[j]``.
    """
    if order is None:
        mat = family.vectors
    else:
        idx = list(order)
        if sorted(idx) != list(range(family.m)):
            raise ValueError("order must be a permutation of the family indices")
        mat = family.vectors[idx]
    return GramMatrix(mat @ mat.T)


def normalize(family: VectorFamily, tol: Tolerances | None = None) -> VectorFamily:
    """Family with every vector rescaled to unit norm."""
    tol = tol or DEFAULT_TOLERANCES
    norms = family.norms()
    if np.any(norms <= tol.zero_tol):
        bad = int(np.flatnonzero(norms <= tol.zero_tol)[0])
        raise ValueError(f"vector {bad} has norm at or below zero_tol")
    return VectorFamily(family.dim, family.vectors / norms[:, None])


def span_of(family: VectorFamily, tol: Tolerances | None = None) -> Subspace:
    """Linear span of the family as a Subspace with an SVD-derived basis."""
    tol = tol or DEFAULT_TOLERANCES
    _, svals, vh = np.linalg.svd(family.vectors, full_matrices=False)
    cutoff = tol.rank_tol * max(family.m, family.dim) * (svals[0] if svals.size else 0.0)
    rank = int(np.sum(svals > cutoff))
    return Subspace(ambient_dim=family.dim, onb=vh[:rank])


def coordinates(
    family: VectorFamily, sub: Subspace, tol: Tolerances | None = None
) -> VectorFamily:
    """Coordinates of every vector with respect to ``sub``'s orthonormal basis.

    Dot products are preserved exactly in exact arithmetic.  Raises
    :class:`SubspaceMembershipError` naming the first vector whose projection
    residual exceeds ``zero_tol`` times its norm.
    """
    tol = tol or DEFAULT_TOLERANCES
    if sub.ambient_dim != family.dim:
        raise ValueError("subspace ambient dimension does not match the family")
    coords = family.vectors @ sub.onb.T
    residuals = np.linalg.norm(family.vectors - coords @ sub.onb, axis=1)
    limits = tol.zero_tol * family.norms()
    bad = np.flatnonzero(residuals > limits)
    if bad.size:
        i = int(bad[0])
        raise SubspaceMembershipError(i, float(residuals[i]))
    # nonzero vectors cannot pass the residual check against a 0-dim subspace,
    # so sub.dim >= 1 here and the constructor invariants hold
    return VectorFamily(sub.dim, coords)


def in_positive_span(
    family: VectorFamily, u: np.ndarray, tol: Tolerances | None = None
) -> np.ndarray | None:
    """Nonnegative coefficients writing ``u`` as a combination of the family.

    Solves the nonnegative least-squares problem ``min |A alpha - u|`` over
    ``alpha >= 0`` (columns of ``A`` are the family vectors) and accepts when
    the residual is at most ``zero_tol * max(1, |u|)``.  Returns the
    coefficient vector on success, ``None`` otherwise.
    """
    tol = tol or DEFAULT_TOLERANCES
    u = np.asarray(u, dtype=float)
    if u.shape != (family.dim,):
        raise ValueError(f"u must have shape ({family.dim},)")
    if not np.all(np.isfinite(u)):
        raise ValueError("u must have finite entries")
    alpha, residual = nnls(family.vectors.T, u)
    if residual <= tol.zero_tol * max(1.0, float(np.linalg.norm(u))):
        return alpha
    return None


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _reject_constant(token: str):
    raise FamilyFormatError(f"non-finite value {token!r} is not allowed in a family file")


def family_from_json_dict(payload: dict) -> VectorFamily:
    if not isinstance(payload, dict):
        raise FamilyFormatError("family JSON must be an object")
    try:
        dim = payload["dim"]
        vectors = payload["vectors"]
    except KeyError as exc:
        raise FamilyFormatError(f"family JSON is missing key {exc}") from exc
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise FamilyFormatError("'dim' must be an integer")
    if not isinstance(vectors, list) or not vectors:
        raise FamilyFormatError("'vectors' must be a non-empty list of rows")
    rows = []
    for i, row in enumerate(vectors):
        if not isinstance(row, list) or len(row) != dim:
            raise FamilyFormatError(f"vector {i} does not have length dim={dim}")
        try:
            rows.append([float(x) for x in row])
        except (TypeError, ValueError) as exc:
            raise FamilyFormatError(f"vector {i} has a non-numeric entry") from exc
    try:
        return VectorFamily(dim=dim, vectors=np.array(rows))
    except ValueError as exc:
        raise FamilyFormatError(str(exc)) from exc


def loads_family(text: str) -> VectorFamily:
    """Parse a family from JSON text (``{"dim": n, "vectors": [[...], ...]}``)."""
    try:
        payload = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(f"invalid JSON: {exc}") from exc
    return family_from_json_dict(payload)


def _load_family_csv(text: str) -> VectorFamily:
    rows: list[list[float]] = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError as exc:
            raise FamilyFormatError(f"line {lineno}: non-numeric entry") from exc
        if any(not math.isfinite(v) for v in values):
            raise FamilyFormatError(f"line {lineno}: non-finite entries are not allowed")
        if rows and len(values) != len(rows[0]):
            raise FamilyFormatError(
                f"line {lineno}: expected {len(rows[0])} entries, got {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise FamilyFormatError("CSV family file has no rows")
    try:
        return VectorFamily(dim=len(rows[0]), vectors=np.array(rows))
    except ValueError as exc:
        raise FamilyFormatError(str(exc)) from exc


def load_family(path: str | Path) -> VectorFamily:
    """Read a family from a JSON or CSV file (dispatch on extension, then content)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FamilyFormatError(f"cannot read {path}: {exc}") from exc
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return _load_family_csv(text)
    if suffix == ".json":
        return loads_family(text)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return loads_family(text)
    return _load_family_csv(text)


def dumps_family(family: VectorFamily, extra: dict | None = None) -> str:
    """Serialize a family to deterministic JSON, with optional extra keys."""
    payload = family.to_json_dict()
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2) + "\n"


def dump_family(family: VectorFamily, path: str | Path, extra: dict | None = None) -> None:
    Path(path).write_text(dumps_family(family, extra))


def family_digest(family: VectorFamily) -> str:
    """SHA-256 of the canonical JSON serialization (extras excluded)."""
    return hashlib.sha256(dumps_family(family).encode()).hexdigest()
