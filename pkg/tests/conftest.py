"""Shared fixtures, generators, and the acceptance-report hook."""

from __future__ import annotations

import numpy as np
import pytest

from psskit import Subspace, VectorFamily


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    results = getattr(item.config, "_criterion_results", None)
    if results is None:
        results = {}
        item.config._criterion_results = results
    number, title = marker.args
    _, ok_so_far = results.get(number, (title, True))
    results[number] = (title, ok_so_far and report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criterion_results", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed = results[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")


def random_onb(rng: np.random.Generator, ambient: int, dim: int) -> np.ndarray:
    """Rows form an orthonormal basis of a uniformly random dim-subspace."""
    q, _ = np.linalg.qr(rng.standard_normal((ambient, dim)))
    return q.T


def random_minimal_basis(
    rng: np.random.Generator, ell: int, ambient: int | None = None
) -> VectorFamily:
    """Random minimal positive basis of a random ell-dimensional subspace.

    ell linearly independent vectors plus one strictly negative combination;
    redraws until reasonably conditioned so downstream solves stay stable.
    """
    ambient = ell if ambient is None else ambient
    onb = random_onb(rng, ambient, ell) if ambient > ell else np.eye(ell)
    while True:
        mat = rng.standard_normal((ell, ell))
        if np.linalg.cond(mat) < 100.0:
            break
    coeffs = rng.uniform(0.2, 2.0, ell)
    rows = np.vstack([mat, -coeffs @ mat])
    return VectorFamily(ambient, rows @ onb)


def random_pss(rng: np.random.Generator, m: int, n: int) -> VectorFamily:
    """Random positive spanning set of R^n with exactly m elements (m >= n+1)."""
    if m < n + 1:
        raise ValueError("a positive spanning set needs at least n+1 vectors")
    base = random_minimal_basis(rng, n)
    extra = rng.standard_normal((m - n - 1, n))
    extra /= np.linalg.norm(extra, axis=1)[:, None]
    return VectorFamily(n, np.vstack([base.vectors, extra]) if m > n + 1 else base.vectors)


def random_partition(rng: np.random.Generator, n: int) -> list[int]:
    dims: list[int] = []
    left = n
    while left > 0:
        d = int(rng.integers(1, left + 1))
        dims.append(d)
        left -= d
    return dims


def assert_same_directions(got, expected, tol: float = 1e-9) -> None:
    """Unit-vector sets match up to ordering: mutual best cosine >= 1 - tol."""
    got = np.asarray(got, dtype=float)
    expected = np.asarray(expected, dtype=float)
    assert got.shape == expected.shape, (got.shape, expected.shape)
    cosines = got @ expected.T
    assert np.all(cosines.max(axis=1) >= 1.0 - tol), cosines.max(axis=1)
    assert np.all(cosines.max(axis=0) >= 1.0 - tol), cosines.max(axis=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


# Positive basis of R^4 whose middle pair straddles every coordinate: the
# four leading vectors form a minimal positive basis of the 3-space
# {(x, y, z, z)}, and the trailing axes tie the rest together.  Used as the
# canonical "positive basis that has no orthogonal block structure" input.
TANGLED_ROWS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, -1.0, 2.0, 2.0],
        [1.0, 1.0, -4.0, -4.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


@pytest.fixture
def tangled_basis() -> VectorFamily:
    return VectorFamily(4, TANGLED_ROWS)


@pytest.fixture
def tangled_slice_subspace() -> Subspace:
    root = 1.0 / np.sqrt(2.0)
    return Subspace(
        4,
        np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, root, root],
            ]
        ),
    )
