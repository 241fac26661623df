"""Families, subspaces, Gram matrices, coordinates, and file I/O."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from psskit import (
    DEFAULT_TOLERANCES,
    GramMatrix,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    dump_family,
    dumps_family,
    family_digest,
    family_from_json_dict,
    gram,
    in_positive_span,
    load_family,
    loads_family,
    normalize,
    span_of,
)
from psskit.errors import FamilyFormatError, SubspaceMembershipError

from conftest import TANGLED_ROWS


class TestTolerances:
    def test_defaults(self):
        assert DEFAULT_TOLERANCES.zero_tol == 1e-10
        assert DEFAULT_TOLERANCES.rank_tol == 1e-12
        assert DEFAULT_TOLERANCES.dedupe_tol == 1e-9

    @pytest.mark.parametrize("field", ["zero_tol", "rank_tol", "dedupe_tol"])
    @pytest.mark.parametrize("bad", [0.0, -1e-9])
    def test_must_be_positive(self, field, bad):
        with pytest.raises(ValueError):
            Tolerances(**{field: bad})


class TestVectorFamily:
    def test_basic_accessors(self):
        fam = VectorFamily.from_rows([[3.0, 0.0], [0.0, 4.0], [-1.0, -1.0]])
        assert fam.dim == 2
        assert fam.m == 3
        assert_allclose(fam.norms(), [3.0, 4.0, math.sqrt(2.0)])
        assert_allclose(np.linalg.norm(fam.unit(), axis=1), 1.0)

    def test_preserves_multiset_order_and_duplicates(self):
        rows = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        fam = VectorFamily.from_rows(rows)
        assert fam.m == 3
        assert_allclose(fam.vectors, rows)

    def test_vectors_are_read_only(self):
        fam = VectorFamily.from_rows([[1.0, 0.0]])
        with pytest.raises(ValueError):
            fam.vectors[0, 0] = 5.0

    @pytest.mark.parametrize(
        "rows",
        [
            [[0.0, 0.0]],
            [[1.0, float("nan")]],
            [[1.0, float("inf")]],
        ],
    )
    def test_rejects_degenerate_input(self, rows):
        with pytest.raises(ValueError):
            VectorFamily.from_rows(rows)

    def test_rejects_dim_mismatch(self):
        with pytest.raises(ValueError):
            VectorFamily(3, np.eye(2))

    def test_subfamily_and_drop(self):
        fam = VectorFamily.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        sub = fam.subfamily([2, 0])
        assert_allclose(sub.vectors, [[-1.0, -1.0], [1.0, 0.0]])
        assert_allclose(fam.drop(1).vectors, [[1.0, 0.0], [-1.0, -1.0]])


class TestSubspace:
    def test_full(self):
        sub = Subspace.full(3)
        assert sub.dim == 3
        assert_allclose(sub.onb, np.eye(3))

    def test_rejects_non_orthonormal_rows(self):
        with pytest.raises(ValueError):
            Subspace(2, np.array([[1.0, 1.0]]))
        with pytest.raises(ValueError):
            Subspace(2, np.array([[1.0, 0.0], [1.0, 0.0]]))


class TestGram:
    def test_entries_match_plain_dot_products(self, tangled_basis):
        g = gram(tangled_basis)
        rows = tangled_basis.vectors
        for i in range(6):
            for j in range(6):
                assert g.entries[i, j] == pytest.approx(float(rows[i] @ rows[j]))
        # the overlap that ties the third vector to the trailing axes
        assert g.entries[2, 4] == pytest.approx(2.0)
        assert g.entries[2, 5] == pytest.approx(2.0)

    def test_order_permutes_rows_and_columns(self, tangled_basis, rng):
        order = rng.permutation(6)
        g = gram(tangled_basis)
        gp = gram(tangled_basis, order=order)
        assert_allclose(gp.entries, g.entries[np.ix_(order, order)])

    def test_order_must_be_permutation(self, tangled_basis):
        with pytest.raises(ValueError):
            gram(tangled_basis, order=[0, 0, 1, 2, 3, 4])

    def test_gram_matrix_validates_symmetry(self):
        with pytest.raises(ValueError):
            GramMatrix(np.array([[1.0, 0.5], [0.2, 1.0]]))

    def test_gram_matrix_rejects_indefinite(self):
        with pytest.raises(ValueError):
            GramMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestSpanAndCoordinates:
    def test_span_of_detects_rank(self, tangled_basis):
        leading = tangled_basis.subfamily([0, 1, 2, 3])
        sub = span_of(leading)
        assert sub.dim == 3
        assert_allclose(sub.onb @ sub.onb.T, np.eye(3), atol=1e-12)
        assert span_of(tangled_basis).dim == 4

    def test_coordinates_in_slice_subspace(self, tangled_basis, tangled_slice_subspace):
        coords = coordinates(
            tangled_basis.subfamily([2]), tangled_slice_subspace
        )
        assert coords.dim == 3
        assert_allclose(coords.vectors[0], [-1.0, -1.0, 2.0 * math.sqrt(2.0)], atol=1e-12)

    def test_coordinates_rejects_outside_vectors(self, tangled_basis, tangled_slice_subspace):
        with pytest.raises(SubspaceMembershipError) as err:
            coordinates(tangled_basis, tangled_slice_subspace)
        assert err.value.index == 4  # first trailing axis sticks out

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_coordinates_preserve_geometry(self, seed):
        rng = np.random.default_rng(seed)
        q, _ = np.linalg.qr(rng.standard_normal((5, 3)))
        sub = Subspace(5, q.T)
        rows = rng.standard_normal((4, 3)) @ q.T
        fam = VectorFamily(5, rows)
        coords = coordinates(fam, sub)
        assert_allclose(coords.vectors @ coords.vectors.T, rows @ rows.T, atol=1e-10)

    def test_normalize(self):
        fam = VectorFamily.from_rows([[3.0, 4.0], [0.0, -2.0]])
        unit = normalize(fam)
        assert_allclose(np.linalg.norm(unit.vectors, axis=1), 1.0)
        assert_allclose(unit.vectors[0], [0.6, 0.8])


class TestPositiveSpanMembership:
    def test_membership_with_certificate(self):
        fam = VectorFamily.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        alpha = in_positive_span(fam, np.array([-2.0, -3.0]))
        assert alpha is not None
        assert np.all(alpha >= 0.0)
        assert_allclose(alpha @ fam.vectors, [-2.0, -3.0], atol=1e-9)

    def test_non_membership(self):
        fam = VectorFamily.from_rows([[1.0, 0.0], [0.0, 1.0]])
        assert in_positive_span(fam, np.array([-1.0, 0.0])) is None
        assert in_positive_span(fam, np.array([1.0, -0.5])) is None

    def test_reaching_past_the_orthant_needs_the_third_vector(self):
        fam = VectorFamily.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        alpha = in_positive_span(fam, np.array([-1.0, 0.0]))
        assert alpha is not None
        assert_allclose(alpha @ fam.vectors, [-1.0, 0.0], atol=1e-9)

    def test_every_member_lies_in_its_own_cone(self, rng):
        fam = VectorFamily(3, rng.standard_normal((6, 3)))
        for row in fam.vectors:
            assert in_positive_span(fam, row) is not None

    def test_cone_is_closed_under_addition_of_certified_members(self, rng):
        for _ in range(10):
            fam = VectorFamily(3, rng.standard_normal((5, 3)))
            u = rng.uniform(0.0, 2.0, 5) @ fam.vectors
            v = rng.uniform(0.0, 2.0, 5) @ fam.vectors
            if in_positive_span(fam, u) is not None and in_positive_span(fam, v) is not None:
                assert in_positive_span(fam, u + v) is not None


class TestIO:
    def test_json_round_trip(self, tmp_path, tangled_basis):
        path = tmp_path / "family.json"
        dump_family(tangled_basis, path)
        again = load_family(path)
        assert again.dim == 4
        assert_allclose(again.vectors, tangled_basis.vectors)

    def test_dumps_is_deterministic_and_ends_with_newline(self, tangled_basis):
        text = dumps_family(tangled_basis)
        assert text.endswith("\n")
        assert text == dumps_family(tangled_basis)
        payload = json.loads(text)
        assert payload["dim"] == 4
        assert len(payload["vectors"]) == 6

    def test_extra_payload_keys_are_ignored_on_load(self, tangled_basis):
        text = dumps_family(tangled_basis, extra={"note": "anything"})
        again = loads_family(text)
        assert_allclose(again.vectors, tangled_basis.vectors)

    @pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
    def test_json_rejects_non_finite_tokens(self, token):
        text = '{"dim": 2, "vectors": [[1.0, %s]]}' % token
        with pytest.raises(FamilyFormatError):
            loads_family(text)

    def test_json_rejects_ragged_rows(self):
        with pytest.raises(FamilyFormatError):
            loads_family('{"dim": 2, "vectors": [[1.0, 0.0], [1.0]]}')

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "family.csv"
        path.write_text("1.0,0.0\n0.0,1.0\n\n-1.0,-1.0\n")
        fam = load_family(path)
        assert fam.m == 3
        assert_allclose(fam.vectors[2], [-1.0, -1.0])

    def test_csv_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,0.0\n1.0\n")
        with pytest.raises(FamilyFormatError):
            load_family(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FamilyFormatError):
            load_family(tmp_path / "nope.json")

    def test_digest_tracks_content_not_formatting(self, tangled_basis):
        d1 = family_digest(tangled_basis)
        assert len(d1) == 64 and set(d1) <= set("0123456789abcdef")
        assert d1 == family_digest(VectorFamily(4, TANGLED_ROWS.copy()))
        assert d1 != family_digest(tangled_basis.drop(0))

    def test_family_from_json_dict_type_errors(self):
        with pytest.raises(FamilyFormatError):
            family_from_json_dict({"vectors": [[1.0, 0.0]]})
        with pytest.raises(FamilyFormatError):
            family_from_json_dict({"dim": "two", "vectors": [[1.0, 0.0]]})
