"""Algebra-valued metrics: axiom validation, the embeddability criterion
through the squared-distance kernel, explicit isometric embeddings, and
distance tables built from module points."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpdkernels import (
    AlgebraDescriptor,
    CStarMetric,
    GenConfig,
    IndexSet,
    InvalidMetric,
    ModuleElement,
    PreconditionFailure,
    compressed_gram,
    distance_matrix_from_points,
    embed,
    is_embeddable,
    is_positive_definite,
    metric_norm,
    metric_to_kernel,
    module_abs,
    module_norm,
    op_norm,
    random_metric,
    random_module_element,
    scalar_metric,
    shift_transform,
    validate_metric,
)
from helpers import single_block

seeds = st.integers(min_value=0, max_value=2**32 - 1)
metric_descriptors = st.sampled_from(
    [AlgebraDescriptor(d) for d in ([1], [2], [3], [1, 2], [2, 3])]
)

STAR = scalar_metric(
    [
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 2.0, 2.0],
        [1.0, 2.0, 0.0, 2.0],
        [1.0, 2.0, 2.0, 0.0],
    ],
    ["c", "l1", "l2", "l3"],
)
COLLINEAR = scalar_metric(
    [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]], ["p1", "p2", "p3"]
)
TWO_POINT = scalar_metric([[0.0, 1.0], [1.0, 0.0]], ["p1", "p2"])


class TestValidateMetric:
    def test_star_metric_is_valid(self):
        assert validate_metric(STAR).holds

    def test_collinear_points_are_valid(self):
        assert validate_metric(COLLINEAR).holds

    def test_triangle_violation(self):
        dm = scalar_metric([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "triangle" in verdict.context
        assert verdict.witness is not None

    def test_vanishing_distance_between_distinct_labels(self):
        dm = scalar_metric([[0.0, 0.0], [0.0, 0.0]])
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "distance zero" in verdict.context

    def test_negative_entry(self):
        dm = scalar_metric([[0.0, -1.0], [-1.0, 0.0]])
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "not positive" in verdict.context

    def test_asymmetric_table(self):
        dm = scalar_metric([[0.0, 1.0], [2.0, 0.0]])
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "symmetry" in verdict.context

    def test_nonzero_diagonal(self):
        dm = scalar_metric([[1.0, 1.0], [1.0, 1.0]])
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "diagonal" in verdict.context

    def test_operator_valued_triangle_is_checked_in_the_cone_order(self):
        # A norm comparison would accept this table (4 <= 2 + 2), but the
        # slack d(a,c) + d(c,b) - d(a,b) = diag(-2, 3) is indefinite.
        d12 = single_block(np.diag([4.0, 1.0]))
        d13 = single_block(np.diag([1.0, 2.0]))
        d23 = single_block(np.diag([1.0, 2.0]))
        zero = single_block(np.zeros((2, 2)))
        dm = CStarMetric(
            IndexSet(["a", "b", "c"]),
            d12.descriptor,
            [[zero, d12, d13], [d12, zero, d23], [d13, d23, zero]],
        )
        verdict = validate_metric(dm)
        assert not verdict.holds
        assert "triangle" in verdict.context


class TestMetricToKernel:
    def test_two_point_metric(self):
        delta = 3.0
        dm = scalar_metric([[0.0, delta], [delta, 0.0]])
        K = metric_to_kernel(dm)
        assert K[("s1", "s2")].blocks[0][0, 0] == pytest.approx(-9.0)
        assert K[("s1", "s1")].blocks[0][0, 0] == 0.0

    def test_star_metric_squares_entrywise(self):
        K = metric_to_kernel(STAR)
        expected = -np.array(
            [
                [0.0, 1.0, 1.0, 1.0],
                [1.0, 0.0, 4.0, 4.0],
                [1.0, 4.0, 0.0, 4.0],
                [1.0, 4.0, 4.0, 0.0],
            ]
        )
        got = np.array([[v.blocks[0][0, 0].real for v in row] for row in K.values])
        assert np.array_equal(got, expected)

    def test_operator_valued_square(self):
        d = single_block(np.diag([1.0, 2.0]))
        zero = single_block(np.zeros((2, 2)))
        dm = CStarMetric(
            IndexSet(["a", "b"]), d.descriptor, [[zero, d], [d, zero]]
        )
        K = metric_to_kernel(dm)
        assert np.allclose(K[("a", "b")].blocks[0], -np.diag([1.0, 4.0]))

    def test_invalid_metrics_are_rejected(self):
        dm = scalar_metric([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
        with pytest.raises(InvalidMetric) as exc:
            metric_to_kernel(dm)
        assert exc.value.verdict is not None


class TestIsEmbeddable:
    def test_collinear_points_embed(self):
        assert is_embeddable(COLLINEAR).holds

    def test_star_metric_does_not_embed(self):
        verdict = is_embeddable(STAR)
        assert not verdict.holds
        w = verdict.witness
        # The compressed squared-distance form has an exact integer table
        # with negative determinant; the witness is its bottom eigenpair.
        C = compressed_gram(metric_to_kernel(STAR))[w.summand]
        assert np.array_equal(C.real, [[2.0, 4.0, 4.0], [4.0, 8.0, 4.0], [4.0, 4.0, 8.0]])
        assert np.linalg.det(C).real == pytest.approx(-32.0)
        quad = (w.vector.conj() @ C @ w.vector).real
        assert quad == pytest.approx(w.eigenvalue)
        assert quad <= -0.1

    def test_single_point_is_trivially_embeddable(self):
        dm = scalar_metric([[0.0]])
        assert is_embeddable(dm).holds

    def test_verdict_matches_the_shifted_kernel_at_every_base_point(self):
        for dm in (STAR, COLLINEAR):
            expected = is_embeddable(dm).holds
            K = metric_to_kernel(dm)
            for s0 in dm.index_set.labels:
                assert is_positive_definite(shift_transform(K, s0)).holds == expected


class TestEmbed:
    def test_two_point_embedding(self):
        result = embed(TWO_POINT, "p1")
        assert module_norm(result.points["p1"]) == 0.0
        assert module_norm(result.points["p2"]) == pytest.approx(1.0)
        gap = module_abs(result.points["p1"] - result.points["p2"])
        assert op_norm(gap) == pytest.approx(1.0)

    def test_collinear_distances_are_reproduced(self):
        result = embed(COLLINEAR, "p1")
        realized = result.realized_metric()
        for s in COLLINEAR.index_set.labels:
            for t in COLLINEAR.index_set.labels:
                err = op_norm(realized[(s, t)] - COLLINEAR[(s, t)])
                assert err <= 1e-9

    def test_base_point_is_anchored_at_the_origin(self):
        for s0 in COLLINEAR.index_set.labels:
            result = embed(COLLINEAR, s0)
            assert module_norm(result.points[s0]) == 0.0

    def test_star_metric_is_rejected_with_witness(self):
        with pytest.raises(PreconditionFailure) as exc:
            embed(STAR, "c")
        verdict = exc.value.verdict
        assert verdict is not None
        assert verdict.witness.eigenvalue <= -0.1

    def test_invalid_metric_is_rejected(self):
        dm = scalar_metric([[0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(InvalidMetric):
            embed(dm, "s1")

    @given(seed=seeds, desc=metric_descriptors, n=st.integers(2, 5))
    def test_generated_metrics_roundtrip(self, seed, desc, n):
        dm = random_metric(GenConfig(seed=seed, n=n, descriptor=desc))
        result = embed(dm, dm.index_set.labels[0])
        realized = result.realized_metric()
        bound = 1e-8 * (1.0 + metric_norm(dm))
        for s in dm.index_set.labels:
            for t in dm.index_set.labels:
                assert op_norm(realized[(s, t)] - dm[(s, t)]) <= bound


class TestDistanceMatrixFromPoints:
    def test_two_scalar_points(self):
        desc = AlgebraDescriptor([1])
        points = {
            "a": ModuleElement(desc, [1], [np.array([[0.0]])]),
            "b": ModuleElement(desc, [1], [np.array([[2.5]])]),
        }
        dm = distance_matrix_from_points(points)
        assert dm[("a", "b")].blocks[0][0, 0] == pytest.approx(2.5)
        assert dm[("a", "a")].blocks[0][0, 0] == 0.0

    def test_three_points_on_a_line(self):
        desc = AlgebraDescriptor([1])
        points = {
            s: ModuleElement(desc, [1], [np.array([[float(i)]])])
            for i, s in enumerate(["p1", "p2", "p3"])
        }
        dm = distance_matrix_from_points(points)
        got = np.array([[v.blocks[0][0, 0].real for v in row] for row in dm.values])
        assert np.array_equal(got, [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])

    def test_outputs_are_embeddable(self):
        dm = random_metric(GenConfig(seed=8, n=4, descriptor=AlgebraDescriptor([2])))
        assert validate_metric(dm).holds
        assert is_embeddable(dm).holds

    def test_coincident_points_are_rejected(self):
        desc = AlgebraDescriptor([1])
        x = ModuleElement(desc, [1], [np.array([[1.0]])])
        with pytest.raises(InvalidMetric, match="coincident"):
            distance_matrix_from_points({"a": x, "b": x})

    def test_raw_gaussian_points_can_violate_the_cone_triangle(self):
        # Unlike commuting configurations, unconstrained module points do not
        # obey the triangle inequality in the cone order; the constructor
        # must reject such tables rather than return a non-metric.
        desc = AlgebraDescriptor([2])
        rejected = 0
        for seed in range(20):
            cfg = GenConfig(seed=seed, n=3, descriptor=desc)
            points = {
                s: random_module_element(cfg, i)
                for i, s in enumerate(["a", "b", "c"])
            }
            try:
                distance_matrix_from_points(points)
            except InvalidMetric as exc:
                assert "triangle" in str(exc)
                rejected += 1
        assert rejected > 0
