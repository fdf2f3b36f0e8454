"""Kernel-level decision procedures: assembly, positivity, conditional
positivity, the base-point shift, the shifted-matrix and two-by-two
criteria, Schur products, and the pairwise inequality checks."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpdkernels import (
    AlgebraDescriptor,
    AlgebraElement,
    GenConfig,
    IndexSet,
    Kernel,
    NotHermitian,
    UnknownLabel,
    adjoint,
    assemble_gram,
    cauchy_schwarz_cpd_check,
    cauchy_schwarz_pd_check,
    compressed_gram,
    cond_positive_matrix_check,
    is_conditionally_positive_definite,
    is_positive,
    is_positive_definite,
    kernel_norm,
    op_norm,
    random_cpd_kernel,
    random_gram_kernel,
    random_hermitian_kernel,
    random_non_cpd_kernel,
    recover_affine_part,
    scalar_kernel,
    schur_product,
    shift_transform,
    two_by_two_check,
)
from helpers import block_kernel, single_block

seeds = st.integers(min_value=0, max_value=2**32 - 1)
descriptors = st.sampled_from(
    [AlgebraDescriptor(d) for d in ([1], [2], [1, 2], [3, 1])]
)
sizes = st.integers(min_value=2, max_value=5)

SIGN_FLIP = scalar_kernel([[0.0, -1.0], [-1.0, 0.0]])
SIGN_FLIP_SQUARE = scalar_kernel([[0.0, 1.0], [1.0, 0.0]])


def mixed_kernel(seed, n, desc):
    """One kernel per seed, alternating over the generator classes so both
    verdict branches appear."""
    cfg = GenConfig(seed=seed, n=n, descriptor=desc)
    draw = seed % 4
    if draw == 0:
        return random_gram_kernel(cfg)
    if draw == 1:
        return random_cpd_kernel(cfg)
    if draw == 2:
        return random_cpd_kernel(cfg, diagonal_zero=True)
    return random_non_cpd_kernel(cfg)


class TestIndexSet:
    def test_labels_stay_ordered(self):
        s = IndexSet(["b", "a", "c"])
        assert s.labels == ("b", "a", "c")
        assert s.index("c") == 2

    def test_duplicates_are_rejected(self):
        with pytest.raises(ValueError):
            IndexSet(["a", "a"])

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            IndexSet(["a"]).index("b")


class TestKernelTable:
    def test_table_must_be_square(self):
        z = AlgebraElement.zero(AlgebraDescriptor([1]))
        with pytest.raises(Exception):
            Kernel(IndexSet(["a", "b"]), AlgebraDescriptor([1]), [[z, z]])

    def test_entries_must_share_the_descriptor(self):
        d1 = AlgebraDescriptor([1])
        foreign = AlgebraElement.zero(AlgebraDescriptor([2]))
        with pytest.raises(Exception):
            Kernel(IndexSet(["a"]), d1, [[foreign]])

    def test_label_lookup(self):
        K = scalar_kernel([[1.0, 2.0], [2.0, 1.0]], ["x", "y"])
        assert K[("x", "y")].blocks[0][0, 0] == 2.0

    def test_hermitian_probe(self):
        assert SIGN_FLIP.is_hermitian()
        raw = scalar_kernel([[0.0, 1.0], [2.0, 0.0]])
        assert not raw.is_hermitian()


class TestAssembleGram:
    def test_scalar_table_assembles_to_itself(self):
        (G,) = assemble_gram(SIGN_FLIP)
        assert np.array_equal(G, np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_single_label_assembles_to_the_value(self):
        K = block_kernel([[np.diag([2.0, 3.0])]], ["a"])
        (G,) = assemble_gram(K)
        assert np.array_equal(G, np.diag([2.0, 3.0]))

    def test_blocks_land_in_reading_order(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0]])
        b = np.array([[0.0, 2.0], [2.0, 0.0]])
        K = block_kernel([[a, b], [b, a]], ["s", "t"])
        (G,) = assemble_gram(K)
        assert np.array_equal(G[0:2, 2:4], b)
        assert np.array_equal(G[2:4, 0:2], b)
        assert np.array_equal(G[2:4, 2:4], a)

    def test_non_hermitian_tables_are_rejected(self):
        raw = scalar_kernel([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(NotHermitian):
            assemble_gram(raw)


class TestIsPositiveDefinite:
    def test_gram_kernels_pass(self):
        K = random_gram_kernel(GenConfig(seed=3, n=4, descriptor=AlgebraDescriptor([2, 1])))
        assert is_positive_definite(K).holds

    def test_zero_kernel_passes(self):
        K = Kernel.zero(IndexSet(["a", "b"]), AlgebraDescriptor([2]))
        assert is_positive_definite(K).holds

    def test_indefinite_scalar_table_fails_with_witness(self):
        # Eigenvalues are 3 and -1.
        K = scalar_kernel([[1.0, 2.0], [2.0, 1.0]])
        verdict = is_positive_definite(K)
        assert not verdict.holds
        w = verdict.witness
        assert w is not None
        assert w.eigenvalue == pytest.approx(-1.0)
        # The witness is independently checkable against the assembled matrix.
        G = assemble_gram(K)[w.summand]
        quad = (w.vector.conj() @ G @ w.vector).real
        assert quad == pytest.approx(w.eigenvalue)
        assert np.linalg.norm(w.vector) == pytest.approx(1.0)

    def test_diagonal_entries_of_pd_kernels_are_positive(self):
        K = random_gram_kernel(GenConfig(seed=11, n=3, descriptor=AlgebraDescriptor([2])))
        assert is_positive_definite(K).holds
        for i in range(K.n):
            assert is_positive(K.values[i][i])


class TestIsConditionallyPositiveDefinite:
    def test_sign_flip_table_passes(self):
        assert is_conditionally_positive_definite(SIGN_FLIP).holds

    def test_positive_off_diagonal_with_zero_diagonal_fails(self):
        assert not is_conditionally_positive_definite(SIGN_FLIP_SQUARE).holds

    def test_failure_witness_lives_in_the_compressed_space(self):
        verdict = is_conditionally_positive_definite(SIGN_FLIP_SQUARE)
        w = verdict.witness
        C = compressed_gram(SIGN_FLIP_SQUARE)[w.summand]
        assert C.shape == (1, 1)
        assert C[0, 0].real == pytest.approx(-2.0)
        quad = (w.vector.conj() @ C @ w.vector).real
        assert quad == pytest.approx(w.eigenvalue)
        assert w.eigenvalue == pytest.approx(-2.0)

    def test_positive_definite_implies_conditionally_positive(self):
        K = random_gram_kernel(GenConfig(seed=5, n=3, descriptor=AlgebraDescriptor([1, 2])))
        assert is_positive_definite(K).holds
        assert is_conditionally_positive_definite(K).holds

    def test_single_label_is_rejected(self):
        K = Kernel.zero(IndexSet(["only"]), AlgebraDescriptor([1]))
        with pytest.raises(ValueError):
            is_conditionally_positive_definite(K)

    @given(seed=seeds, n=sizes, desc=descriptors)
    def test_verdict_is_invariant_under_positive_scaling(self, seed, n, desc):
        K = mixed_kernel(seed, n, desc)
        base = is_conditionally_positive_definite(K).holds
        for alpha in (1e-6, 1e6):
            assert is_conditionally_positive_definite(alpha * K).holds == base

    def test_cpd_cone_is_closed_under_positive_combinations(self):
        desc = AlgebraDescriptor([2])
        a = random_cpd_kernel(GenConfig(seed=21, n=3, descriptor=desc))
        b = random_cpd_kernel(GenConfig(seed=22, n=3, descriptor=desc))
        combo = 0.7 * a + 2.5 * b
        assert is_conditionally_positive_definite(combo).holds


class TestShiftTransform:
    def test_hand_value_at_the_first_label(self):
        L = shift_transform(SIGN_FLIP, "s1")
        (G,) = assemble_gram(L)
        assert np.array_equal(G, np.array([[0.0, 0.0], [0.0, 1.0]]))

    def test_zero_kernel_shifts_to_zero(self):
        K = Kernel.zero(IndexSet(["a", "b"]), AlgebraDescriptor([2]))
        L = shift_transform(K, "b")
        assert kernel_norm(L) == 0.0

    def test_affine_kernels_shift_to_zero(self):
        rng = np.random.default_rng(17)
        desc = AlgebraDescriptor([2])
        labels = ["a", "b", "c"]
        g = {
            s: AlgebraElement(desc, [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))])
            for s in labels
        }
        values = [[g[s] + adjoint(g[t]) for t in labels] for s in labels]
        K = Kernel(IndexSet(labels), desc, values)
        for s0 in labels:
            assert kernel_norm(shift_transform(K, s0)) <= 1e-12 * kernel_norm(K)

    def test_unknown_base_point(self):
        with pytest.raises(UnknownLabel):
            shift_transform(SIGN_FLIP, "nope")

    @given(seed=seeds, n=sizes, desc=descriptors)
    def test_equivalence_with_conditional_positivity_at_every_base_point(
        self, seed, n, desc
    ):
        K = mixed_kernel(seed, n, desc)
        cpd = is_conditionally_positive_definite(K).holds
        for s0 in K.index_set.labels:
            shifted = is_positive_definite(shift_transform(K, s0)).holds
            assert shifted == cpd


class TestRecoverAffinePart:
    def test_affine_kernels_are_reproduced(self):
        rng = np.random.default_rng(23)
        desc = AlgebraDescriptor([1, 2])
        labels = ["a", "b", "c"]
        g = {
            s: AlgebraElement(
                desc,
                [
                    rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                    for d in desc.summand_dims
                ],
            )
            for s in labels
        }
        K = Kernel(
            IndexSet(labels), desc, [[g[s] + adjoint(g[t]) for t in labels] for s in labels]
        )
        for s0 in labels:
            h = recover_affine_part(K, s0)
            err = max(
                op_norm(K[(s, t)] - h[s] - adjoint(h[t]))
                for s in labels
                for t in labels
            )
            assert err <= 1e-9 * (1.0 + kernel_norm(K))

    def test_zero_kernel_gives_zero_map(self):
        K = Kernel.zero(IndexSet(["a", "b"]), AlgebraDescriptor([1]))
        h = recover_affine_part(K, "a")
        assert all(op_norm(v) == 0.0 for v in h.values())

    def test_constant_kernel(self):
        K = scalar_kernel([[2.0, 2.0], [2.0, 2.0]])
        h = recover_affine_part(K, "s1")
        for s in K.index_set.labels:
            assert h[s].blocks[0][0, 0] == pytest.approx(1.0)


class TestShiftedMatrixCheck:
    def test_sign_flip_holds_and_matches_the_hand_shift(self):
        verdict = cond_positive_matrix_check(SIGN_FLIP, 2)
        assert verdict.holds
        (G,) = assemble_gram(2.0 * shift_transform(SIGN_FLIP, "s2"))
        assert np.array_equal(G, np.array([[2.0, 0.0], [0.0, 0.0]]))

    def test_square_fails_and_matches_the_hand_shift(self):
        verdict = cond_positive_matrix_check(SIGN_FLIP_SQUARE, 2)
        assert not verdict.holds
        (G,) = assemble_gram(2.0 * shift_transform(SIGN_FLIP_SQUARE, "s2"))
        assert np.array_equal(G, np.array([[-2.0, 0.0], [0.0, 0.0]]))

    def test_positive_definite_kernels_pass_for_every_index(self):
        K = random_gram_kernel(GenConfig(seed=9, n=3, descriptor=AlgebraDescriptor([2])))
        for m in range(1, K.n + 1):
            assert cond_positive_matrix_check(K, m).holds

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            cond_positive_matrix_check(SIGN_FLIP, 0)
        with pytest.raises(ValueError):
            cond_positive_matrix_check(SIGN_FLIP, 3)

    @given(seed=seeds, n=sizes, desc=descriptors)
    def test_verdict_is_independent_of_the_index(self, seed, n, desc):
        K = mixed_kernel(seed, n, desc)
        expected = is_conditionally_positive_definite(K).holds
        for m in range(1, n + 1):
            assert cond_positive_matrix_check(K, m).holds == expected


class TestTwoByTwoCheck:
    def test_negative_coupling_is_conditionally_positive(self):
        desc = AlgebraDescriptor([1])
        zero = AlgebraElement.zero(desc)
        minus_one = single_block([[-1.0]])
        assert two_by_two_check(zero, minus_one, zero)

    def test_positive_coupling_is_not(self):
        desc = AlgebraDescriptor([1])
        zero = AlgebraElement.zero(desc)
        one = single_block([[1.0]])
        assert not two_by_two_check(zero, one, zero)

    def test_identity_diagonal_dominates_zero_coupling(self):
        desc = AlgebraDescriptor([2])
        eye = AlgebraElement.identity(desc)
        assert two_by_two_check(eye, AlgebraElement.zero(desc), eye)

    @given(seed=seeds, desc=descriptors)
    def test_agreement_with_the_compression_on_two_labels(self, seed, desc):
        K = mixed_kernel(seed, 2, desc)
        expected = is_conditionally_positive_definite(K).holds
        got = two_by_two_check(K.values[0][0], K.values[0][1], K.values[1][1])
        assert got == expected


class TestSchurProduct:
    def test_square_of_the_sign_flip_table_loses_conditional_positivity(self):
        square = schur_product(SIGN_FLIP, SIGN_FLIP)
        (G,) = assemble_gram(square)
        assert np.array_equal(G, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert is_conditionally_positive_definite(SIGN_FLIP).holds
        assert not is_conditionally_positive_definite(square).holds

    def test_product_with_zero_vanishes(self):
        zero = Kernel.zero(SIGN_FLIP.index_set, SIGN_FLIP.descriptor)
        assert kernel_norm(schur_product(SIGN_FLIP, zero)) == 0.0

    @given(seed=seeds)
    def test_products_of_commutative_pd_kernels_stay_pd(self, seed):
        # All summands have size one, so entries commute.
        desc = AlgebraDescriptor([1, 1])
        a = random_gram_kernel(GenConfig(seed=seed, n=3, descriptor=desc))
        b = random_gram_kernel(GenConfig(seed=seed + 1, n=3, descriptor=desc))
        assert is_positive_definite(schur_product(a, b)).holds

    def test_square_of_a_hermitian_kernel_stays_hermitian(self):
        # (K(s,t) K(s,t))* = K(s,t)* K(s,t)* = K(t,s) K(t,s) for any
        # hermitian K, so squaring never leaves the hermitian kernels.
        cfg = GenConfig(seed=2, n=3, descriptor=AlgebraDescriptor([2]))
        K = random_hermitian_kernel(cfg)
        assert schur_product(K, K).is_hermitian()

    def test_noncommuting_factors_can_leave_the_hermitian_cone(self):
        desc = AlgebraDescriptor([2])
        K1 = random_hermitian_kernel(GenConfig(seed=3, n=2, descriptor=desc))
        K2 = random_hermitian_kernel(GenConfig(seed=4, n=2, descriptor=desc))
        raw = schur_product(K1, K2)
        assert not raw.is_hermitian()
        with pytest.raises(NotHermitian):
            is_positive_definite(raw)


class TestCauchySchwarzChecks:
    def test_generated_cpd_kernels_pass_the_diagonal_bound(self):
        K = random_cpd_kernel(GenConfig(seed=31, n=4, descriptor=AlgebraDescriptor([2, 1])))
        assert cauchy_schwarz_cpd_check(K).holds

    def test_square_fixture_fails_the_diagonal_bound(self):
        verdict = cauchy_schwarz_cpd_check(SIGN_FLIP_SQUARE)
        assert not verdict.holds
        assert verdict.witness.eigenvalue == pytest.approx(-2.0)
        assert "pair" in verdict.context

    def test_zero_kernel_passes_both(self):
        K = Kernel.zero(IndexSet(["a", "b"]), AlgebraDescriptor([2]))
        assert cauchy_schwarz_cpd_check(K).holds
        assert cauchy_schwarz_pd_check(K).holds

    def test_generated_pd_kernels_pass_the_norm_bound(self):
        K = random_gram_kernel(GenConfig(seed=37, n=4, descriptor=AlgebraDescriptor([3])))
        assert cauchy_schwarz_pd_check(K).holds

    def test_indefinite_scalar_table_fails_the_norm_bound(self):
        verdict = cauchy_schwarz_pd_check(scalar_kernel([[1.0, 2.0], [2.0, 1.0]]))
        assert not verdict.holds
        # 4 is not below 1.
        assert verdict.witness.eigenvalue == pytest.approx(-3.0)

    def test_hermitian_non_cpd_kernels_can_still_fail_fast(self):
        K = random_non_cpd_kernel(GenConfig(seed=41, n=3, descriptor=AlgebraDescriptor([2])))
        assert not is_conditionally_positive_definite(K).holds


class TestKernelNorm:
    def test_largest_entry_norm(self):
        K = scalar_kernel([[1.0, -7.0], [-7.0, 2.0]])
        assert kernel_norm(K) == pytest.approx(7.0)

    def test_hermitian_generator_is_hermitian(self):
        K = random_hermitian_kernel(GenConfig(seed=13, n=4, descriptor=AlgebraDescriptor([2, 2])))
        assert K.is_hermitian()
