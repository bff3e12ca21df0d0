"""
Tests for complementability, Riccati witnesses, Schur complements and the B1 + B2 - B3 split.

Tests cover:
- Block decomposition with respect to S ⊕ S^perp
- Complementable, weakly complementable and quasi-complementable predicates
- Riccati witnesses in both directions
- Block positivity criterion
- Schur complement and compression
- Weak decomposition, closure extension of B E and the E = E+ + E- split
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from orcalc.domains.errors import NotBSymmetricError, NotWeaklyComplementableError
from orcalc.domains.numlin.models import HermitianOperator
from orcalc.domains.numlin.services import (
    is_psd,
    make_subspace,
    min_eigenvalue,
    orthogonal_complement,
    orthonormalize,
    relative_residual,
    same_subspace,
    subspace_sum,
)
from orcalc.domains.proj.services import make_projection
from orcalc.domains.ranges.services import range_included
from orcalc.domains.schur.decomposition import bsym_split, closure_extension, weak_decomposition
from orcalc.domains.schur.services import (
    block_decompose,
    complementability_margins,
    compression,
    image_of_s,
    is_complementable,
    is_quasi_complementable,
    is_weakly_complementable,
    positivity_blocks,
    riccati_witness,
    schur_complement,
)
from orcalc.domains.weights.services import b_symmetric_construct, grammian_split, is_b_symmetric

INDEFINITE = np.array([[1.0, 0.0, 1.0], [0.0, -1.0, 1.0], [1.0, 1.0, 0.0]])
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
ONES = np.ones((2, 2))
COUPLED = np.array([[2.0, 1.0], [1.0, 1.0]])


def axis(n: int, *indices: int):
    return make_subspace(np.eye(n)[:, list(indices)], n)


S_PLANE = axis(3, 0, 1)
S_LINE = axis(2, 0)


def singular_instance(instances, n: int, k: int):
    """B with a singular a block and a generic b block, so R(b) leaves R(a)."""
    q = instances.unitary(n)
    v = instances.unitary(k)
    a = (v * instances.spectrum(k, k - 1)) @ v.conj().T
    b = instances.matrix(k, n - k, min(k, n - k))
    block = np.block([[a, b], [b.conj().T, instances.hermitian(n - k)]])
    return HermitianOperator(entries=q @ block @ q.conj().T), make_subspace(q[:, :k], n)


# =============================================================================
# 1. BLOCKS AND PREDICATES
# =============================================================================

class TestBlockDecompose:
    """Test B = [[a, b], [b^H, c]]."""

    def test_diagonal(self):
        """Verify B = diag(1,2), S = span e1 gives a = 1, b = 0, c = 2."""
        blocks = block_decompose(np.diag([1.0, 2.0]), S_LINE)
        assert_allclose(blocks.a.entries, [[1.0]], atol=1e-12)
        assert_allclose(blocks.b, [[0.0]], atol=1e-12)
        assert_allclose(blocks.c.entries, [[2.0]], atol=1e-12)

    def test_coupled(self):
        """Verify B = [[2,1],[1,1]] gives a = 2, b = 1, c = 1."""
        blocks = block_decompose(COUPLED, S_LINE)
        assert_allclose(blocks.a.entries, [[2.0]], atol=1e-12)
        assert_allclose(blocks.b, [[1.0]], atol=1e-12)
        assert_allclose(blocks.c.entries, [[1.0]], atol=1e-12)

    def test_indefinite(self):
        """Verify the 3x3 example gives a = diag(1,-1), b = (1,1)^T, c = 0."""
        blocks = block_decompose(INDEFINITE, S_PLANE)
        assert_allclose(blocks.a.entries, np.diag([1.0, -1.0]), atol=1e-12)
        assert_allclose(blocks.b, [[1.0], [1.0]], atol=1e-12)
        assert_allclose(blocks.c.entries, [[0.0]], atol=1e-12)

    def test_reassembly(self, instances):
        """Verify the blocks reassemble B on random instances."""
        for _ in range(50):
            n, k = instances.size()
            weight = HermitianOperator(entries=instances.hermitian(n))
            blocks = block_decompose(weight, instances.subspace(n, k))
            assert relative_residual(blocks.reassemble(), weight.entries) <= 1e-9


class TestComplementability:
    """Test the three complementability predicates."""

    @pytest.mark.parametrize("matrix, expected", [(COUPLED, True), (SWAP, False), (ONES, True)])
    def test_complementable(self, matrix, expected):
        """Verify R(b) ⊆ R(a) on the 2x2 examples."""
        assert is_complementable(matrix, S_LINE) is expected

    def test_weak_scalar(self):
        """Verify B = [[1,1],[1,1]] has f = 1 and u = 1."""
        holds, witness = is_weakly_complementable(ONES, S_LINE)
        assert holds
        assert_allclose(witness.f, [[1.0]], atol=1e-12)
        assert_allclose(witness.u.entries, [[1.0]], atol=1e-12)

    def test_weak_fails(self):
        """Verify B = [[0,1],[1,0]] is not weakly complementable."""
        holds, witness = is_weakly_complementable(SWAP, S_LINE)
        assert not holds
        assert witness is None

    def test_weak_indefinite(self):
        """Verify the 3x3 example has f = (1,1)^T and u = diag(1,-1)."""
        holds, witness = is_weakly_complementable(INDEFINITE, S_PLANE)
        assert holds
        assert_allclose(witness.f, [[1.0], [1.0]], atol=1e-12)
        assert_allclose(witness.u.entries, np.diag([1.0, -1.0]), atol=1e-12)

    def test_quasi(self, instances):
        """Verify the quasi-complementability examples."""
        assert is_quasi_complementable(np.eye(4), instances.subspace(4, 2))
        assert not is_quasi_complementable(SWAP, S_LINE)
        assert is_quasi_complementable(ONES, S_LINE)

    def test_complementable_equals_weak(self, instances):
        """Verify complementable and weakly complementable coincide on random instances."""
        for _ in range(100):
            n, k = instances.size(3, 8)
            for weight, s in (instances.weakly_complementable(n, k), singular_instance(instances, n, k)):
                assert is_complementable(weight, s) == is_weakly_complementable(weight, s)[0]

    def test_singular_instances_fail(self, instances):
        """Verify a singular a with generic b fails both predicates."""
        for _ in range(20):
            n, k = instances.size(3, 8)
            weight, s = singular_instance(instances, n, k)
            assert not is_complementable(weight, s)
            with pytest.raises(NotWeaklyComplementableError):
                schur_complement(weight, s)

    def test_image_inside_sum_implies_both(self, instances):
        """Verify B S ⊆ S + (BS)^perp forces weak and quasi complementability."""
        for _ in range(50):
            n, k = instances.size(3, 7)
            weight, s = instances.weakly_complementable(n, k)
            image = image_of_s(weight, s)
            if not range_included(image.basis, subspace_sum(s, orthogonal_complement(image)).basis):
                continue
            assert is_weakly_complementable(weight, s)[0]
            assert is_quasi_complementable(weight, s)

    def test_margins(self):
        """Verify the margins of B = [[0,1],[1,0]] and of B = [[2,1],[1,1]]."""
        failing = complementability_margins(SWAP, S_LINE)
        assert failing.weak == pytest.approx(1.0)
        assert failing.quasi == pytest.approx(0.0, abs=1e-12)
        holding = complementability_margins(COUPLED, S_LINE)
        assert holding.complementable == pytest.approx(0.0, abs=1e-12)
        assert holding.quasi > 0.1


# =============================================================================
# 2. RICCATI WITNESS AND POSITIVITY
# =============================================================================

class TestRiccatiWitness:
    """Test the PSD solution of B P_S B = A P_S A."""

    def test_scalar(self):
        """Verify B = [[1,1],[1,1]] gives A = B."""
        assert_allclose(riccati_witness(ONES, S_LINE).entries, ONES, atol=1e-12)

    def test_indefinite(self):
        """Verify the 3x3 example gives A = [[1,0,1],[0,1,-1],[1,-1,2]]."""
        expected = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0], [1.0, -1.0, 2.0]])
        solution = riccati_witness(INDEFINITE, S_PLANE).entries
        assert_allclose(solution, expected, atol=1e-12)
        p_s = S_PLANE.projector_matrix()
        assert_allclose(INDEFINITE @ p_s @ INDEFINITE, expected, atol=1e-12)
        assert_allclose(solution @ p_s @ solution, expected, atol=1e-12)

    def test_zero_coupling(self):
        """Verify b = 0 gives A = [[|a|, 0], [0, 0]]."""
        assert_allclose(riccati_witness(np.diag([-2.0, 3.0]), S_LINE).entries, np.diag([2.0, 0.0]), atol=1e-12)

    def test_random_instances(self, instances):
        """Verify B P_S B = A P_S A and A >= 0 on random weakly complementable instances."""
        for _ in range(100):
            n, k = instances.size(3, 8)
            weight, s = instances.weakly_complementable(n, k)
            solution = riccati_witness(weight, s)
            p_s = s.projector_matrix()
            left = weight.entries @ p_s @ weight.entries
            assert relative_residual(left, solution.entries @ p_s @ solution.entries) <= 1e-8
            assert is_psd(solution)

    def test_converse(self, instances):
        """Verify every B solving B P_S B = A P_S A for a PSD A is weakly complementable."""
        for _ in range(200):
            n, k = instances.size(3, 8)
            q = instances.unitary(n)
            positive = instances.psd(n, int(instances.rng.integers(1, n + 1)))
            alpha, beta = positive[:k, :k], positive[:k, k:]
            w, v = np.linalg.eigh(alpha)
            u = (v * instances.rng.choice([-1.0, 1.0], k)) @ v.conj().T
            block = np.block([[alpha @ u, u @ beta], [(u @ beta).conj().T, instances.hermitian(n - k)]])
            block = (block + block.conj().T) / 2.0
            weight = HermitianOperator(entries=q @ block @ q.conj().T)
            s = make_subspace(q[:, :k], n)
            witness = q @ positive @ q.conj().T
            p_s = s.projector_matrix()
            assert relative_residual(weight.entries @ p_s @ weight.entries, witness @ p_s @ witness) <= 1e-8
            assert is_weakly_complementable(weight, s)[0]


class TestPositivityBlocks:
    """Test a >= 0, R(b) ⊆ R(a^{1/2}) and c - f^H f >= 0."""

    @pytest.mark.parametrize(
        "matrix, expected",
        [(ONES, True), (np.diag([1.0, -1.0]), False), (np.array([[1.0, 1.0], [1.0, 2.0]]), True)],
    )
    def test_examples(self, matrix, expected):
        """Verify the block positivity examples."""
        assert positivity_blocks(matrix, S_LINE) is expected

    def test_matches_spectrum(self, instances):
        """Verify the block criterion agrees with the smallest eigenvalue on random B."""
        for index in range(500):
            n, k = instances.size()
            if index % 2:
                matrix = instances.psd(n, int(instances.rng.integers(1, n + 1)))
            else:
                matrix = instances.hermitian(n)
            weight = HermitianOperator(entries=(matrix + matrix.conj().T) / 2.0)
            expected = min_eigenvalue(weight) >= -1e-9 * max(np.linalg.norm(matrix, 2), 1.0)
            assert positivity_blocks(weight, instances.subspace(n, k)) == expected


# =============================================================================
# 3. SCHUR COMPLEMENT AND COMPRESSION
# =============================================================================

class TestSchurComplement:
    """Test B_{/S} = [[0, 0], [0, c - f^H u f]] and B_S = B - B_{/S}."""

    @pytest.mark.parametrize(
        "matrix, s, expected",
        [
            (COUPLED, S_LINE, np.diag([0.0, 0.5])),
            (ONES, S_LINE, np.zeros((2, 2))),
            (INDEFINITE, S_PLANE, np.zeros((3, 3))),
        ],
    )
    def test_examples(self, matrix, s, expected):
        """Verify the hand-computed Schur complements."""
        assert_allclose(schur_complement(matrix, s).entries, expected, atol=1e-12)

    def test_indefinite_is_exactly_zero(self):
        """Verify rounding noise in the core is dropped against ||B||."""
        assert not np.any(schur_complement(INDEFINITE, S_PLANE).entries)

    def test_compression(self):
        """Verify B_S = B - B_{/S} for B = [[2,1],[1,1]]."""
        assert_allclose(compression(COUPLED, S_LINE).entries, np.array([[2.0, 1.0], [1.0, 0.5]]), atol=1e-12)

    def test_classical_formula(self, instances):
        """Verify the positive case equals diag(0, c - b^H a^+ b)."""
        for _ in range(500):
            n, k = instances.size(3, 8)
            weight, s = instances.positive_instance(n, k)
            blocks = block_decompose(weight, s)
            a, b, c = blocks.a.entries, blocks.b, blocks.c.entries
            core = c - b.conj().T @ np.linalg.pinv(a, rcond=1e-10, hermitian=True) @ b
            expected = blocks.Sperp.basis @ core @ blocks.Sperp.basis.conj().T
            assert relative_residual(schur_complement(weight, s).entries, expected) <= 1e-7

    def test_zero_sign_is_inert(self, instances):
        """Verify the sign given to N(a) does not change B_{/S}."""
        for _ in range(100):
            n, k = instances.size(3, 8)
            weight, s = instances.weakly_complementable(n, k)
            first = schur_complement(weight, s, zero_sign=1).entries
            second = schur_complement(weight, s, zero_sign=-1).entries
            assert relative_residual(first, second) <= 1e-9

    def test_range_inside_complement(self, instances):
        """Verify R(B_{/S}) ⊆ S^perp."""
        for _ in range(50):
            n, k = instances.size(3, 8)
            weight, s = instances.weakly_complementable(n, k)
            complement = schur_complement(weight, s).entries
            assert_allclose(complement @ s.basis, 0.0, atol=1e-9 * max(np.linalg.norm(complement), 1.0))


# =============================================================================
# 4. WEAK DECOMPOSITION AND B-SYMMETRIC SPLITS
# =============================================================================

class TestWeakDecomposition:
    """Test B = B1 + B2 - B3."""

    def test_indefinite(self):
        """Verify the 3x3 example splits into B2 - B3 with B1 = 0."""
        parts = weak_decomposition(INDEFINITE, S_PLANE)
        assert_allclose(parts.b2.entries, np.array([[1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0]]), atol=1e-12)
        assert_allclose(parts.b3.entries, np.array([[0.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, -1.0, 1.0]]), atol=1e-12)
        assert_allclose(parts.b1.entries, np.zeros((3, 3)), atol=1e-12)

    def test_positive(self, instances):
        """Verify a PSD B has B3 = 0, B1 = B_{/S} and B2 = B_S."""
        weight, s = instances.positive_instance(5, 2)
        parts = weak_decomposition(weight, s)
        assert_allclose(parts.b3.entries, np.zeros((5, 5)), atol=1e-10)
        assert relative_residual(parts.b1.entries, schur_complement(weight, s).entries) <= 1e-9
        assert relative_residual(parts.b2.entries, compression(weight, s).entries) <= 1e-9

    def test_block_diagonal(self):
        """Verify a = 0, b = 0 gives B1 = B and B2 = B3 = 0."""
        parts = weak_decomposition(np.diag([0.0, 5.0]), S_LINE)
        assert_allclose(parts.b1.entries, np.diag([0.0, 5.0]), atol=1e-12)
        assert_allclose(parts.b2.entries, np.zeros((2, 2)), atol=1e-12)
        assert_allclose(parts.b3.entries, np.zeros((2, 2)), atol=1e-12)

    def test_random_conditions(self, instances):
        """Verify positivity, the three kernel inclusions and B1 = B_{/S}."""
        for _ in range(300):
            n, k = instances.size(3, 8)
            weight, s = instances.weakly_complementable(n, k)
            parts = weak_decomposition(weight, s)
            split = grammian_split(weight, s)
            size = max(np.linalg.norm(weight.entries), 1.0)
            assert is_psd(parts.b2) and is_psd(parts.b3)
            assert np.linalg.norm(parts.b1.entries @ s.basis) <= 1e-8 * size
            assert np.linalg.norm(parts.b2.entries @ split.Sminus.basis) <= 1e-8 * size
            assert np.linalg.norm(parts.b3.entries @ split.Splus.basis) <= 1e-8 * size
            total = parts.b1.entries + parts.b2.entries - parts.b3.entries
            assert relative_residual(total, weight.entries) <= 1e-9
            assert relative_residual(parts.b1.entries, schur_complement(weight, s).entries) <= 1e-8


class TestClosureExtension:
    """Test B2^{1/2} P_{M2} B2^{1/2} - B3^{1/2} P_{M3} B3^{1/2}."""

    def test_positive_diagonal(self):
        """Verify a positive diagonal B with E = P_S reproduces B P_S."""
        weight = np.diag([2.0, 3.0, 1.0])
        projection = make_projection(S_PLANE, axis(3, 2))
        assert_allclose(closure_extension(projection, weight).entries, np.diag([2.0, 3.0, 0.0]), atol=1e-12)

    def test_indefinite(self):
        """Verify the 3x3 example with its B-symmetric projection gives B."""
        projection = b_symmetric_construct(INDEFINITE, S_PLANE)
        assert_allclose(projection.matrix(), np.array([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0], [0.0, 0.0, 0.0]]), atol=1e-12)
        assert_allclose(closure_extension(projection, INDEFINITE).entries, INDEFINITE, atol=1e-12)

    def test_zero_coupling(self):
        """Verify b = 0 gives [[a, 0], [0, 0]]."""
        projection = make_projection(S_PLANE, axis(3, 2))
        extension = closure_extension(projection, np.diag([1.0, -1.0, 4.0]))
        assert_allclose(extension.entries, np.diag([1.0, -1.0, 0.0]), atol=1e-12)

    def test_rejects_non_symmetric(self):
        """Verify an oblique projection with B = I raises NotBSymmetricError."""
        projection = make_projection(S_LINE, orthonormalize(np.array([[1.0], [1.0]])))
        with pytest.raises(NotBSymmetricError):
            closure_extension(projection, np.eye(2))

    def test_random_instances(self, instances):
        """Verify the extension equals B E and is Hermitian on random instances."""
        for _ in range(30):
            n, k = instances.size(3, 7)
            weight, s = instances.weakly_complementable(n, k)
            projection = b_symmetric_construct(weight, s)
            extension = closure_extension(projection, weight).entries
            assert relative_residual(extension, weight.entries @ projection.matrix()) <= 1e-7


class TestBsymSplit:
    """Test E = E+ + E- with E± = P_{S±} E."""

    def test_positive_weight(self):
        """Verify B = I and E = P_S give E+ = P_S and E- = 0."""
        plus, minus = bsym_split(make_projection(S_LINE, axis(2, 1)), np.eye(2), S_LINE)
        assert_allclose(plus.matrix(), np.diag([1.0, 0.0]), atol=1e-12)
        assert_allclose(minus.matrix(), np.zeros((2, 2)), atol=1e-12)

    def test_whole_space(self):
        """Verify B = diag(1,-1), S = C^2, E = I give E+ = diag(1,0) and E- = diag(0,1)."""
        whole = axis(2, 0, 1)
        projection = make_projection(whole, make_subspace(np.zeros((2, 0)), 2))
        plus, minus = bsym_split(projection, np.diag([1.0, -1.0]), whole)
        assert_allclose(plus.matrix(), np.diag([1.0, 0.0]), atol=1e-12)
        assert_allclose(minus.matrix(), np.diag([0.0, 1.0]), atol=1e-12)

    def test_indefinite(self):
        """Verify the 3x3 example splits along span e1 and span e2."""
        plus, minus = bsym_split(b_symmetric_construct(INDEFINITE, S_PLANE), INDEFINITE, S_PLANE)
        assert same_subspace(plus.range_sub, axis(3, 0))
        assert same_subspace(minus.range_sub, axis(3, 1))
        assert_allclose(plus.matrix() + minus.matrix(), np.array([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0], [0.0, 0.0, 0.0]]), atol=1e-12)

    def test_random_instances(self, instances):
        """Verify the parts annihilate each other and carry the B2 and B3 symmetries."""
        for _ in range(30):
            n, k = instances.size(3, 7)
            weight, s = instances.weakly_complementable(n, k)
            projection = b_symmetric_construct(weight, s)
            plus, minus = bsym_split(projection, weight, s)
            parts = weak_decomposition(weight, s)
            assert relative_residual(plus.matrix() + minus.matrix(), projection.matrix()) <= 1e-9
            assert_allclose(plus.matrix() @ minus.matrix(), 0.0, atol=1e-8 * max(np.linalg.norm(projection.matrix()) ** 2, 1.0))
            assert is_b_symmetric(plus, parts.b2)
            assert is_b_symmetric(minus, parts.b3)
