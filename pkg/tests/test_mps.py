"""Tests for the AKLT matrix product state machinery.

Block states and Gram matrices are cross-checked against explicit
contractions done with plain loops over physical index strings, so the
einsum-based production path is validated by an independent oracle.
"""

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from akltlab.errors import CapacityError
from akltlab.mps import (
    GAMMA,
    GRAM_ORDER,
    MAX_BLOCK_LENGTH,
    MAX_RING_SITES,
    aklt_tensors,
    auxiliary_basis_transform,
    block_overlap_gram,
    block_states,
    chain_products,
    periodic_state_vector,
    transfer_matrix,
)

# Transfer matrix of the AKLT tensors in the paired index p = 2a + a'.
E_EXPECTED = np.array(
    [
        [1 / 3, 0, 0, 2 / 3],
        [0, -1 / 3, 0, 0],
        [0, 0, -1 / 3, 0],
        [2 / 3, 0, 0, 1 / 3],
    ]
)


def chain_products_oracle(tensors, l):
    """Explicit per-string matrix products, site 1 slowest."""
    mats = [tensors.a0, tensors.a1, tensors.a2]
    out = np.empty((3**l, 2, 2))
    for idx, string in enumerate(itertools.product(range(3), repeat=l)):
        prod = np.eye(2)
        for m in string:
            prod = prod @ mats[m]
        out[idx] = prod
    return out


class TestAkltTensors:
    def test_canonical_sums_exact(self):
        """Right and left canonical sums equal the identity with zero residual."""
        t = aklt_tensors()
        mats = [t.a0, t.a1, t.a2]
        right = sum(a @ a.T for a in mats)
        left = sum(a.T @ a for a in mats)
        assert np.array_equal(right, np.eye(2))
        assert np.array_equal(left, np.eye(2))

    def test_bond_dimension(self):
        t = aklt_tensors()
        assert t.bond_dimension == 2
        assert t.stacked().shape == (3, 2, 2)


class TestTransferMatrix:
    def test_matches_kron_sum(self):
        t = aklt_tensors()
        e = sum(np.kron(a, a) for a in (t.a0, t.a1, t.a2))
        tm = transfer_matrix(t)
        assert_allclose(tm.e, e, atol=1e-15)
        assert_allclose(tm.e, E_EXPECTED, atol=1e-15)

    def test_eigensystem_exact(self):
        tm = transfer_matrix(aklt_tensors())
        assert tuple(tm.eigenvalues) == (1.0, GAMMA, GAMMA, GAMMA)
        for ev, r, lvec in zip(tm.eigenvalues, tm.right, tm.left):
            assert_allclose(tm.e @ r, ev * r, atol=1e-15)
            assert_allclose(lvec @ tm.e, ev * lvec, atol=1e-15)

    @pytest.mark.parametrize("l", [1, 2, 3, 5, 8])
    def test_power_matches_matrix_power(self, l):
        tm = transfer_matrix(aklt_tensors())
        assert_allclose(tm.power(l), np.linalg.matrix_power(tm.e, l), atol=1e-14)

    def test_power_trace_closed_form(self):
        """Tr E^N = 1 + 3 gamma^N, the squared norm of the N-site ring."""
        tm = transfer_matrix(aklt_tensors())
        for n in range(2, 12):
            assert_allclose(np.trace(tm.power(n)), 1.0 + 3.0 * GAMMA**n, atol=1e-15)


class TestChainProducts:
    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_matches_loop_oracle(self, l):
        t = aklt_tensors()
        assert_allclose(chain_products(t, l), chain_products_oracle(t, l), atol=1e-15)

    def test_explicit_contraction_caps(self):
        with pytest.raises(CapacityError):
            chain_products(aklt_tensors(), MAX_RING_SITES + 1)
        with pytest.raises(CapacityError):
            block_states(aklt_tensors(), MAX_BLOCK_LENGTH + 1)


class TestPeriodicState:
    @pytest.mark.parametrize("n", [3, 4, 6, 8])
    def test_norm_is_transfer_trace(self, n):
        psi = periodic_state_vector(aklt_tensors(), n)
        assert_allclose(np.dot(psi, psi), 1.0 + 3.0 * GAMMA**n, atol=1e-14)

    def test_components_are_traces(self):
        t = aklt_tensors()
        n = 3
        psi = periodic_state_vector(t, n)
        prods = chain_products_oracle(t, n)
        assert_allclose(psi, np.trace(prods, axis1=1, axis2=2), atol=1e-15)

    def test_ring_cap(self):
        with pytest.raises(CapacityError):
            periodic_state_vector(aklt_tensors(), MAX_RING_SITES + 1)


class TestBlockStates:
    def test_raw_norms_closed_form(self):
        """Norms of the +/-, 01, 10 combinations follow (1 +- ...)/2 laws."""
        t = aklt_tensors()
        for l in range(1, 7):
            fam = block_states(t, l)
            x = GAMMA**l
            assert_allclose(fam.raw_norms_sq["plus"], (1 + 3 * x) / 2, atol=1e-15)
            assert_allclose(fam.raw_norms_sq["minus"], (1 - x) / 2, atol=1e-15)
            assert_allclose(fam.raw_norms_sq["01"], (1 - x) / 2, atol=1e-15)
            assert_allclose(fam.raw_norms_sq["10"], (1 - x) / 2, atol=1e-15)

    def test_phi_plus_null_at_l1(self):
        """(1 + 3 gamma)/2 = 0 at l = 1: the symmetric combination vanishes."""
        fam = block_states(aklt_tensors(), 1)
        assert fam.phi_plus is None
        assert fam.phi_minus is not None

    def test_combinations_orthonormal(self):
        for l in (2, 3, 4):
            fam = block_states(aklt_tensors(), l)
            vecs = [fam.phi_plus, fam.phi_minus, fam.phi_01, fam.phi_10]
            g = np.array([[np.dot(u, v) for v in vecs] for u in vecs])
            assert_allclose(g, np.eye(4), atol=1e-13)

    def test_states_match_chain_products(self):
        """phi_{ab} components are the (a, b) entries of the chain products."""
        t = aklt_tensors()
        l = 3
        fam = block_states(t, l)
        prods = chain_products_oracle(t, l)
        for a, b in GRAM_ORDER:
            assert_allclose(fam.states[(a, b)], prods[:, a, b], atol=1e-15)


class TestGramMatrix:
    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_matches_explicit_overlaps(self, l):
        """Transfer-matrix Gram equals brute-force state overlaps."""
        fam = block_states(aklt_tensors(), l)
        gram = block_overlap_gram(l)
        for i, (a, b) in enumerate(GRAM_ORDER):
            for j, (ap, bp) in enumerate(GRAM_ORDER):
                brute = np.dot(fam.states[(a, b)], fam.states[(ap, bp)])
                assert_allclose(gram.g[i, j], brute, atol=1e-14)

    def test_symmetry(self):
        for l in (1, 2, 5):
            g = block_overlap_gram(l).g
            assert_allclose(g, g.T, atol=1e-16)


class TestAuxiliaryTransform:
    def test_tilde_relabels_beta(self):
        """phi~_{a0} = -phi_{a1} and phi~_{a1} = +phi_{a0}."""
        fam = block_states(aklt_tensors(), 2)
        tilde = auxiliary_basis_transform(fam)
        for a in (0, 1):
            assert_allclose(tilde.states[(a, 0)], -fam.states[(a, 1)], atol=1e-16)
            assert_allclose(tilde.states[(a, 1)], fam.states[(a, 0)], atol=1e-16)

    def test_twice_is_minus_identity(self):
        fam = block_states(aklt_tensors(), 2)
        twice = auxiliary_basis_transform(auxiliary_basis_transform(fam))
        for key, vec in fam.states.items():
            assert_allclose(twice.states[key], -vec, atol=1e-16)

    def test_singlet_combination_maps_to_plus(self):
        """The tilde + slot holds the singlet form of the original states."""
        fam = block_states(aklt_tensors(), 3)
        tilde = auxiliary_basis_transform(fam)
        raw = (fam.states[(1, 0)] - fam.states[(0, 1)]) / math.sqrt(2)
        expected = raw / np.linalg.norm(raw)
        overlap = abs(np.dot(tilde.phi_plus, expected))
        assert_allclose(overlap, 1.0, atol=1e-13)
