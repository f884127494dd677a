"""Tests for the closed-form entanglement spectra and coupling extraction.

Brute-force oracles contract the periodic AKLT state explicitly and
diagonalize reduced density matrices with numpy, independently of the
formula code under test.  Frozen constants below were produced by those
oracles; each is annotated with its recomputation recipe.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from akltlab.errors import CapacityError
from akltlab.mps import GAMMA, aklt_tensors, periodic_state_vector
from akltlab.spectra import (
    ChiReport,
    chi_ratio,
    chi_ratio_gram,
    contiguous_lambdas,
    eh_couplings_contiguous,
    eh_couplings_noncontiguous,
    heisenberg_gs_overlap,
    heisenberg_gs_overlap_gram,
    heisenberg_reference_vector,
    heisenberg_ring_energies,
    noncontiguous_lambdas,
    noncontiguous_lambdas_half_infinite,
    noncontiguous_rdm_gram,
)

# Index classes of the sixteen-value spectrum, 0-based, in formula order.
CLASSES = [range(0, 5), range(5, 8), range(8, 9), range(9, 12), range(12, 15), range(15, 16)]


def rdm_eigenvalues(psi, kept_sites, n):
    """Eigenvalues of the reduced density matrix over kept_sites (1-based)."""
    psi = np.asarray(psi, dtype=float)
    kept = [s - 1 for s in kept_sites]
    traced = [s for s in range(n) if s not in kept]
    tensor = psi.reshape((3,) * n).transpose(kept + traced)
    m = tensor.reshape(3 ** len(kept), -1)
    rho = m @ m.T
    rho /= np.trace(rho)
    return np.sort(np.linalg.eigvalsh(rho))[::-1]


def noncontiguous_brute(la, lb):
    """Spectrum of two length-la blocks separated by length-lb segments."""
    n = 2 * (la + lb)
    psi = periodic_state_vector(aklt_tensors(), n)
    kept = list(range(1, la + 1)) + list(range(la + lb + 1, 2 * la + lb + 1))
    vals = rdm_eigenvalues(psi, kept, n)
    out = np.zeros(16)
    out[: min(16, vals.size)] = np.clip(vals[:16], 0.0, None)
    return out


class TestContiguousSpectrum:
    def test_formula_values(self):
        s = contiguous_lambdas(2, 8)
        x, y = GAMMA**2, GAMMA**6
        assert_allclose(s.lambda0, (1 + 3 * x) * (1 + 3 * y) / 4, atol=1e-16)
        assert_allclose(s.lambda1, (1 - x) * (1 - y) / 4, atol=1e-16)
        assert s.lambdas == (s.lambda0, s.lambda1, s.lambda1, s.lambda1)

    def test_normalized_example(self):
        """Frozen: contiguous_lambdas(2, 8, normalized=True)."""
        s = contiguous_lambdas(2, 8, normalized=True)
        assert_allclose(s.lambda0, 0.33455210237659966, atol=1e-15)
        assert_allclose(s.lambda1, 0.2218159658744668, atol=1e-15)
        assert_allclose(sum(s.lambdas), 1.0, atol=1e-15)

    @pytest.mark.parametrize("n", [4, 6, 8, 10])
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_subsystem_exchange_invariance(self, l, n):
        """Normalized spectrum is invariant under l <-> n - l."""
        if l >= n:
            pytest.skip("needs l < n")
        a = contiguous_lambdas(l, n, normalized=True)
        b = contiguous_lambdas(n - l, n, normalized=True)
        assert_allclose(a.lambdas, b.lambdas, atol=1e-15)

    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_brute_force_oracle_n6(self, l):
        """Analytic values equal RDM eigenvalues of the explicit N=6 ring."""
        psi = periodic_state_vector(aklt_tensors(), 6)
        brute = rdm_eigenvalues(psi, range(1, l + 1), 6)
        padded = np.zeros(max(4, brute.size))
        padded[: brute.size] = np.clip(brute, 0.0, None)
        s = contiguous_lambdas(l, 6, normalized=True)
        assert_allclose(padded[:4], sorted(s.lambdas, reverse=True), atol=1e-12)
        assert np.max(padded[4:]) < 1e-14 if padded.size > 4 else True

    def test_half_infinite_limit(self):
        """For n = inf the n-dependent factor drops out."""
        s = contiguous_lambdas(2, None)
        assert_allclose(s.lambda0, (1 + 3 * GAMMA**2) / 4, atol=1e-16)
        assert_allclose(s.lambda1, (1 - GAMMA**2) / 4, atol=1e-16)
        assert contiguous_lambdas(2, math.inf).lambdas == s.lambdas

    def test_rejects_bad_lengths(self):
        with pytest.raises(ValueError):
            contiguous_lambdas(4, 4)
        with pytest.raises(ValueError):
            contiguous_lambdas(0, 4)


class TestContiguousCouplings:
    def test_inversion_is_exact(self):
        for l, n in [(2, 6), (2, 8), (3, None), (8, None)]:
            fit = eh_couplings_contiguous(l, n)
            assert fit.residual == 0.0
            assert fit.j2 is None

    def test_null_level_rejected(self):
        """At l = 1 the top eigenvalue vanishes, so no finite coupling exists."""
        with pytest.raises(ValueError):
            eh_couplings_contiguous(1, 6)

    def test_frozen_half_infinite_values(self):
        """Frozen: eh_couplings_contiguous(2, None); j1 = ln(3/2)/4 exactly."""
        fit = eh_couplings_contiguous(2, None)
        assert_allclose(fit.eps0, 1.402711119749233, atol=1e-14)
        assert_allclose(fit.j1, math.log(1.5) / 4, atol=1e-15)

    def test_large_block_limits(self):
        """eps0 -> 2 ln 2 and j1 -> gamma^l as the block grows."""
        fit = eh_couplings_contiguous(8, None)
        assert abs(fit.eps0 - 2 * math.log(2)) < 5e-8
        assert abs(fit.j1 - GAMMA**8) / abs(GAMMA**8) < 0.05


class TestNonContiguousSpectrum:
    @pytest.mark.parametrize("la,lb", [(1, 1), (2, 2), (1, 3), (2, 4), (3, 2)])
    def test_sum_rule(self, la, lb):
        """Unnormalized sum equals 1 + 3 gamma^N with N = 2(la + lb)."""
        s = noncontiguous_lambdas(la, lb)
        assert_allclose(sum(s.lambdas), 1 + 3 * GAMMA ** (2 * (la + lb)), atol=1e-14)
        assert_allclose(sum(noncontiguous_lambdas(la, lb, normalized=True).lambdas), 1.0, atol=1e-14)

    @pytest.mark.parametrize("la,lb", [(1, 1), (2, 2), (1, 3), (2, 4)])
    def test_class_blocks_internally_degenerate(self, la, lb):
        s = noncontiguous_lambdas(la, lb)
        sizes = []
        for cls in CLASSES:
            vals = [s.lambdas[i] for i in cls]
            assert max(vals) - min(vals) < 1e-16
            sizes.append(len(vals))
        assert sizes == [5, 3, 1, 3, 3, 1]

    def test_frozen_22_values(self):
        """Frozen: unnormalized (2,2) classes; lambda_16 and two exact rationals."""
        s = noncontiguous_lambdas(2, 2)
        assert_allclose(s.lambdas[15], 0.13277747499506556, atol=1e-15)
        assert_allclose(s.lambdas[12], 64.0 / 729.0, atol=1e-15)  # class {13-15}
        assert_allclose(s.lambdas[0], 256.0 / 6561.0, atol=1e-15)  # class {1-5}

    @pytest.mark.parametrize("la,lb", [(1, 1), (1, 3)])
    def test_brute_force_oracle_small_rings(self, la, lb):
        """Formula equals explicit ring RDM eigenvalues (larger rings are
        covered by the acceptance suite)."""
        ana = np.sort(noncontiguous_lambdas(la, lb, normalized=True).lambdas)[::-1]
        assert_allclose(noncontiguous_brute(la, lb), ana, atol=1e-12)

    def test_factorized_limit(self):
        """Far-separated blocks: spectrum becomes products of two independent
        contiguous pairs {1/9, 2/27 x6, 4/81 x9}."""
        s = noncontiguous_lambdas(2, 14, normalized=True)
        grouped = sorted(s.lambdas, reverse=True)
        assert_allclose(grouped[0], 1.0 / 9.0, atol=1e-5)
        assert_allclose(grouped[1:7], [2.0 / 27.0] * 6, atol=1e-5)
        assert_allclose(grouped[7:], [4.0 / 81.0] * 9, atol=1e-5)

    def test_maximally_mixed_limit(self):
        s = noncontiguous_lambdas(12, 12, normalized=True)
        assert np.max(np.abs(np.array(s.lambdas) - 1.0 / 16.0)) < 1e-6

    def test_grouped_merges_collisions(self):
        """At (2,2) two classes collide; grouped() reports the merged count."""
        groups = noncontiguous_lambdas(2, 2, normalized=True).grouped()
        counts = [c for _, c in groups]
        assert counts == [1, 3, 6, 1, 5]

    def test_gram_rdm_matches_formula(self):
        """The Gram-algebra RDM route reproduces the unnormalized formula."""
        for la, lb in [(1, 2), (2, 2), (2, 3)]:
            vals = np.sort(noncontiguous_rdm_gram(la, lb))[::-1]
            ana = np.sort(noncontiguous_lambdas(la, lb).lambdas)[::-1]
            assert_allclose(vals, ana, atol=1e-13)


class TestHalfInfiniteSpectrum:
    @pytest.mark.parametrize("la,lb", [(1, 1), (2, 2), (3, 5), (4, 2)])
    def test_sum_is_one(self, la, lb):
        s = noncontiguous_lambdas_half_infinite(la, lb)
        assert s.normalized
        assert_allclose(sum(s.lambdas), 1.0, atol=1e-14)

    def test_matches_ring_formula_at_large_separation(self):
        """With both separations large the ring and half-infinite forms agree."""
        ring = np.sort(noncontiguous_lambdas(2, 20, normalized=True).lambdas)
        half = np.sort(noncontiguous_lambdas_half_infinite(2, 20).lambdas)
        assert_allclose(half, ring, atol=1e-8)

    def test_large_block_limit(self):
        s = noncontiguous_lambdas_half_infinite(14, 14)
        assert np.max(np.abs(np.array(s.lambdas) - 1.0 / 16.0)) < 1e-6

    def test_class_structure(self):
        """The zeta-form classes are {1-5},{6-8},{9-11},{12-14},{15},{16}."""
        s = noncontiguous_lambdas_half_infinite(2, 3)
        hi_classes = [range(0, 5), range(5, 8), range(8, 11), range(11, 14), range(14, 15), range(15, 16)]
        for cls in hi_classes:
            vals = [s.lambdas[i] for i in cls]
            assert max(vals) - min(vals) < 1e-16


class TestRingEnergies:
    def test_constant_shift(self):
        """With J1 = J2 = 0 every level sits at eps0."""
        energies = heisenberg_ring_energies(0.7, 0.0, 0.0)
        assert_allclose(energies, [0.7] * 16, atol=1e-15)

    def test_uniform_ring_ground_state(self):
        """The uniform 4-site Pauli ring has ground energy -8."""
        energies = heisenberg_ring_energies(0.0, 1.0, 1.0)
        assert_allclose(energies[0], -8.0, atol=1e-12)
        assert np.all(np.diff(energies) >= -1e-12)

    def test_alternating_limit(self):
        """J2 = 0 decouples the ring into two independent Pauli dimers."""
        energies = heisenberg_ring_energies(0.0, 1.0, 0.0)
        dimer = np.array([-3.0, 1.0, 1.0, 1.0])
        expected = np.sort(np.add.outer(dimer, dimer).ravel())
        assert_allclose(energies, expected, atol=1e-12)


class TestNonContiguousCouplings:
    def test_factorized_limit_couplings(self):
        """Frozen: (2, 12) fit; j1 -> ln(3/2)/4, j2 -> 0, tiny residual."""
        fit = eh_couplings_noncontiguous(2, 12)
        assert abs(fit.j1 - math.log(1.5) / 4) < 1e-6
        assert abs(fit.j2) < 1e-4
        assert fit.residual < 1e-8
        assert not fit.degenerate

    def test_translation_invariant_ring(self):
        """Equal even blocks give a translation-invariant ring: j1 = j2."""
        fit = eh_couplings_noncontiguous(4, 4)
        assert abs(fit.j1 - fit.j2) < 1e-4

    def test_large_block_asymptote(self):
        fit = eh_couplings_noncontiguous(8, 8)
        assert abs(fit.eps0 - 4 * math.log(2)) < 1e-6
        assert abs(fit.j1) < 1e-3 and abs(fit.j2) < 1e-3

    def test_degenerate_spectrum_flagged(self):
        fit = eh_couplings_noncontiguous(40, 40)
        assert fit.degenerate
        assert fit.j1 == 0.0
        assert_allclose(fit.eps0, 4 * math.log(2), atol=1e-12)


class TestChiExtraction:
    # Frozen: chi_ratio_gram(l) for the measured chi_1/chi_2 sequence.
    FROZEN_RATIOS = {
        1: 0.0,
        2: 2.0841834080145847,
        3: 3.520864243119317,
        4: 2.858843790417058,
        5: 3.050208336890834,
        6: 2.9836289528323525,
        8: 2.9981721249453512,
        10: 2.999796792726499,
    }

    @pytest.mark.parametrize("l", sorted(FROZEN_RATIOS))
    def test_frozen_ratios(self, l):
        report = chi_ratio_gram(l)
        assert isinstance(report, ChiReport)
        assert_allclose(report.ratio, self.FROZEN_RATIOS[l], atol=1e-12)

    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_explicit_path_matches_gram(self, l):
        """The 4l-site ring diagonalization agrees with the Gram route."""
        a, b = chi_ratio(l), chi_ratio_gram(l)
        assert_allclose(a.chi1, b.chi1, atol=1e-12)
        assert_allclose(a.chi2, b.chi2, atol=1e-12)

    def test_explicit_path_capacity(self):
        with pytest.raises(CapacityError):
            chi_ratio(4)

    @pytest.mark.parametrize("l", [2, 3, 4, 6])
    def test_normalization(self, l):
        """chi_1^2 + 3 chi_2^2 = 1 (one + slot, three equivalent x slots)."""
        r = chi_ratio_gram(l)
        assert_allclose(r.chi1**2 + 3 * r.chi2**2, 1.0, atol=1e-12)

    def test_ratio_converges_to_three(self):
        ratios = [chi_ratio_gram(l).ratio for l in (4, 6, 8, 10, 12)]
        devs = [abs(r - 3.0) for r in ratios]
        assert devs == sorted(devs, reverse=True)
        assert devs[-1] < 1e-4


class TestHeisenbergOverlap:
    def test_reference_vector(self):
        """Four-site spin-1/2 Heisenberg ring ground state, S^z = 0 sector."""
        ref = heisenberg_reference_vector()
        assert_allclose(np.linalg.norm(ref), 1.0, atol=1e-15)
        assert_allclose(ref[0b0101], 1 / math.sqrt(3), atol=1e-15)
        assert_allclose(ref[0b0011], -1 / (2 * math.sqrt(3)), atol=1e-15)
        assert ref[0b0000] == 0.0

    def test_frozen_overlaps(self):
        """Frozen: heisenberg_gs_overlap_gram(l) for l = 1, 2, 3."""
        assert_allclose(heisenberg_gs_overlap_gram(1), 0.25, atol=1e-12)
        assert_allclose(heisenberg_gs_overlap_gram(2), 0.999687922574402, atol=1e-10)
        assert_allclose(heisenberg_gs_overlap_gram(3), 0.9999933962160316, atol=1e-10)

    @pytest.mark.parametrize("l", [2, 3])
    def test_explicit_matches_gram(self, l):
        assert_allclose(heisenberg_gs_overlap(l), heisenberg_gs_overlap_gram(l), atol=1e-12)
