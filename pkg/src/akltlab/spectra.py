"""Closed-form entanglement spectra of the AKLT state and entanglement-
Hamiltonian coupling extraction.

Covers contiguous bipartitions of a periodic chain (finite and infinite),
non-contiguous bipartitions with two A-blocks and two B-blocks on a ring,
the half-infinite variant where one B-block is sent to infinity, and the
identification of the entanglement ground state with the ground state of a
four-site spin-1/2 Heisenberg ring.

All couplings are quoted in Pauli units: the entanglement Hamiltonian is
written eps0 + J sigma.sigma per bond, where sigma are Pauli matrices.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import mps
from .errors import CapacityError
from .mps import GAMMA
from .spin_ops import spin1_matrices

#: relative tolerance used to group analytically degenerate eigenvalues.
DEGENERACY_RTOL = 1e-9

#: chi extraction and Heisenberg-overlap capacity: the explicit ring has 4l sites.
MAX_CHI_BLOCK = 3


def _is_infinite(n):
    return n is None or n == math.inf


# ---------------------------------------------------------------------------
# contiguous bipartition


@dataclass(frozen=True)
class ContiguousSpectrum:
    """Four-level entanglement spectrum of a contiguous block of length l cut
    from a periodic chain of n sites (n may be math.inf)."""

    l: int
    n: float
    lambdas: tuple
    normalized: bool

    @property
    def lambda0(self):
        return self.lambdas[0]

    @property
    def lambda1(self):
        return self.lambdas[1]


def contiguous_lambdas(l, n, normalized=False):
    """The four RDM eigenvalues (lambda0, lambda1, lambda1, lambda1).

    lambda0 = (1+3 gamma^l)(1+3 gamma^(n-l))/4 and the triplet value has the
    (1-gamma) factors; normalization divides by 1 + 3 gamma^n.
    """
    if not _is_infinite(n):
        n = int(n)
        if l >= n:
            raise ValueError(f"block length {l} must be smaller than ring size {n}")
    if l < 1:
        raise ValueError(f"block length must be >= 1, got {l}")
    x = GAMMA**l
    y = 0.0 if _is_infinite(n) else GAMMA ** (n - l)
    lam0 = (1.0 + 3.0 * x) * (1.0 + 3.0 * y) / 4.0
    lam1 = (1.0 - x) * (1.0 - y) / 4.0
    if normalized:
        total = 1.0 if _is_infinite(n) else 1.0 + 3.0 * GAMMA**n
        lam0, lam1 = lam0 / total, lam1 / total
    return ContiguousSpectrum(
        l=l,
        n=math.inf if _is_infinite(n) else n,
        lambdas=(lam0, lam1, lam1, lam1),
        normalized=normalized,
    )


@dataclass(frozen=True)
class CouplingFit:
    """Entanglement-Hamiltonian parameters in Pauli units.

    j2 is None for the contiguous (single-bond) case.  residual is the
    maximum absolute mismatch of the log-spectrum; the contiguous inversion
    is exact so its residual is 0 by construction.  degenerate marks a fit
    against an all-equal spectrum (parameters fall back to a constant).
    """

    eps0: float
    j1: float
    j2: float | None
    residual: float
    degenerate: bool = False


def eh_couplings_contiguous(l, n):
    """Exact inversion of the normalized two-level contiguous spectrum:
    J = (ln lambda0 - ln lambda1)/4, eps0 = -(ln lambda0 + 3 ln lambda1)/4."""
    spec = contiguous_lambdas(l, n, normalized=True)
    l0, l1 = math.log(spec.lambdas[0]), math.log(spec.lambdas[1])
    return CouplingFit(
        eps0=-(l0 + 3.0 * l1) / 4.0,
        j1=(l0 - l1) / 4.0,
        j2=None,
        residual=0.0,
    )


# ---------------------------------------------------------------------------
# non-contiguous bipartition


@dataclass(frozen=True)
class NonContiguousSpectrum:
    """Sixteen-level spectrum of two A-blocks of length la cut from a ring,
    separated by B-blocks of length lb.

    lambdas is ordered by the index classes {1-5}, {6-8}, {9}, {10-12},
    {13-15}, {16}.  r and s are the quadratic intermediates of the finite
    case; zetas replaces them for the half-infinite variant.
    """

    la: int
    lb: int
    lambdas: tuple
    normalized: bool
    r: float | None = None
    s: float | None = None
    zetas: tuple | None = None

    def sorted_desc(self):
        return tuple(sorted(self.lambdas, reverse=True))

    def grouped(self):
        """Distinct values descending with multiplicities, degeneracies
        collapsed at relative tolerance DEGENERACY_RTOL."""
        groups = []
        for v in self.sorted_desc():
            if groups and abs(v - groups[-1][0]) <= DEGENERACY_RTOL * max(
                abs(v), abs(groups[-1][0])
            ):
                groups[-1][1] += 1
            else:
                groups.append([v, 1])
        return [(v, m) for v, m in groups]


def noncontiguous_lambdas(la, lb, normalized=False):
    """The sixteen eigenvalues for the finite ring of n = 2(la+lb) sites."""
    if la < 1 or lb < 1:
        raise ValueError("block lengths must be >= 1")
    x = GAMMA**la
    y = GAMMA**lb
    px, mx = 1.0 + 3.0 * x, 1.0 - x
    py, my = 1.0 + 3.0 * y, 1.0 - y
    c1 = mx * mx * my * my / 16.0
    c6 = px * mx * my * my / 16.0
    c10 = mx * mx * py * my / 16.0
    c13 = px * mx * py * my / 16.0
    r = (
        px * px * py * py
        + 3.0 * px * px * my * my
        + 3.0 * mx * mx * py * py
        + mx * mx * my * my
    ) / 64.0
    s = c13 * c13
    root = math.sqrt(r * r - 4.0 * s)
    lam9 = 0.5 * (r - root)
    lam16 = 0.5 * (r + root)
    lambdas = [c1] * 5 + [c6] * 3 + [lam9] + [c10] * 3 + [c13] * 3 + [lam16]
    if normalized:
        total = sum(lambdas)
        lambdas = [v / total for v in lambdas]
    return NonContiguousSpectrum(
        la=la, lb=lb, lambdas=tuple(lambdas), normalized=normalized, r=r, s=s
    )


def noncontiguous_lambdas_half_infinite(la, lb):
    """The sixteen eigenvalues when one B-block is infinite (lb is the
    remaining finite B-block).  The sum is exactly 1, so the spectrum is
    returned as normalized."""
    if la < 1 or lb < 1:
        raise ValueError("block lengths must be >= 1")
    x = GAMMA**la
    y = GAMMA**lb
    px, mx = 1.0 + 3.0 * x, 1.0 - x
    py, my = 1.0 + 3.0 * y, 1.0 - y
    z1 = (1.0 + x) * mx * (1.0 + y)
    z2 = px * mx**3 * py * my
    z3 = px * px + mx * mx * (1.0 + 2.0 * y)
    z4 = px * px * mx * mx * py * my
    c1 = mx * mx * my / 16.0
    c6 = px * mx * my / 16.0
    root1 = math.sqrt(z1 * z1 - z2)
    c9 = (z1 + root1) / 16.0
    c12 = (z1 - root1) / 16.0
    root2 = math.sqrt(z3 * z3 - 4.0 * z4)
    lam15 = (z3 + root2) / 32.0
    lam16 = (z3 - root2) / 32.0
    lambdas = [c1] * 5 + [c6] * 3 + [c9] * 3 + [c12] * 3 + [lam15, lam16]
    return NonContiguousSpectrum(
        la=la,
        lb=lb,
        lambdas=tuple(lambdas),
        normalized=True,
        zetas=(z1, z2, z3, z4),
    )


# ---------------------------------------------------------------------------
# four-spin alternating Heisenberg ring and coupling extraction

_PAULI = None


def _pauli():
    global _PAULI
    if _PAULI is None:
        ops = spin1_matrices()
        _PAULI = (ops.pauli_x, ops.pauli_y, ops.pauli_z)
    return _PAULI


def _ring_hamiltonian(eps0, j1, j2):
    """eps0 + j1 (s1.s2 + s3.s4) + j2 (s2.s3 + s4.s1) on four qubits, Pauli
    units; qubit 1 is the slowest index."""
    dim = 16
    h = eps0 * np.eye(dim, dtype=complex)

    def two_site(i, j, coupling):
        nonlocal h
        for p in _pauli():
            ops = [np.eye(2, dtype=complex)] * 4
            ops[i] = p
            ops[j] = p
            term = ops[0]
            for o in ops[1:]:
                term = np.kron(term, o)
            h = h + coupling * term

    two_site(0, 1, j1)
    two_site(2, 3, j1)
    two_site(1, 2, j2)
    two_site(3, 0, j2)
    return h

def heisenberg_ring_energies(eps0, j1, j2):
    """Sorted exact spectrum (16 values, ascending) of the alternating
    four-spin ring in Pauli units."""
    vals = np.linalg.eigvalsh(_ring_hamiltonian(eps0, j1, j2))
    return np.sort(vals.real)


def _fit_ring_couplings(target, x0_list):
    """Least-squares fit of sorted ring energies to the sorted target."""
    target = np.sort(np.asarray(target, dtype=float))

    def resid(p):
        return heisenberg_ring_energies(p[0], p[1], p[2]) - target

    best = None
    for x0 in x0_list:
        sol = least_squares(resid, x0=np.asarray(x0, dtype=float))
        err = float(np.max(np.abs(sol.fun)))
        if best is None or err < best[1]:
            best = (sol.x, err)
    params, err = best
    return float(params[0]), float(params[1]), float(params[2]), err


def eh_couplings_noncontiguous(la, lb):
    """Fit (eps0, J1, J2) to the normalized non-contiguous log-spectrum.

    Both spectra are sorted and matched level by level; the fit is least
    squares because the two-coupling ring is only the leading-order form of
    the entanglement Hamiltonian, and the residual is part of the result.
    """
    spec = noncontiguous_lambdas(la, lb, normalized=True)
    energies = -np.log(np.asarray(spec.lambdas))
    spread = float(np.max(energies) - np.min(energies))
    if spread < 1e-12:
        return CouplingFit(
            eps0=float(np.mean(energies)),
            j1=0.0,
            j2=0.0,
            residual=spread,
            degenerate=True,
        )
    center = float(np.mean(energies))
    j1g = GAMMA**la
    j2g = abs(GAMMA) ** lb
    starts = [
        (center, s1 * j1g, s2 * j2g) for s1 in (1.0, -1.0) for s2 in (1.0, -1.0)
    ]
    eps0, j1, j2, residual = _fit_ring_couplings(energies, starts)
    return CouplingFit(eps0=eps0, j1=j1, j2=j2, residual=residual)


# ---------------------------------------------------------------------------
# entanglement ground state: chi expansion and Heisenberg overlap

#: basis change from block labels (00,01,10,11) to combinations (+,-,01,10).
_T_COMBO = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, -1.0, 0.0, 0.0],
    ]
) / np.array([math.sqrt(2.0), math.sqrt(2.0), 1.0, 1.0])

#: formal tilde map: columns express the normalized combinations (+,-,01,10)
#: in the relabeled auxiliary product basis (t00, t01, t10, t11) read as
#: orthonormal qubit pairs.
_TILDE_FORMAL = np.array(
    [
        [0.0, 0.0, -1.0, 0.0],
        [1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0, 0.0],
        [-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)

#: slots of the chi expansion in the 16-dim combination product basis
#: (per-factor order +,-,01,10): chi1 on (+,+); chi2 on (-,-), (01,10), (10,01).
_CHI1_SLOT = 0
_CHI2_SLOTS = (5, 11, 14)


def heisenberg_reference_vector():
    """Ground state of the uniform four-site spin-1/2 Heisenberg ring as a
    16-vector over qubit labels, qubit 1 slowest."""
    ref = np.zeros(16)
    a = 1.0 / math.sqrt(3.0)
    b = -0.5 / math.sqrt(3.0)
    ref[0b0101] = a
    ref[0b1010] = a
    ref[0b0110] = b
    ref[0b1001] = b
    ref[0b0011] = b
    ref[0b1100] = b
    return ref


@dataclass(frozen=True)
class ChiReport:
    """Expansion of the entanglement ground state over the combination
    product basis, rescaled so chi1^2 + 3 chi2^2 = 1."""

    l: int
    chi1: float
    chi2: float
    ratio: float


def _chi_from_orthonormal_coeffs(c_ortho, combo_norms):
    """Raw-basis chi coefficients from orthonormal-basis ones.

    c_raw[i] = c_ortho[i] / ||combo_i||; null combinations contribute 0.
    Returns (chi1, chi2, spread) before rescaling, sign fixed by chi2 > 0.
    """
    norms = np.kron(combo_norms, combo_norms)
    c_raw = np.zeros(16)
    ok = norms > 1e-9
    c_raw[ok] = c_ortho[ok] / norms[ok]
    chi1 = c_raw[_CHI1_SLOT]
    chi2_vals = c_raw[list(_CHI2_SLOTS)]
    spread = float(np.max(chi2_vals) - np.min(chi2_vals))
    chi2 = float(np.mean(chi2_vals))
    if chi2 < 0.0:
        chi1, chi2 = -chi1, -chi2
    return float(chi1), chi2, spread


def _formal_overlap_sq(c_ortho):
    """Squared formal overlap with the Heisenberg reference after relabeling
    both factors in the tilde auxiliary basis."""
    f = np.kron(_TILDE_FORMAL, _TILDE_FORMAL) @ c_ortho
    return float(np.dot(f, heisenberg_reference_vector()) ** 2)


def _select_branch(eigenvalues, coeff_vectors):
    """Pick the eigenvector with maximal formal Heisenberg overlap.

    eigenvalues descending; coeff_vectors[k] are orthonormal-combination
    coefficients.  The global top of the spectrum is a quintet member for odd
    block lengths, so the singlet branch is identified by the overlap itself.
    """
    floor = 1e-13 * max(eigenvalues[0], 1.0)
    best = None
    for lam, c in zip(eigenvalues, coeff_vectors):
        if lam < floor:
            continue
        o2 = _formal_overlap_sq(c)
        if best is None or o2 > best[2] + 1e-12:
            best = (lam, c, o2)
    return best


def _combo_norms(l):
    """Norms of the raw combinations (+,-,01,10) at block length l."""
    x = GAMMA**l
    return np.sqrt(np.maximum([(1 + 3 * x) / 2] + [(1 - x) / 2] * 3, 0.0))


def _coefficient_rdm(la, lb):
    """Symmetrized non-contiguous RDM in the combination product basis.

    Returns (m, norms_a) where m is the 16x16 matrix G^(1/2) C G^(1/2), whose
    eigenvalues are the RDM eigenvalues of the unnormalized ring state and
    whose eigenvectors are orthonormal-combination coefficient vectors.
    """
    gb = mps.block_overlap_gram(lb).g
    c = np.empty((16, 16))
    labels = [(a, b, g, d) for a in (0, 1) for b in (0, 1) for g in (0, 1) for d in (0, 1)]
    for i, (a, b, g, d) in enumerate(labels):
        for j, (ap, bp, gp, dp) in enumerate(labels):
            c[i, j] = gb[2 * bp + gp, 2 * b + g] * gb[2 * dp + ap, 2 * d + a]
    t2 = np.kron(_T_COMBO, _T_COMBO)
    c_combo = t2.T @ c @ t2
    norms_a = _combo_norms(la)
    half = np.kron(norms_a, norms_a)
    m = c_combo * half[:, None] * half[None, :]
    return m, norms_a


def noncontiguous_rdm_gram(la, lb):
    """Unnormalized non-contiguous RDM eigenvalues (descending) computed from
    Gram matrices alone, without building the 3^n ring state."""
    m, _ = _coefficient_rdm(la, lb)
    vals = np.linalg.eigvalsh(m)[::-1]
    return np.maximum(vals, 0.0)


def _analysis_gram(l):
    """Branch-selected entanglement ground state for la = lb = l via Gram
    algebra: returns (lambda, c_ortho, norms, overlap_sq)."""
    m, norms = _coefficient_rdm(l, l)
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    lam, c, o2 = _select_branch(vals, [vecs[:, k] for k in range(16)])
    return lam, c, norms, o2


def _analysis_explicit(l):
    """Same analysis from the explicit ring state of 4l sites (oracle path)."""
    if l > MAX_CHI_BLOCK:
        raise CapacityError(
            f"explicit chi extraction capped at block length {MAX_CHI_BLOCK}, got {l}"
        )
    tensors = mps.aklt_tensors()
    psi = mps.periodic_state_vector(tensors, 4 * l)
    d = 3**l
    psi = psi.reshape(d, d, d, d)
    rho = np.einsum("abcd,ebfd->acef", psi, psi).reshape(d * d, d * d)
    vals, vecs = np.linalg.eigh(rho)
    order = np.argsort(vals)[::-1][:16]
    vals = vals[order]
    vecs = vecs[:, order]

    fam = mps.block_states(tensors, l)
    sqrt2 = math.sqrt(2.0)
    raw = [
        (fam.states[(0, 0)] + fam.states[(1, 1)]) / sqrt2,
        (fam.states[(0, 0)] - fam.states[(1, 1)]) / sqrt2,
        fam.states[(0, 1)],
        fam.states[(1, 0)],
    ]
    norms = _combo_norms(l)
    combos = [
        raw[i] / norms[i] if norms[i] > 1e-9 else np.zeros(d) for i in range(4)
    ]
    coeff_vectors = []
    for k in range(len(vals)):
        w = vecs[:, k].reshape(d, d)
        c = np.array([[bi @ w @ bj for bj in combos] for bi in combos]).ravel()
        coeff_vectors.append(c)
    lam, c, o2 = _select_branch(vals, coeff_vectors)
    return lam, c, norms, o2


def chi_ratio(l):
    """Chi expansion of the entanglement ground state at la = lb = l from the
    explicit ring state (capacity: l <= 3)."""
    _, c, norms, _ = _analysis_explicit(l)
    return _chi_report(l, c, norms)


def chi_ratio_gram(l):
    """Gram-algebra variant of chi_ratio, valid at any block length."""
    _, c, norms, _ = _analysis_gram(l)
    return _chi_report(l, c, norms)


def _chi_report(l, c_ortho, norms):
    chi1, chi2, _ = _chi_from_orthonormal_coeffs(c_ortho, norms)
    scale = math.sqrt(chi1 * chi1 + 3.0 * chi2 * chi2)
    chi1, chi2 = chi1 / scale + 0.0, chi2 / scale
    return ChiReport(l=l, chi1=chi1, chi2=chi2, ratio=chi1 / chi2 + 0.0)


def heisenberg_gs_overlap(l):
    """Squared formal overlap between the tilde-relabeled entanglement ground
    state and the four-site Heisenberg ring ground state (capacity: l <= 3)."""
    _, _, _, o2 = _analysis_explicit(l)
    return o2


def heisenberg_gs_overlap_gram(l):
    """Gram-algebra variant of heisenberg_gs_overlap, any block length."""
    _, _, _, o2 = _analysis_gram(l)
    return o2
