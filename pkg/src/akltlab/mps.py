"""AKLT matrix-product machinery.

Site tensors, transfer matrix with exact eigendata, explicit state vectors,
boundary-block states, their Gram algebra, and the auxiliary-basis (tilde)
transformation.

Conventions:

* auxiliary index order: alpha is the row (left) index and beta the column
  (right) index of the matrix chain, so block states are labeled (alpha, beta);
* auxiliary basis ordered so that A_2 = -sqrt(2/3) sigma^- has its single
  entry at (0, 1); then the length-1 block state phi_01 is proportional to
  |m=-1> and phi_10 to |m=+1>;
* transfer-matrix pair index p = 2a + a' for the pair |a a'>;
* normalized basis vectors carry the phase convention "first nonzero
  component positive"; raw block states keep their natural signs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

#: subleading transfer-matrix eigenvalue of the AKLT state.
GAMMA = -1.0 / 3.0

#: block states are capped at 3^9 amplitudes.
MAX_BLOCK_LENGTH = 9

#: explicit periodic state vectors are capped at 3^14 amplitudes.
MAX_RING_SITES = 14


@dataclass(frozen=True)
class SiteTensors:
    """The bond-dimension-2 AKLT site matrices A_0, A_1, A_2."""

    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    bond_dimension: int = 2

    def stacked(self):
        """The (3, 2, 2) stack A[k] = A_k."""
        return np.stack([self.a0, self.a1, self.a2])


def aklt_tensors():
    """Return the AKLT site tensors (entries are +-sqrt(2/3), +-sqrt(1/3))."""
    r23 = math.sqrt(2.0 / 3.0)
    r13 = math.sqrt(1.0 / 3.0)
    a0 = np.array([[0.0, 0.0], [r23, 0.0]])  # sqrt(2/3) sigma^+
    a1 = np.array([[r13, 0.0], [0.0, -r13]])  # -sqrt(1/3) sigma^z
    a2 = np.array([[0.0, -r23], [0.0, 0.0]])  # -sqrt(2/3) sigma^-
    return SiteTensors(a0=a0, a1=a1, a2=a2)


@dataclass(frozen=True)
class TransferMatrix:
    """Transfer matrix E = sum_k A_k (x) A_k* with its exact eigendata.

    right[i] and left[i] are the right/left eigenvectors R_i, L_i as
    4-vectors in the pair basis, normalized so <L_i|R_j> = delta_ij.
    """

    e: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    def power(self, l):
        """E^l from the spectral decomposition (exact eigenprojectors)."""
        powers = self.eigenvalues**l
        return (self.right.T * powers) @ self.left

    def power_entry(self, pair_row, pair_col, l):
        """Single entry of E^l, pairs given as (a, a') tuples."""
        r = 2 * pair_row[0] + pair_row[1]
        c = 2 * pair_col[0] + pair_col[1]
        return float(self.power(l)[r, c])


def transfer_matrix(tensors):
    """Build E and its exact eigendecomposition for the AKLT tensors."""
    stack = tensors.stacked()
    e = np.einsum("kab,kcd->acbd", stack, stack).reshape(4, 4)
    s = 1.0 / math.sqrt(2.0)
    right = np.array(
        [
            [s, 0.0, 0.0, s],  # R_0 = (|00> + |11>)/sqrt(2), eigenvalue 1
            [s, 0.0, 0.0, -s],  # R_1 = (|00> - |11>)/sqrt(2), eigenvalue gamma
            [0.0, 1.0, 0.0, 0.0],  # R_2 = |01>
            [0.0, 0.0, 1.0, 0.0],  # R_3 = |10>
        ]
    )
    eigenvalues = np.array([1.0, GAMMA, GAMMA, GAMMA])
    return TransferMatrix(e=e, eigenvalues=eigenvalues, right=right, left=right.copy())


def chain_products(tensors, l):
    """All length-l matrix products: array M[x, a, b] = <a|A_{i_1}..A_{i_l}|b>
    with x the base-3 encoding of (i_1..i_l), site 1 slowest."""
    if l > MAX_RING_SITES:
        raise CapacityError(f"chain products capped at {MAX_RING_SITES} sites, got {l}")
    stack = tensors.stacked()
    m = stack.copy()
    for _ in range(l - 1):
        m = np.einsum("xab,ibc->xiac", m, stack).reshape(-1, 2, 2)
    return m


def periodic_state_vector(tensors, n):
    """Unnormalized periodic AKLT state: component = Tr(A_{i_1} .. A_{i_n})."""
    if n > MAX_RING_SITES:
        raise CapacityError(
            f"periodic state vectors capped at {MAX_RING_SITES} sites, got {n}"
        )
    m = chain_products(tensors, n)
    return m[:, 0, 0] + m[:, 1, 1]


def _sign_fixed(vec):
    """Flip sign so the first nonzero component is positive."""
    nz = np.nonzero(np.abs(vec) > 1e-12)[0]
    if nz.size and vec[nz[0]] < 0:
        return -vec
    return vec


@dataclass(frozen=True)
class BlockStateFamily:
    """Raw block states |phi^l_{alpha beta}> and the orthonormalized set.

    states maps (alpha, beta) to the raw 3^l vector.  phi_plus/phi_minus are
    the normalized (phi_00 +- phi_11)/sqrt(2); phi_01/phi_10 normalize the
    corresponding raw states.  A member is None when the raw combination is
    null (phi_plus at l=1).  raw_norms_sq holds the squared norms of the raw
    combinations keyed 'plus', 'minus', '01', '10'.
    """

    l: int
    states: dict = field(repr=False)
    phi_plus: np.ndarray | None = field(repr=False, default=None)
    phi_minus: np.ndarray | None = field(repr=False, default=None)
    phi_01: np.ndarray | None = field(repr=False, default=None)
    phi_10: np.ndarray | None = field(repr=False, default=None)
    raw_norms_sq: dict | None = None

    def orthonormal(self):
        """The available orthonormal members in order (+, -, 01, 10)."""
        return {
            "plus": self.phi_plus,
            "minus": self.phi_minus,
            "01": self.phi_01,
            "10": self.phi_10,
        }


def _family_from_states(l, states):
    sqrt2 = math.sqrt(2.0)
    raw = {
        "plus": (states[(0, 0)] + states[(1, 1)]) / sqrt2,
        "minus": (states[(0, 0)] - states[(1, 1)]) / sqrt2,
        "01": states[(0, 1)],
        "10": states[(1, 0)],
    }
    norms_sq = {key: float(np.dot(v, v)) for key, v in raw.items()}
    unit = {
        key: _sign_fixed(v / math.sqrt(norms_sq[key])) if norms_sq[key] > 1e-12 else None
        for key, v in raw.items()
    }
    return BlockStateFamily(
        l=l,
        states=states,
        phi_plus=unit["plus"],
        phi_minus=unit["minus"],
        phi_01=unit["01"],
        phi_10=unit["10"],
        raw_norms_sq=norms_sq,
    )


def block_states(tensors, l):
    """Raw and orthonormalized boundary-block states of length l."""
    if l > MAX_BLOCK_LENGTH:
        raise CapacityError(f"block states capped at {MAX_BLOCK_LENGTH} sites, got {l}")
    m = chain_products(tensors, l)
    states = {(a, b): np.ascontiguousarray(m[:, a, b]) for a in (0, 1) for b in (0, 1)}
    return _family_from_states(l, states)


@dataclass(frozen=True)
class GramMatrix:
    """Overlap matrix <phi_{alpha beta}|phi_{alpha' beta'}>, rows and columns
    ordered (00, 01, 10, 11)."""

    l: int
    g: np.ndarray


#: (alpha, beta) labels in Gram order.
GRAM_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


def block_overlap_gram(l):
    """Analytic Gram matrix from transfer-matrix powers (no 3^l storage).

    <phi_{ab}|phi_{a'b'}> = <a'a|E^l|b'b> with the pair convention of
    TransferMatrix.
    """
    e = transfer_matrix(aklt_tensors())
    el = e.power(l)
    g = np.empty((4, 4))
    for i, (a, b) in enumerate(GRAM_ORDER):
        for j, (ap, bp) in enumerate(GRAM_ORDER):
            g[i, j] = el[2 * ap + a, 2 * bp + b]
    return GramMatrix(l=l, g=g)


def auxiliary_basis_transform(family):
    """Relabel a block family in the tilde auxiliary basis.

    The column (beta) index is transformed by |beta~> = exp(i pi (1-beta))
    |1-beta|>, so phi~_{a,0} = -phi_{a,1} and phi~_{a,1} = +phi_{a,0}.  In the
    new labels: phi_+ = (phi~_01 - phi~_10)/sqrt(2) (a singlet form),
    phi_- = (phi~_01 + phi~_10)/sqrt(2), phi_01 = -phi~_00, phi_10 = phi~_11.
    Applying the transform twice returns the family up to a global sign.
    """
    states = family.states
    tilde = {
        (a, b): (-states[(a, 1)] if b == 0 else states[(a, 0)]) for a in (0, 1) for b in (0, 1)
    }
    return _family_from_states(family.l, tilde)
