"""Spin operator algebra and the matrix-free bilinear-biquadratic Hamiltonian.

Conventions fixed here and relied on everywhere else:

* spin-1 basis order |0> = m=+1, |1> = m=0, |2> = m=-1, matching the index
  k in {0,1,2} that labels the AKLT site tensors A_k;
* site 1 is the slowest-varying index of the 3^n product basis;
* all ED arithmetic is real (the bond matrix, S^z, and exp(-i pi S^z) are
  real in this basis); complex matrices appear only in SpinOperatorSet.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from . import kernels
from .errors import CapacityError

#: theta of the AKLT point, tan(theta) = 1/3.
THETA_AKLT = math.atan(1.0 / 3.0)

#: Largest chain the matrix-free handle will address (3^16 ~ 43e6 amplitudes).
MAX_SITES = 16


@dataclass(frozen=True)
class SpinOperatorSet:
    """Spin-1 matrices (hbar = 1) and spin-1/2 Pauli matrices."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    pauli_x: np.ndarray
    pauli_y: np.ndarray
    pauli_z: np.ndarray


def spin1_matrices():
    """Return the standard spin-1 and Pauli matrices."""
    sqrt2 = math.sqrt(2.0)
    sp = np.zeros((3, 3), dtype=complex)
    sp[0, 1] = sqrt2
    sp[1, 2] = sqrt2
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    pauli_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    pauli_y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    pauli_z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return SpinOperatorSet(sx, sy, sz, pauli_x, pauli_y, pauli_z)


def heisenberg_two_site():
    """Real 9x9 matrix of S_1 . S_2 in the two-site spin-1 product basis."""
    ops = spin1_matrices()
    sx = ops.sx.real
    isy = (1j * ops.sy).real  # i S^y is real
    sz = ops.sz.real
    return np.kron(sx, sx) - np.kron(isy, isy) + np.kron(sz, sz)


def bbh_bond_matrix(theta):
    """One bond of the BBH Hamiltonian: cos(theta) S.S + sin(theta) (S.S)^2."""
    ss = heisenberg_two_site()
    return math.cos(theta) * ss + math.sin(theta) * (ss @ ss)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Parameters of a BBH chain: angle, site count, boundary condition."""

    theta: float
    n_sites: int
    boundary: str

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(
                f"boundary must be 'open' or 'periodic', got {self.boundary!r}"
            )


@dataclass(frozen=True)
class HamiltonianHandle:
    """Matrix-free BBH operator; immutable and safe for concurrent readers."""

    spec: HamiltonianSpec
    bond_matrix: np.ndarray = field(repr=False)
    dimension: int

    def apply(self, vec):
        """Return H @ vec without materializing H."""
        vec = np.asarray(vec)
        if vec.shape != (self.dimension,):
            raise ValueError(
                f"vector has shape {vec.shape}, expected ({self.dimension},)"
            )
        return kernels.apply_bbh(
            vec, self.spec.n_sites, self.bond_matrix, self.spec.boundary == "periodic"
        )

    def aslinearoperator(self):
        """Real symmetric scipy LinearOperator view of this handle."""
        return spla.LinearOperator(
            (self.dimension, self.dimension),
            matvec=self.apply,
            rmatvec=self.apply,
            dtype=np.float64,
        )

    def dense(self):
        """Materialize H column-by-column (small chains only)."""
        if self.spec.n_sites > 8:
            raise CapacityError(
                f"dense materialization limited to 8 sites, got {self.spec.n_sites}"
            )
        cols = np.empty((self.dimension, self.dimension))
        basis = np.zeros(self.dimension)
        for j in range(self.dimension):
            basis[j] = 1.0
            cols[:, j] = self.apply(basis)
            basis[j] = 0.0
        return cols


def build_bbh(spec):
    """Construct the matrix-free BBH handle for a HamiltonianSpec."""
    if spec.n_sites > MAX_SITES:
        raise CapacityError(
            f"BBH chains are capped at {MAX_SITES} sites "
            f"(3^{spec.n_sites} amplitudes requested)"
        )
    return HamiltonianHandle(
        spec=spec, bond_matrix=bbh_bond_matrix(spec.theta), dimension=3**spec.n_sites
    )
