"""NumPy fallback matvec kernel for the bilinear-biquadratic chain.

Semantics match akltlab._kernels_c exactly: site 1 is the slowest-varying
index of the 3^n product basis, bond terms are accumulated in ascending bond
order (1..n-1, then the wrap bond for periodic chains), so the floating-point
summation order is fixed per configuration.
"""

import numpy as np


def apply_bbh(vec, n, bond, periodic):
    """Apply the BBH Hamiltonian (sum of two-site bond matrices) to a vector.

    Parameters
    ----------
    vec : (3**n,) float array
    n : number of sites
    bond : (9, 9) float array, one bond term in the two-site product basis
        ordered (left site, right site)
    periodic : whether to include the wrap bond (n, 1)
    """
    vec = np.asarray(vec, dtype=np.float64)
    out = np.zeros_like(vec)
    for i in range(n - 1):
        dl = 3**i
        dr = 3 ** (n - i - 2)
        block = vec.reshape(dl, 9, dr)
        out += np.einsum("ab,lbr->lar", bond, block).reshape(-1)
    if periodic:
        # Wrap bond (n, 1): left factor of the bond matrix is site n (fastest
        # index), right factor is site 1 (slowest index).
        b4 = bond.reshape(3, 3, 3, 3)
        block = vec.reshape(3, 3 ** (n - 2), 3)
        out += np.einsum("stuv,vmu->tms", b4, block).reshape(-1)
    return out
