"""akltlab: AKLT entanglement spectra and desk-scale ED for the spin-1 BBH chain.

Submodules are imported lazily so that the command-line entry point can set
threading environment variables before NumPy loads.

    spin_ops   spin operators and the matrix-free BBH Hamiltonian
    kernels    matvec kernel dispatch (compiled extension or NumPy fallback)
    mps        AKLT site tensors, transfer matrix, block states, Gram algebra
    spectra    closed-form entanglement spectra and coupling extraction
    ed         exact diagonalization, reduced density matrices, fidelity
    sop        string order parameter (ED, transfer-matrix, asymptotic routes)
    fits       exponential-decay fits for gaps and string order
    cli        command-line interface
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = (
    "spin_ops",
    "kernels",
    "mps",
    "spectra",
    "ed",
    "sop",
    "fits",
    "cli",
    "errors",
)


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
