"""Error types shared across the package.

The CLI maps these onto process exit codes: usage errors exit 2 (argparse),
CapacityError exits 3, SolverError exits 4, verification failure exits 1.
"""


class CapacityError(Exception):
    """A requested system size exceeds the supported desk-scale capacity."""


class SolverError(Exception):
    """The iterative eigensolver failed to converge to the requested residual."""
