"""Build hook for the optional compiled matvec kernel.

The package is pure Python plus one optional Cython extension
(akltlab._kernels_c).  If Cython or a C compiler is unavailable, or if
AKLTLAB_NO_EXT=1 is set, the build proceeds without the extension and the
package falls back to the NumPy kernel at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("AKLTLAB_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "akltlab._kernels_c",
                    ["src/akltlab/_kernels_c.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
