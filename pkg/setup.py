import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "coulombgas._pairwise",
                ["src/coulombgas/_pairwise.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: install pure-Python only, the kernel selector
    # falls back to the numpy implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
