"""Build script: compiles the optional fast special-function core.

The package works without the extension (a pure-Python implementation of the
same kernels is selected at import time), so a failed compilation only costs
speed, not functionality.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pauli2d._kernels",
                ["src/pauli2d/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
