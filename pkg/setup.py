"""Build script: compiles the optional Cython kernel extension.

Set TRUNCARX_NO_EXT=1 to skip the extension and install pure-Python only
(the package falls back to the NumPy kernels at import time).
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TRUNCARX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "truncarx._kernels._core",
                    ["src/truncarx/_kernels/_core.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
