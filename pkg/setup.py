"""Build script for the optional compiled kernels.

The extension accelerates the chain transfer products and the batched
steady-state/concurrence solves. It is strictly optional: if the build
fails (no compiler, no Cython) the package falls back to the numpy
implementations in jjline._purepy at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "jjline._core",
        sources=["src/jjline/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
