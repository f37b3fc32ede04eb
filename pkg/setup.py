"""Build script for the optional compiled band-solver kernel.

The package works without the extension (a scipy fallback is selected at
import time); building it just makes the per-group/per-ordinate banded
solves in the transport stepper considerably faster.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "frte._kernels",
                ["src/frte/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
