"""Build script for the compiled integrator kernels.

The package works without the extension (a pure-Python twin is selected at
import time), but the compiled kernels are 2--3 orders of magnitude faster
and are what the Monte-Carlo and acceptance workloads expect.
"""
import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "giant_swing._fastkernel",
    ["src/giant_swing/_fastkernel.pyx"],
    include_dirs=[numpy.get_include()],
)

setup(ext_modules=cythonize([ext], language_level=3))
