import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext_modules = [
    Extension(
        "cavityesd._native",
        sources=["src/cavityesd/_native.pyx"],
        include_dirs=[numpy.get_include()],
        # -fcx-limited-range drops the NaN-recovery branch around complex
        # multiplication (plain 4-multiply form, same IEEE adds/muls numpy
        # uses), which is what lets the stepping loops vectorize.
        extra_compile_args=["-O3", "-fcx-limited-range"],
    )
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
