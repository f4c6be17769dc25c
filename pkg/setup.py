"""Build script: compiles the optional extension holding the numerical hot paths.

If Cython (or a C compiler) is unavailable the package still installs and
falls back to the pure-numpy backend at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "dyadkde._ckernels",
                ["src/dyadkde/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
