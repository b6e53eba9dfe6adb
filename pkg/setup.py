"""Build script: compiles the optional contraction-kernel extension.

The package works without the extension (a pure NumPy fallback is selected
at import time); set FTSINDEP_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FTSINDEP_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "ftsindep._contractions",
                    ["src/ftsindep/_contractions.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
