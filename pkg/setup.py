"""Build script for the compiled kernel core.

The extension is optional: if no C compiler is available the install still
succeeds and the package falls back to the NumPy implementations in
``modehunt._numpy_core`` (selected at import time by ``modehunt.backend``).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "modehunt._core",
                sources=["src/modehunt/_core.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
