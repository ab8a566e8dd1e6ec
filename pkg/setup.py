"""Build script: compiles the optional extension with the hot kernels.

The package works without the extension (a pure numpy fallback is selected
at import time), so the extension is marked optional and any build failure
is non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wstar._kernels._core",
                ["src/wstar/_kernels/_core.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
