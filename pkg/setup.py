"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy-based fallback is selected
at import time); the extension just makes profiling of very large columns
faster. Build failures are therefore non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "joininfer.kernels._native",
                ["src/joininfer/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
