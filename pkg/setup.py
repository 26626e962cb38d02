"""Build the optional compiled kernels.

The package works without them: ``bugonomics.kernels`` falls back to the
pure-Python implementations when the extension is not importable.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BUGONOMICS_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "bugonomics.kernels._ckernels",
                    ["src/bugonomics/kernels/_ckernels.pyx"],
                    # keep float results bit-identical to the Python fallback
                    extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
