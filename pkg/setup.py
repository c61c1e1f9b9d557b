"""Build script: compiles the optional closure-kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so the build is marked optional and a failed compile only
costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mdinterp._ckernels",
                ["src/mdinterp/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
