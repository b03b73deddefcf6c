import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "freqdecay.backend._ckernels",
                ["src/freqdecay/backend/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python kernels are selected at import time when the compiled
    # extension is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
