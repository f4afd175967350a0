"""Build the optional compiled RK4 kernel; the package falls back to numpy without it."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RAMANSWAP_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("ramanswap._lindblad_ext", ["src/ramanswap/_lindblad_ext.pyx"],
                       include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("Cython/numpy unavailable: installing without the compiled kernel")

setup(ext_modules=ext_modules)
