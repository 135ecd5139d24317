"""Build script.

The compiled extension is optional: if Cython (or a C compiler) is missing,
the package installs with the pure-Python kernels only.  Set ALMQR_NO_EXT=1
to skip the extension build explicitly.

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ALMQR_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "almqr._fast",
                    ["src/almqr/_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
