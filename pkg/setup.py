"""Build script. The compiled kernel extension is optional: if Cython (or a C
compiler) is unavailable the package installs pure-Python and selects the
numpy fallback at import time.

To build the fast kernels in a source checkout:

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SSPLOC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("ssploc._kernels", ["src/ssploc/_kernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
