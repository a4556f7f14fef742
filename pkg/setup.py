"""Build the optional compiled kernel; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("LOCKDOWNSIM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            ["src/lockdownsim/_kernels.pyx"],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
