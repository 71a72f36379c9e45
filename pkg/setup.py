"""Build hook for the optional compiled kernels; metadata lives in pyproject.toml."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("IBLT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # the pure-Python kernels are used instead
        pass
    else:
        ext_modules = cythonize(["src/ibltransfer/_kernels_c.pyx"],
                                compiler_directives={"language_level": "3"}, quiet=True)

setup(ext_modules=ext_modules)
