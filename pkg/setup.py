"""Build script: compiles the eigenvalue kernel extension when Cython is
available; the package falls back to the pure-Python kernels otherwise."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("esspec._eig_cy", ["src/esspec/_eig_cy.pyx"],
                   include_dirs=[np.get_include()])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
