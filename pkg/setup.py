"""Build hook: compile the tick kernel when Cython is available.

The package runs fine without the extension; auxsim.kernel falls back to
the pure-Python twin at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "auxsim._kernel_cy",
        sources=["src/auxsim/_kernel_cy.pyx"],
        include_dirs=[numpy.get_include()],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
