"""Build hook for the optional compiled kernels.

The package works without the extension (``unidom._kernels_py`` is the
fallback), so a missing Cython or compiler only skips the build.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("unidom._kernels", ["src/unidom/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
