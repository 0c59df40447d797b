import numpy
from setuptools import Extension, setup

# The compiled kernel is an optional accelerator: the package falls back to
# the vectorized numpy implementation when the extension is unavailable.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "warpgap._profile_kernel",
                ["src/warpgap/_profile_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
