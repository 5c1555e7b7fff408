"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so a failing C toolchain must not
abort the install.
"""

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise continue without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # CompileError, DistutilsPlatformError, ...
            print(f"warning: skipping compiled kernels ({exc}); "
                  "falling back to pure-python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to pure-python backend")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "irrepcore._kernels",
                ["src/irrepcore/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
