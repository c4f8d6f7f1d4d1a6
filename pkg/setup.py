"""Builds the optional compiled core; the package falls back to pure Python without it."""
import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler / Cython: keep the pure-Python core
            print(f"warning: compiled core not built ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: compiled core not built ({exc})")


def extensions():
    if os.environ.get("FRACGREEN_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "fracgreen._core",
        ["src/fracgreen/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"}, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
