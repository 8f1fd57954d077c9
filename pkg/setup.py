import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the Cython kernels if possible; the package falls back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            sys.stderr.write(f"warning: compiled kernels not built ({exc}); using the Python fallback\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            sys.stderr.write(f"warning: could not build {ext.name} ({exc})\n")


ext_modules = []
if not os.environ.get("COMBDEMAND_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        try:
            ext_modules = cythonize(
                [Extension("combdemand._ckernels", ["src/combdemand/_ckernels.pyx"], extra_compile_args=["-O3"])],
                compiler_directives={"language_level": 3},
            )
        except Exception as exc:  # noqa: BLE001
            sys.stderr.write(f"warning: cythonize failed ({exc}); using the Python fallback\n")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
