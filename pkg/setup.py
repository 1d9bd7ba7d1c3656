"""Build script: compiles the optional accelerator extension.

The extension speeds up the sequential evolution kernels; if Cython or a C
compiler is unavailable the install proceeds and the package falls back to
the pure-numpy kernels at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Let the extension build fail without failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"warning: skipping accelerator extension ({exc}); "
              "eopulse will use the pure-numpy kernels")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "eopulse._backend._fastkernels",
                ["src/eopulse/_backend/_fastkernels.pyx"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
