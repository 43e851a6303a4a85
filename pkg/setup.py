"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: the kernel layer
falls back to pure-Python implementations at import time. Set
DATAHIGHLIGHTS_SKIP_EXTENSION=1 to force a pure-Python install.
"""

import logging
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

log = logging.getLogger(__name__)

ext_modules = []
if not os.environ.get("DATAHIGHLIGHTS_SKIP_EXTENSION"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "datahighlights.kernels._pair_cy",
                    sources=["src/datahighlights/kernels/_pair_cy.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        log.warning("Cython not available; building without compiled kernels")


class OptionalBuildExt(build_ext):
    """Tolerate a missing compiler: the pure-Python fallback takes over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            log.warning("compiled kernels skipped: %s", exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            log.warning("compiled kernels skipped: %s", exc)


setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
