"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (pure-Python twins are
selected at import time), so a failed compile downgrades to a warning instead
of aborting the install. Set EVOLOOP_PURE=1 to skip the compile entirely.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("EVOLOOP_PURE") == "1":
        return []
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("evoloop: Cython not available, building pure-Python only", file=sys.stderr)
        return []
    pyx = "src/evoloop/metrics/_kernels/_speed.pyx"
    if not os.path.exists(pyx):
        return []
    ext = Extension(
        "evoloop.metrics._kernels._speed",
        [pyx],
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Degrade compile failures to warnings; the pure fallback takes over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"evoloop: extension build skipped ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"evoloop: building {ext.name} failed ({exc}); "
                  "falling back to pure Python", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
