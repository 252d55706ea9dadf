"""Build script: compiles the optional Cython stepper core.

The package is fully functional without the extension (a pure-Python core
with identical behavior is selected at import time), so a failing or
missing Cython toolchain only costs speed.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "ambreal._stepcore_cy",
                ["src/ambreal/_stepcore_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"ambreal: building without the compiled core ({exc})")

setup(ext_modules=ext_modules)
