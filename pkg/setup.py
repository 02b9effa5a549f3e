"""Build script for the optional compiled stepping kernel.

The extension is a performance twin of etseek._kernel; the package works
without it. Any compile failure downgrades to the pure-Python backend, so
this must never hard-fail the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "etseek._ckernel",
                ["src/etseek/_ckernel.pyx"],
                # -ffp-contract=off: no FMA fusion, so the compiled kernel
                # produces bit-identical doubles to the pure-Python loop.
                extra_compile_args=["-O2", "-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
