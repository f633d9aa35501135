"""Build script.

The hot kernels (wood regrowth, water-filling allocation, diagonal run
scanning) have an optional Cython-compiled implementation.  If Cython or a C
compiler is unavailable the package still installs and falls back to the pure
Python kernels at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "luxsim._kernels._fast",
                ["src/luxsim/_kernels/_fast.pyx"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"luxsim: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
