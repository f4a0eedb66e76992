import sys

from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled kernels bitwise-identical to the pure-Python
# fallback (FMA contraction would change rounding inside the samplers).
if sys.platform == "win32":
    compile_args = ["/O2", "/fp:precise"]
else:
    compile_args = ["-O3", "-ffp-contract=off"]

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bayeval._kernels",
                ["src/bayeval/_kernels.pyx"],
                extra_compile_args=compile_args,
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython: install pure-Python only; bayeval.backend falls back at import.
    ext_modules = []

setup(ext_modules=ext_modules)
