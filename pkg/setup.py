from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("hybrix._speedups", ["src/hybrix/_speedups.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except Exception as exc:  # Cython missing or compile setup failed: pure-Python fallback
    print(f"hybrix: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
