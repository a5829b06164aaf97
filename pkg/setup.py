import numpy as np
from setuptools import Extension, setup

# The compiled trajectory kernels are optional: the package falls back to the
# NumPy implementation if the extension is absent, so a failed build must not
# block installation.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pmdsim._mc",
                ["src/pmdsim/_mc.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    print(f"skipping compiled kernels ({exc!r}); pure NumPy backend will be used")
    extensions = []

setup(ext_modules=extensions)
