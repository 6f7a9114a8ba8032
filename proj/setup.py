"""Builds the kpsh._core pybind11 extension from the C++ sources."""

from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "kpsh._core",
    sources=sorted(glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
