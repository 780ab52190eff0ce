from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# cli.cpp, artifacts.cpp, and svg.cpp stay out: they carry the command-line
# surface and need the build-generated schema header.
core_sources = [
    "src/common.cpp",
    "src/dynsys.cpp",
    "src/multiindex.cpp",
    "src/network_simplex.cpp",
    "src/transport.cpp",
    "src/emergence.cpp",
    "src/jets.cpp",
    "src/sinks.cpp",
]

ext_modules = [
    Pybind11Extension(
        "emlab._emlab",
        ["python/bindings.cpp"] + core_sources,
        include_dirs=["include", "vendor"],
        cxx_std=20,
    )
]

setup(ext_modules=ext_modules, cmdclass={"build_ext": build_ext})
