from pathlib import Path

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

root = Path(__file__).parent

ext = Pybind11Extension(
    "ggiwpmbm._ggiwpmbm",
    sorted(str(p.relative_to(root)) for p in (root / "src").glob("*.cpp"))
    + ["python/module.cpp"],
    include_dirs=["include", "vendor", "/usr/include/eigen3"],
    cxx_std=20,
    define_macros=[("PMBM_SCENARIO_DIR", f'"{root / "scenarios"}"')],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
