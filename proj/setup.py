import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Delegates the extension build to the repository's CMake project."""

    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        config = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={config}",
                f"-DPython3_EXECUTABLE={sys.executable}",
                "-DHDSCHED_BUILD_CLI=OFF",
                "-DHDSCHED_BUILD_TESTS=OFF",
                "-DHDSCHED_BUILD_PYTHON=ON",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build", str(build_dir),
                "--target", "_hdsched",
                f"-j{os.cpu_count() or 2}",
            ],
            check=True,
        )
        staged = sorted((build_dir / "python" / "hdsched").glob("_hdsched*"))
        if not staged:
            raise RuntimeError("cmake did not produce the _hdsched module")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(staged[0], target)


setup(
    cmdclass={"build_ext": CMakeBuild},
    ext_modules=[CMakeExtension("hdsched._hdsched")],
)
