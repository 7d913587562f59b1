"""Compile the native bridge library on demand."""

import shutil
import subprocess
from pathlib import Path

_NATIVE_DIR = Path(__file__).parent / "_native"
SOURCE = _NATIVE_DIR / "_topobridge.c"
LIBRARY = _NATIVE_DIR / "libtopobridge.so"


def find_compiler() -> str:
    for name in ("cc", "gcc", "clang"):
        path = shutil.which(name)
        if path:
            return path
    raise RuntimeError("no C compiler found (tried cc, gcc, clang)")


def ensure_library() -> Path:
    """Build the shared library if missing or older than its source."""
    if LIBRARY.exists() and LIBRARY.stat().st_mtime >= SOURCE.stat().st_mtime:
        return LIBRARY
    cmd = [find_compiler(), "-O2", "-shared", "-fPIC", "-o", str(LIBRARY), str(SOURCE)]
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        raise RuntimeError(f"bridge build failed:\n{result.stderr}")
    return LIBRARY


if __name__ == "__main__":
    print(ensure_library())
