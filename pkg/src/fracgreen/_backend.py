"""Pick the compiled kernel module if it is importable, else the Python twin."""
import os

core = None
COMPILED = False

if os.environ.get("FRACGREEN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as core

        COMPILED = True
    except ImportError:
        core = None

if core is None:
    from . import _core_py as core


def backend_name():
    return "cython" if COMPILED else "python"
