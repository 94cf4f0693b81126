"""Green functions, Martin kernels, and hyperbolic unfoldings on weighted graphs.

Thin wrapper around the compiled extension. Installed wheels carry the
extension inside this package; in a plain CMake build tree the environment
variable HYPERPOT_EXT_DIR points at the directory holding the built module.
"""

import importlib.util
import os
import sys


def _load_extension():
    try:
        from . import _hyperpot  # wheel layout

        return _hyperpot
    except ImportError:
        pass
    ext_dir = os.environ.get("HYPERPOT_EXT_DIR")
    if not ext_dir:
        raise ImportError(
            "hyperpot extension not found; install the package or set HYPERPOT_EXT_DIR "
            "to the build directory containing _hyperpot"
        )
    for name in sorted(os.listdir(ext_dir)):
        if name.startswith("_hyperpot") and name.endswith((".so", ".pyd", ".dylib")):
            spec = importlib.util.spec_from_file_location(
                __name__ + "._hyperpot", os.path.join(ext_dir, name)
            )
            module = importlib.util.module_from_spec(spec)
            sys.modules[spec.name] = module
            spec.loader.exec_module(module)
            return module
    raise ImportError(f"no _hyperpot extension in {ext_dir}")


_ext = _load_extension()
__version__ = _ext.__version__

_public = [name for name in dir(_ext) if not name.startswith("_")]
globals().update({name: getattr(_ext, name) for name in _public})
__all__ = sorted(_public)
del _public
