import os
import sys

# In-tree runs: the package sources live under python/ and the extension in the
# build directory (HYPERPOT_EXT_DIR, exported by the ctest registration).
_pkg_dir = os.environ.get("HYPERPOT_PKG_DIR")
if _pkg_dir and _pkg_dir not in sys.path:
    sys.path.insert(0, _pkg_dir)
