"""Select the normal-form kernel implementation at import time.

The compiled extension is used when it was built; setting
``DERIVEDFUNCTORS_PURE=1`` forces the pure-Python kernels.
"""

import os

from derivedfunctors import _kernels_py

if os.environ.get("DERIVEDFUNCTORS_PURE", "") not in ("", "0"):
    kernels = _kernels_py
    NAME = "python"
else:
    try:
        from derivedfunctors import _kernels as kernels
        NAME = "cython"
    except ImportError:
        kernels = _kernels_py
        NAME = "python"

smith = kernels.smith
hermite = kernels.hermite
matmul = kernels.matmul
