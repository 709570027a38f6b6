"""Select the compiled kernels when available, otherwise the pure-Python fallback.

Set ``BOSONIC_NESS_PURE=1`` to force the fallback.
"""

import os

from bosonic_ness._core import _fallback

NAME = "python"

if os.environ.get("BOSONIC_NESS_PURE", "").lower() in ("", "0", "false", "no"):
    try:
        from bosonic_ness._core import _kernels as _impl
        NAME = "compiled"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

tridiag_eigvalsh = _impl.tridiag_eigvalsh
signed_entropy_sum = _impl.signed_entropy_sum
rk4_lyapunov = _impl.rk4_lyapunov
