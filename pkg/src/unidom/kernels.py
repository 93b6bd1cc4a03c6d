"""Kernel selection.

The compiled extension ``unidom._kernels`` is used when it imports; the
pure-Python module is the fallback.  Set ``UNIDOM_PURE=1`` to force the
fallback (the benchmark and the parity tests use this).
"""

from __future__ import annotations

import os

if os.environ.get("UNIDOM_PURE", "") not in ("", "0"):
    from unidom import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from unidom import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:  # pragma: no cover - depends on the build
        from unidom import _kernels_py as _impl

        COMPILED = False

mul = _impl.mul
inv = _impl.inv
conj = _impl.conj
is_identity = _impl.is_identity
orbit_transversal = _impl.orbit_transversal
extend_transversal = _impl.extend_transversal
sift = _impl.sift
coset_canon = _impl.coset_canon
orbits = _impl.orbits
fixed_count = _impl.fixed_count

BACKEND = "compiled" if COMPILED else "python"
