"""Hot-loop kernels: compiled core with a pure-Python (numpy) fallback.

The compiled module is optional; `BACKEND` reports which implementation
was selected.  Set PICARDMOD_NO_EXT=1 to force the fallback.  Callers
must pre-check int64 bounds (see `check_int64_headroom`).
"""

from __future__ import annotations

import os

from . import _fallback

__all__ = [
    "BACKEND",
    "sweep_norms",
    "points_in_hulls",
    "check_int64_headroom",
]

_impl = _fallback
BACKEND = "fallback"
if not os.environ.get("PICARDMOD_NO_EXT"):
    try:
        from . import _core  # type: ignore[attr-defined]

        _impl = _core
        BACKEND = "compiled"
    except ImportError:
        pass


def _core_available() -> bool:
    try:
        from . import _core  # noqa: F401

        return True
    except ImportError:
        return False


def set_backend(name: str | None) -> None:
    """Force a backend ('compiled'/'fallback'); None restores the default."""
    global _impl, BACKEND
    if name is None:
        name = "compiled" if _core_available() and not os.environ.get(
            "PICARDMOD_NO_EXT"
        ) else "fallback"
    if name == "compiled":
        from . import _core

        _impl, BACKEND = _core, "compiled"
    elif name == "fallback":
        _impl, BACKEND = _fallback, "fallback"
    else:
        raise ValueError(name)


def sweep_norms(ga, gb, pa, pb, d, tau_c):
    """Norms of the entries of G . P in O_d, for int64 pair arrays.

    ga, gb: (K, 3) w-coordinates of K row vectors; pa, pb: (3, r) columns.
    Returns (K, r) int64 norms; tau_c < 0 selects the w^2 = -d rule,
    otherwise w^2 = w - tau_c.
    """
    return _impl.sweep_norms(ga, gb, pa, pb, d, tau_c)


def points_in_hulls(samples, normals, offsets, starts):
    """Coverage mask for integer sample points against stacked facet systems.

    samples: (ns, 3) int64; normals: (F, 3) int64; offsets: (F,) int64;
    starts: (nregions+1,) int32 slicing normals/offsets per region.  A point
    is covered when some region has normals . s >= offset for all facets.
    """
    return _impl.points_in_hulls(samples, normals, offsets, starts)


def check_int64_headroom(*maxima, slack=4):
    """Assert the worst-case accumulated product fits int64 comfortably."""
    bound = 1
    for m in maxima:
        bound *= max(1, int(m))
    if slack * 3 * bound >= 2**63:
        raise OverflowError(
            f"kernel inputs risk int64 overflow (bound {3 * slack * bound:.3e})"
        )
