"""Hot-kernel backend selection.

Prefers the compiled extension and falls back to pure numpy when the
extension was not built.  ``BACKEND`` names the active implementation.
"""

from . import fallback as _fallback

try:
    from . import _core as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built
    _impl = _fallback
    BACKEND = "python"

series_bracket = _impl.series_bracket
jacobi_eigh = _impl.jacobi_eigh


def backends():
    """Mapping of available backend names to their modules."""
    out = {"python": _fallback}
    if BACKEND == "compiled":
        out["compiled"] = _impl
    return out
